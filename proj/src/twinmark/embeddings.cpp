#include "twinmark/embeddings.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace twinmark {

EmbeddingTable::EmbeddingTable(std::size_t vocab_size, std::size_t dim, std::vector<double> values)
    : vocab_size_(vocab_size), dim_(dim), values_(std::move(values))
{
    require(values_.size() == vocab_size_ * dim_, ErrorCode::LengthMismatch, "embedding table has wrong size");
    for (double v : values_) require(std::isfinite(v), ErrorCode::Format, "embedding table holds a non-finite value");
}

std::span<const double> EmbeddingTable::vector(TokenId id) const
{
    require(id < vocab_size_, ErrorCode::UnknownToken, "embedding lookup outside vocabulary");
    return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

double EmbeddingTable::cosine(TokenId a, TokenId b) const
{
    auto va = vector(a);
    auto vb = vector(b);
    double dot = 0, na = 0, nb = 0;
    for (std::size_t d = 0; d < dim_; ++d) {
        dot += va[d] * vb[d];
        na += va[d] * va[d];
        nb += vb[d] * vb[d];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

EmbeddingTable train_embeddings(TokenView corpus, std::size_t vocab_size, std::size_t dim, std::size_t window,
                                std::uint64_t seed)
{
    require(dim >= 2, ErrorCode::InvalidArgument, "embedding dim must be >= 2");
    require(window >= 1, ErrorCode::InvalidArgument, "co-occurrence window must be >= 1");
    validate_sequence(corpus, vocab_size);

    // Ordered maps keep the floating-point summation order fixed.
    std::vector<std::map<TokenId, double>> cooc(vocab_size);
    std::vector<double> row_sum(vocab_size, 0.0);
    double total = 0.0;
    const std::size_t n = corpus.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= window ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + window);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            cooc[corpus[i]][corpus[j]] += 1.0;
            row_sum[corpus[i]] += 1.0;
            total += 1.0;
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    const std::uint64_t proj_key = mix64(seed ^ 0x70726f6aULL);
    auto projection = [&](TokenId ctx, std::size_t d) {
        return (stream_at(proj_key, static_cast<std::uint64_t>(ctx) * dim + d) >> 63) ? scale : -scale;
    };

    std::vector<double> values(vocab_size * dim, 0.0);
    for (TokenId w = 0; w < vocab_size; ++w) {
        double* out = values.data() + static_cast<std::size_t>(w) * dim;
        for (const auto& [c, count] : cooc[w]) {
            const double pmi = std::log(count * total / (row_sum[w] * row_sum[c]));
            if (pmi <= 0.0) continue;
            for (std::size_t d = 0; d < dim; ++d) out[d] += pmi * projection(c, d);
        }
        double norm = 0.0;
        for (std::size_t d = 0; d < dim; ++d) norm += out[d] * out[d];
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (std::size_t d = 0; d < dim; ++d) out[d] /= norm;
        }
    }
    return EmbeddingTable(vocab_size, dim, std::move(values));
}

} // namespace twinmark
