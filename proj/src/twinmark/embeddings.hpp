#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace twinmark {

/// Row-major |V| x dim table of token vectors.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t vocab_size, std::size_t dim, std::vector<double> values);

    std::size_t vocab_size() const noexcept { return vocab_size_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return vocab_size_ == 0; }
    std::span<const double> vector(TokenId id) const;
    const std::vector<double>& values() const noexcept { return values_; }

    double cosine(TokenId a, TokenId b) const;

    bool operator==(const EmbeddingTable&) const = default;

private:
    std::size_t vocab_size_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

/// Positive-PMI co-occurrence rows (symmetric window) projected to `dim`
/// dimensions by a keyed Rademacher matrix, then scaled to unit length.
/// Tokens without any positive association keep the zero vector.
EmbeddingTable train_embeddings(TokenView corpus, std::size_t vocab_size, std::size_t dim, std::size_t window,
                                std::uint64_t seed);

} // namespace twinmark
