#include "twinmark/logits_watermark.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/vocabulary.hpp"

#include <cmath>
#include <numeric>

namespace twinmark {

void LogitsWatermarkConfig::validate() const
{
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::Config, "gamma must lie in (0,1)");
    require(delta >= 0.0 && !std::isnan(delta), ErrorCode::Config, "delta must be >= 0");
    require(scheme != PartitionScheme::Kgw || prefix_len >= 1, ErrorCode::Config, "kgw prefix_len must be >= 1");
    require(!std::isnan(z_threshold), ErrorCode::Config, "z_threshold must be a number");
}

std::size_t green_list_size(double gamma, std::size_t vocab_size)
{
    return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(vocab_size)));
}

namespace {

std::uint64_t partition_seed(const LogitsWatermarkConfig& cfg, TokenView context)
{
    if (cfg.scheme == PartitionScheme::Unigram) return hash_window(cfg.key, {});
    const auto k = static_cast<std::size_t>(cfg.prefix_len);
    TokenSequence window(k, 0);
    const std::size_t take = std::min(k, context.size());
    std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(), window.end() - static_cast<std::ptrdiff_t>(take));
    return hash_window(cfg.key, window);
}

} // namespace

GreenList partition(const LogitsWatermarkConfig& cfg, std::size_t vocab_size, TokenView context)
{
    cfg.validate();
    require(vocab_size >= 2, ErrorCode::InvalidArgument, "partition needs |V| >= 2");
    const std::uint64_t seed = partition_seed(cfg, context);

    std::vector<TokenId> perm(vocab_size);
    std::iota(perm.begin(), perm.end(), TokenId{0});
    for (std::size_t i = vocab_size - 1; i > 0; --i) {
        const auto j = bounded(stream_at(seed, i), i + 1);
        std::swap(perm[i], perm[j]);
    }

    GreenList g;
    g.green_count = green_list_size(cfg.gamma, vocab_size);
    g.membership.assign(vocab_size, false);
    for (std::size_t i = 0; i < g.green_count; ++i) g.membership[perm[i]] = true;
    return g;
}

std::vector<double> apply_bias(std::span<const double> logits, const GreenList& green, double delta)
{
    require(logits.size() == green.membership.size(), ErrorCode::LengthMismatch,
            "logits and green list lengths differ");
    std::vector<double> out(logits.begin(), logits.end());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (green.membership[i]) out[i] += delta;
    return out;
}

double z_from_counts(std::size_t n_green, std::size_t length, double gamma)
{
    const double L = static_cast<double>(length);
    return (static_cast<double>(n_green) - gamma * L) / std::sqrt(L * gamma * (1.0 - gamma));
}

LogitsFragment detect_logits(TokenView tokens, const LogitsWatermarkConfig& cfg, std::size_t vocab_size,
                             std::span<const std::size_t> positions)
{
    cfg.validate();
    validate_sequence(tokens, vocab_size);
    const std::size_t skip = cfg.scheme == PartitionScheme::Kgw ? static_cast<std::size_t>(cfg.prefix_len) : 0;

    std::vector<std::size_t> all;
    if (positions.empty()) {
        for (std::size_t t = skip; t < tokens.size(); ++t) all.push_back(t);
        positions = all;
    }

    LogitsFragment f;
    f.z_threshold = cfg.z_threshold;
    GreenList fixed;
    if (cfg.scheme == PartitionScheme::Unigram) fixed = partition(cfg, vocab_size, {});
    for (std::size_t t : positions) {
        require(t < tokens.size(), ErrorCode::InvalidArgument, "scored position outside sequence");
        if (t < skip) continue;
        const bool green = cfg.scheme == PartitionScheme::Unigram
                               ? fixed.contains(tokens[t])
                               : partition(cfg, vocab_size, tokens.first(t)).contains(tokens[t]);
        f.n_green += green ? 1 : 0;
        ++f.scored;
    }
    require(f.scored >= 1, ErrorCode::SequenceTooShort, "logits detector has no scorable tokens");
    f.z = z_from_counts(f.n_green, f.scored, cfg.gamma);
    f.verdict = f.z > cfg.z_threshold;
    return f;
}

double z_score(TokenView tokens, const LogitsWatermarkConfig& cfg, std::size_t vocab_size)
{
    return detect_logits(tokens, cfg, vocab_size).z;
}

} // namespace twinmark
