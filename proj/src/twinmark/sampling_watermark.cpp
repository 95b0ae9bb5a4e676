#include "twinmark/sampling_watermark.hpp"

#include "twinmark/gamma_tail.hpp"
#include "twinmark/keyed_random.hpp"
#include "twinmark/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twinmark {

void SamplingWatermarkConfig::validate() const
{
    require(prefix_len >= 1, ErrorCode::Config, "sampling prefix_len must be >= 1");
    require(p_threshold > 0.0 && p_threshold < 1.0, ErrorCode::Config, "p_threshold must lie in (0,1)");
}

namespace {

std::uint64_t vector_seed(const SamplingWatermarkConfig& cfg, TokenView context)
{
    const auto h = static_cast<std::size_t>(cfg.prefix_len);
    TokenSequence window(h, 0);
    const std::size_t take = std::min(h, context.size());
    std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(), window.end() - static_cast<std::ptrdiff_t>(take));
    return hash_window(cfg.key ^ 0x5A4D504CULL, window);
}

double component(std::uint64_t seed, TokenId id)
{
    return std::clamp(unit_open(stream_at(seed, id)), kRandomClamp, 1.0 - kRandomClamp);
}

} // namespace

std::vector<double> random_vector(const SamplingWatermarkConfig& cfg, TokenView context, std::size_t vocab_size)
{
    cfg.validate();
    require(vocab_size >= 2, ErrorCode::InvalidArgument, "random vector needs |V| >= 2");
    const auto seed = vector_seed(cfg, context);
    std::vector<double> r(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) r[i] = component(seed, static_cast<TokenId>(i));
    return r;
}

double random_component(const SamplingWatermarkConfig& cfg, TokenView context, TokenId id)
{
    return component(vector_seed(cfg, context), id);
}

TokenId aar_sample(std::span<const double> probs, std::span<const double> r)
{
    require(probs.size() == r.size(), ErrorCode::LengthMismatch, "probability and random vectors differ in length");
    // r^(1/p) is monotone in ln(r)/p, which avoids underflow for small p.
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] > 0.0)) continue;
        const double s = std::log(r[i]) / probs[i];
        if (arg == probs.size() || s > best) {
            best = s;
            arg = i;
        }
    }
    require(arg < probs.size(), ErrorCode::InvalidArgument, "probability vector has no positive entry");
    return static_cast<TokenId>(arg);
}

AarStatistic aar_statistic(TokenView tokens, const SamplingWatermarkConfig& cfg, std::span<const std::size_t> positions)
{
    cfg.validate();
    const auto h = static_cast<std::size_t>(cfg.prefix_len);
    AarStatistic s;
    auto score_at = [&](std::size_t t) {
        const double r = random_component(cfg, tokens.first(t), tokens[t]);
        s.score += -std::log1p(-r);
        ++s.scored;
    };
    if (positions.empty()) {
        for (std::size_t t = h; t < tokens.size(); ++t) score_at(t);
    } else {
        for (std::size_t t : positions) {
            require(t < tokens.size(), ErrorCode::InvalidArgument, "scored position outside sequence");
            if (t >= h) score_at(t);
        }
    }
    require(s.scored >= 1, ErrorCode::SequenceTooShort, "sampling detector has no scorable tokens");
    return s;
}

double aar_log_pvalue(double score, std::size_t scored)
{
    require(scored >= 1, ErrorCode::SequenceTooShort, "p-value needs at least one scored token");
    require(score >= 0.0, ErrorCode::InvalidArgument, "AAR score must be >= 0");
    return log_gamma_q(static_cast<double>(scored), score);
}

double aar_pvalue(double score, std::size_t scored) { return std::exp(aar_log_pvalue(score, scored)); }

SamplingFragment detect_sampling(TokenView tokens, const SamplingWatermarkConfig& cfg, std::size_t vocab_size,
                                 std::span<const std::size_t> positions)
{
    validate_sequence(tokens, vocab_size);
    const auto stat = aar_statistic(tokens, cfg, positions);
    SamplingFragment f;
    f.score = stat.score;
    f.scored = stat.scored;
    f.log_p_value = aar_log_pvalue(stat.score, stat.scored);
    f.p_value = std::exp(f.log_p_value);
    f.p_threshold = cfg.p_threshold;
    f.verdict = f.p_value < cfg.p_threshold;
    return f;
}

} // namespace twinmark
