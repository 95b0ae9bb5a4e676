#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace twinmark {

/// Exponential-minimum (AAR) sampling watermark.
struct SamplingWatermarkConfig {
    std::uint64_t key = 15485863;
    int prefix_len = 4;
    double p_threshold = 1e-4;

    void validate() const;
    bool operator==(const SamplingWatermarkConfig&) const = default;
};

inline constexpr double kRandomClamp = 1e-12;

/// r_t in (1e-12, 1 - 1e-12)^|V|, keyed by hash(key, last h ids); short
/// contexts are left-padded with id 0.
std::vector<double> random_vector(const SamplingWatermarkConfig& cfg, TokenView context, std::size_t vocab_size);

/// Single component r_t[id] of random_vector(cfg, context, ...).
double random_component(const SamplingWatermarkConfig& cfg, TokenView context, TokenId id);

/// argmax_i r_i^(1/p_i) over tokens with p_i > 0; ties go to the lower id.
TokenId aar_sample(std::span<const double> probs, std::span<const double> r);

struct AarStatistic {
    double score = 0.0;  // sum of -ln(1 - r_t[y_t])
    std::size_t scored = 0;
};

/// Scores positions t >= h; `positions` restricts to a subset.
AarStatistic aar_statistic(TokenView tokens, const SamplingWatermarkConfig& cfg,
                           std::span<const std::size_t> positions = {});

/// Q(L_eff, score): the score is Gamma(L_eff, 1) under the null.
double aar_pvalue(double score, std::size_t scored);
double aar_log_pvalue(double score, std::size_t scored);

struct SamplingFragment {
    double score = 0.0;
    std::size_t scored = 0;
    double p_value = 1.0;
    double log_p_value = 0.0;
    double p_threshold = 0.0;
    bool verdict = false;
};

SamplingFragment detect_sampling(TokenView tokens, const SamplingWatermarkConfig& cfg, std::size_t vocab_size,
                                 std::span<const std::size_t> positions = {});

} // namespace twinmark
