#pragma once

#include "twinmark/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace twinmark {

enum class PartitionScheme { Unigram, Kgw };

struct LogitsWatermarkConfig {
    PartitionScheme scheme = PartitionScheme::Unigram;
    std::uint64_t key = 15485863;
    double gamma = 0.5;
    double delta = 2.0;
    int prefix_len = 1; // kgw only
    double z_threshold = 4.0;

    void validate() const;
    bool operator==(const LogitsWatermarkConfig&) const = default;

    static LogitsWatermarkConfig unigram_preset() { return {}; }
    static LogitsWatermarkConfig kgw_preset() { return {PartitionScheme::Kgw, 15485863, 0.5, 0.2, 1, 4.0}; }
};

struct GreenList {
    std::vector<bool> membership;
    std::size_t green_count = 0;

    bool contains(TokenId id) const { return membership[id]; }
};

std::size_t green_list_size(double gamma, std::size_t vocab_size);

/// Keyed partition: a Fisher-Yates permutation seeded from hash(key) for
/// unigram, hash(key, last k ids) for kgw; the first floor(gamma*|V|) ids of
/// the permutation are green. Short kgw contexts are left-padded with id 0.
GreenList partition(const LogitsWatermarkConfig& cfg, std::size_t vocab_size, TokenView context);

std::vector<double> apply_bias(std::span<const double> logits, const GreenList& green, double delta);

struct LogitsFragment {
    double z = 0.0;
    std::size_t n_green = 0;
    std::size_t scored = 0; // L
    double z_threshold = 0.0;
    bool verdict = false;
};

/// Positions scored: all for unigram, t >= k for kgw. `positions` restricts
/// scoring to a subset of the sequence (contexts still come from `tokens`).
LogitsFragment detect_logits(TokenView tokens, const LogitsWatermarkConfig& cfg, std::size_t vocab_size,
                             std::span<const std::size_t> positions = {});

double z_score(TokenView tokens, const LogitsWatermarkConfig& cfg, std::size_t vocab_size);

/// (n_green - gamma L) / sqrt(L gamma (1 - gamma)).
double z_from_counts(std::size_t n_green, std::size_t length, double gamma);

} // namespace twinmark
