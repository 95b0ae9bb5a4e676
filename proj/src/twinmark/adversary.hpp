#pragma once

// Green-list stealing by token-frequency analysis, spoofing with the stolen
// list, and attack success rate against the true-key detector.

#include "twinmark/common.hpp"
#include "twinmark/logits_watermark.hpp"
#include "twinmark/symbiotic.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace twinmark {

class NGramModel;
class EmbeddingTable;

struct StealingConfig {
    std::size_t budget_tokens = 100000;
    double top_fraction = 0.25;
    double spoof_strength = 5.0;
    double z_spoof_threshold = 6.0;

    void validate() const;
    bool operator==(const StealingConfig&) const = default;
};

inline constexpr double kStealEpsilon = 1e-9;

/// Declares green the floor(gamma*|V|) tokens with the largest
/// observed/(base + eps) ratio; ties go to the lower id.
GreenList estimate_greenlist(TokenView wm_corpus, std::span<const double> base_freqs, double gamma);

/// |estimated ∩ truth| / |truth|.
double green_overlap(const GreenList& estimated, const GreenList& truth);

std::vector<TokenId> green_ids(const GreenList& g);
GreenList green_from_ids(std::span<const TokenId> ids, std::size_t vocab_size);

/// Multinomial sampling from the model with +strength on estimated-green
/// logits. strength 0 reproduces plain sampling with the same seed.
TokenSequence spoof_generate(const NGramModel& model, const GreenList& estimated, double strength, TokenView prompt,
                             std::size_t length, std::uint64_t seed);

/// Fraction of texts whose logits z-score exceeds `z_threshold`.
double attack_success_rate(std::span<const TokenSequence> spoofed, const LogitsWatermarkConfig& detector,
                           std::size_t vocab_size, double z_threshold);

/// Context-averaged model distribution over the training contexts: the
/// attacker's view of unwatermarked token frequencies.
std::vector<double> base_frequencies(const NGramModel& model);

/// Watermarked text the attacker observes: generations of `length` tokens
/// from successive prompts (cycled), truncated to exactly `budget` tokens.
TokenSequence collect_watermarked(const NGramModel& model, const EmbeddingTable* embeddings,
                                  const SymbioticConfig& cfg, std::span<const TokenSequence> prompts,
                                  std::size_t budget, std::uint64_t seed);

} // namespace twinmark
