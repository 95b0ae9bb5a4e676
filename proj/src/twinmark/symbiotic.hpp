#pragma once

// Symbiotic generation: a green-list logits watermark and an AAR sampling
// watermark combined per token in series, in alternation (parallel), or gated
// by token and semantic entropy (hybrid). The baseline strategies (logits
// only, sampling only, none) share the same loop so every comparison runs
// through identical code.

#include "twinmark/common.hpp"
#include "twinmark/entropy.hpp"
#include "twinmark/keyed_random.hpp"
#include "twinmark/logits_watermark.hpp"
#include "twinmark/sampling_watermark.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace twinmark {

class NGramModel;
class EmbeddingTable;

enum class Strategy { Series, Parallel, Hybrid, LogitsOnly, SamplingOnly, None };
enum class OriginalSampler { Multinomial, Greedy };

const char* strategy_name(Strategy s) noexcept;
Strategy parse_strategy(const std::string& name);

struct SymbioticConfig {
    Strategy strategy = Strategy::Series;
    LogitsWatermarkConfig logits;
    SamplingWatermarkConfig sampling;
    EntropyConfig entropy;
    OriginalSampler original_sampler = OriginalSampler::Multinomial;
    std::uint64_t sampler_seed = 0;
    std::size_t max_tokens = 200;

    void validate() const;
    bool operator==(const SymbioticConfig&) const = default;
};

struct TraceEntry {
    TokenId token = 0;
    std::size_t position = 0; // generated-token index, from 0
    bool applied_logits = false;
    bool applied_sampling = false;
    std::optional<double> token_entropy;    // hybrid only
    std::optional<double> semantic_entropy; // hybrid only
};

struct GenerationTrace {
    Strategy strategy = Strategy::Series;
    std::vector<TraceEntry> entries;
};

struct Generation {
    TokenSequence tokens;
    GenerationTrace trace;
};

class SymbioticGenerator {
public:
    /// `embeddings` is required for the hybrid strategy only.
    SymbioticGenerator(const NGramModel& model, const EmbeddingTable* embeddings, SymbioticConfig cfg);
    ~SymbioticGenerator();
    SymbioticGenerator(const SymbioticGenerator&) = delete;
    SymbioticGenerator& operator=(const SymbioticGenerator&) = delete;

    Generation generate(TokenView prompt) const { return generate(prompt, cfg_.sampler_seed); }
    Generation generate(TokenView prompt, std::uint64_t sampler_seed) const;

    const SymbioticConfig& config() const noexcept { return cfg_; }
    const EntropyMeter* entropy_meter() const noexcept { return meter_.get(); }

private:
    const NGramModel& model_;
    SymbioticConfig cfg_;
    std::unique_ptr<EntropyMeter> meter_;
    GreenList unigram_green_;
};

Generation generate_serial(const NGramModel& model, TokenView prompt, const SymbioticConfig& cfg);
Generation generate_parallel(const NGramModel& model, TokenView prompt, const SymbioticConfig& cfg);
Generation generate_hybrid(const NGramModel& model, const EmbeddingTable& embeddings, TokenView prompt,
                           const SymbioticConfig& cfg);

/// Draws from `probs` with the original (non-watermark) sampler.
TokenId sample_original(std::span<const double> probs, OriginalSampler sampler, Rng& rng);

std::vector<double> softmax(std::span<const double> logits);

struct DetectionReport {
    std::optional<LogitsFragment> logits;     // absent: not evaluated
    std::optional<SamplingFragment> sampling; // absent: not evaluated
    bool verdict = false;                     // I_l || I_s
    bool grouped = false;
    std::size_t logits_group_size = 0;
    std::size_t sampling_group_size = 0;

    /// max(z / z1, ln(p) / ln(p_threshold)): both detectors in units of
    /// their own threshold, so one scalar orders texts for ROC analysis and
    /// exceeds 1 exactly when either verdict fires.
    double combined_score() const;
};

double combined_score(const std::optional<LogitsFragment>& l, const std::optional<SamplingFragment>& s);

/// Both detectors over the whole text; needs only the keys, never the
/// strategy or a trace.
DetectionReport detect_unified(TokenView tokens, const SymbioticConfig& cfg, std::size_t vocab_size);

/// Token positions attributed to each watermark. Detectors still read
/// contexts from the full text.
struct TokenGroups {
    std::vector<std::size_t> logits_positions;
    std::vector<std::size_t> sampling_positions;

    TokenSequence logits_tokens(TokenView tokens) const;
    TokenSequence sampling_tokens(TokenView tokens) const;
};

/// Series: every token in both groups. Parallel: even positions to logits, odd
/// to sampling. Hybrid: recomputes both entropies from the model over
/// `prompt` + text; `meter` is mandatory then.
TokenGroups group_tokens(TokenView tokens, const SymbioticConfig& cfg, const EntropyMeter* meter, TokenView prompt = {});

DetectionReport detect_grouped(TokenView tokens, const TokenGroups& groups, const SymbioticConfig& cfg,
                               std::size_t vocab_size);

} // namespace twinmark
