#pragma once

// End-to-end detection experiments: watermarked generations against held-out
// natural slices, optional attacks on the positives, metrics, and threshold
// sweeps over the hybrid entropy gates.

#include "twinmark/attacks.hpp"
#include "twinmark/common.hpp"
#include "twinmark/metrics.hpp"
#include "twinmark/symbiotic.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twinmark {

struct LanguageModel;
class NGramModel;

struct ExperimentSpec {
    SymbioticConfig watermark;
    std::size_t n_pos = 200;
    std::size_t n_neg = 200;
    std::size_t length = 200;     // T
    std::size_t prompt_length = 4;
    std::optional<AttackConfig> attack; // applied to positives only
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

/// Slice i of the held-out text: prompt_length prompt tokens followed by
/// `length` natural tokens. Positive i is generated from prompt i, negative i
/// is the natural continuation.
struct HeldOutSlice {
    TokenSequence prompt;
    TokenSequence natural;
};

std::vector<HeldOutSlice> held_out_slices(TokenView heldout, std::size_t count, std::size_t prompt_length,
                                          std::size_t length);

enum class TokenCategory { None, SamplingOnly, LogitsOnly, Symbiotic };

/// Per-category counts indexed by TokenCategory.
using CategoryCounts = std::array<std::size_t, 4>;

CategoryCounts count_categories(const GenerationTrace& trace);

struct SampleRecord {
    std::size_t index = 0;
    SampleLabel label = SampleLabel::Natural;
    std::size_t length = 0;
    std::optional<double> z;
    std::optional<double> p_value;
    double statistic = 0.0;
    bool verdict = false;
    std::optional<double> perplexity; // positives, when a judge is given
};

struct ExperimentResult {
    std::vector<SampleRecord> records;
    ConfusionMetrics at_verdict; // TPR/TNR/F1 of the detector's own verdicts
    BestF1 best;
    RocCurve roc;
    std::optional<double> mean_perplexity;
    CategoryCounts categories{};
};

/// The scalar a strategy is scored by: the logits-only and sampling-only
/// baselines use their own detector, everything else the combined score.
double strategy_statistic(const DetectionReport& report, Strategy strategy);
bool strategy_verdict(const DetectionReport& report, Strategy strategy);

/// `judge` (optional) scores positives' perplexity given their prompt; it must
/// share the model's vocabulary.
ExperimentResult run_experiment(const LanguageModel& model, TokenView heldout, const ExperimentSpec& spec,
                                const NGramModel* judge = nullptr);

struct SweepCell {
    double alpha = 0.0;
    double beta = 0.0;
    BestF1 best;
    double auc = 0.0;
    std::optional<double> mean_perplexity;
    CategoryCounts categories{};
};

/// Hybrid runs over the alpha x beta grid, row-major in alpha.
std::vector<SweepCell> sweep_thresholds(const LanguageModel& model, TokenView heldout, const ExperimentSpec& base,
                                        std::span<const double> alphas, std::span<const double> betas,
                                        const NGramModel* judge = nullptr);

/// N-gram model over `text` indexed by the model's vocabulary (unknown words
/// dropped), for judging generations with a model that never saw them.
NGramModel train_judge(const LanguageModel& model, std::string_view text, int order, double lambda);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). Results must be written by index; the first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

std::string records_csv(const ExperimentResult& result);

} // namespace twinmark
