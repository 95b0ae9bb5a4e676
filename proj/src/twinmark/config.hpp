#pragma once

// Toolkit configuration: one JSON document covering every module. Unknown
// keys are rejected and every validation error names the offending key as a
// dotted path ("watermark.logits.gamma"). Non-finite reals are written and
// read as the strings "inf" and "-inf".

#include "twinmark/adversary.hpp"
#include "twinmark/attacks.hpp"
#include "twinmark/experiment.hpp"
#include "twinmark/language_model.hpp"
#include "twinmark/symbiotic.hpp"
#include "twinmark/synthetic_corpus.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace twinmark {

struct PathConfig {
    std::string model;        // trained model file
    std::string heldout;      // natural text for negatives and prompts
    std::string judge_corpus; // text the perplexity judge is trained on
    bool operator==(const PathConfig&) const = default;
};

struct JudgeConfig {
    int order = 2;
    double lambda = 0.01;
    bool operator==(const JudgeConfig&) const = default;
};

struct SpoofConfig {
    std::size_t count = 200;
    std::size_t length = 200;
    std::size_t prompt_length = 4;
    bool operator==(const SpoofConfig&) const = default;
};

struct SweepConfig {
    std::vector<double> alphas{0.0, 0.5, 1.0, 1.5};
    std::vector<double> betas{0.25, 0.5, 1.0};
    bool operator==(const SweepConfig&) const = default;
};

struct ToolkitConfig {
    std::uint64_t seed = 0;
    PathConfig paths;
    SyntheticCorpusConfig synthetic;
    TrainingOptions training;
    SymbioticConfig watermark;
    AttackConfig attack;
    StealingConfig stealing;
    SpoofConfig spoof;
    ExperimentSpec experiment; // its watermark and seed mirror the top level
    JudgeConfig judge;
    SweepConfig sweep;

    void validate() const;
};

inline constexpr const char* kConfigFormat = "twinmark-config";
inline constexpr int kConfigFormatVersion = 1;

/// Parses and validates; missing keys keep their defaults. When
/// `check_paths` is set, every non-empty entry of `paths` must exist.
ToolkitConfig parse_config(std::string_view json_text, bool check_paths = false);

/// Fully resolved config (every key present), ready to embed in artifacts.
std::string config_to_json(const ToolkitConfig& cfg);

} // namespace twinmark
