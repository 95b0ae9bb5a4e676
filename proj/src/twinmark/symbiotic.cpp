#include "twinmark/symbiotic.hpp"

#include "twinmark/embeddings.hpp"
#include "twinmark/ngram.hpp"
#include "twinmark/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twinmark {

const char* strategy_name(Strategy s) noexcept
{
    switch (s) {
    case Strategy::Series: return "series";
    case Strategy::Parallel: return "parallel";
    case Strategy::Hybrid: return "hybrid";
    case Strategy::LogitsOnly: return "logits_only";
    case Strategy::SamplingOnly: return "sampling_only";
    case Strategy::None: return "none";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name)
{
    for (auto s : {Strategy::Series, Strategy::Parallel, Strategy::Hybrid, Strategy::LogitsOnly, Strategy::SamplingOnly,
                   Strategy::None})
        if (name == strategy_name(s)) return s;
    if (name == "serial") return Strategy::Series;
    throw Error(ErrorCode::Config, "unknown strategy '" + name + "'");
}

void SymbioticConfig::validate() const
{
    logits.validate();
    sampling.validate();
    if (strategy == Strategy::Hybrid) entropy.validate();
    require(max_tokens >= 1, ErrorCode::Config, "max_tokens must be >= 1");
}

std::vector<double> softmax(std::span<const double> logits)
{
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] = std::exp(logits[i] - mx));
    for (auto& v : p) v /= total;
    return p;
}

TokenId sample_original(std::span<const double> probs, OriginalSampler sampler, Rng& rng)
{
    if (sampler == OriginalSampler::Greedy)
        return static_cast<TokenId>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last = i;
        if (u < acc) return static_cast<TokenId>(i);
    }
    return static_cast<TokenId>(last);
}

SymbioticGenerator::SymbioticGenerator(const NGramModel& model, const EmbeddingTable* embeddings, SymbioticConfig cfg)
    : model_(model), cfg_(std::move(cfg))
{
    cfg_.validate();
    if (cfg_.strategy == Strategy::Hybrid) {
        require(embeddings != nullptr && !embeddings->empty(), ErrorCode::InvalidArgument,
                "hybrid generation needs an embedding table");
        meter_ = std::make_unique<EntropyMeter>(model_, *embeddings, cfg_.entropy);
    }
    if (cfg_.logits.scheme == PartitionScheme::Unigram) unigram_green_ = partition(cfg_.logits, model_.vocab_size(), {});
}

SymbioticGenerator::~SymbioticGenerator() = default;

Generation SymbioticGenerator::generate(TokenView prompt, std::uint64_t sampler_seed) const
{
    validate_sequence(prompt, model_.vocab_size());
    const std::size_t V = model_.vocab_size();
    Rng rng(sampler_seed);
    Generation out;
    out.trace.strategy = cfg_.strategy;
    TokenSequence ctx(prompt.begin(), prompt.end());
    ctx.reserve(prompt.size() + cfg_.max_tokens);

    for (std::size_t t = 0; t < cfg_.max_tokens; ++t) {
        const auto probs = model_.probabilities(ctx);
        TraceEntry e;
        e.position = t;
        switch (cfg_.strategy) {
        case Strategy::Series: e.applied_logits = e.applied_sampling = true; break;
        case Strategy::Parallel:
            e.applied_logits = t % 2 == 0;
            e.applied_sampling = !e.applied_logits;
            break;
        case Strategy::Hybrid: {
            const auto reading = meter_->read(ctx, probs);
            e.token_entropy = reading.token_entropy;
            e.semantic_entropy = reading.semantic_entropy;
            e.applied_logits = reading.apply_logits;
            e.applied_sampling = reading.apply_sampling;
            break;
        }
        case Strategy::LogitsOnly: e.applied_logits = true; break;
        case Strategy::SamplingOnly: e.applied_sampling = true; break;
        case Strategy::None: break;
        }

        std::vector<double> p;
        if (e.applied_logits) {
            std::vector<double> logits(V);
            for (std::size_t i = 0; i < V; ++i) logits[i] = std::log(probs[i]);
            const GreenList& green = cfg_.logits.scheme == PartitionScheme::Unigram
                                         ? unigram_green_
                                         : partition(cfg_.logits, V, ctx);
            p = softmax(apply_bias(logits, green, cfg_.logits.delta));
        } else {
            p = probs;
        }

        if (e.applied_sampling) {
            e.token = aar_sample(p, random_vector(cfg_.sampling, ctx, V));
        } else {
            e.token = sample_original(p, cfg_.original_sampler, rng);
        }
        ctx.push_back(e.token);
        out.tokens.push_back(e.token);
        out.trace.entries.push_back(e);
    }
    return out;
}

namespace {

Generation run_strategy(const NGramModel& model, const EmbeddingTable* emb, TokenView prompt, SymbioticConfig cfg,
                        Strategy s)
{
    cfg.strategy = s;
    return SymbioticGenerator(model, emb, std::move(cfg)).generate(prompt);
}

} // namespace

Generation generate_serial(const NGramModel& model, TokenView prompt, const SymbioticConfig& cfg)
{
    require(cfg.strategy == Strategy::Series, ErrorCode::Config, "config strategy is not series");
    return run_strategy(model, nullptr, prompt, cfg, Strategy::Series);
}

Generation generate_parallel(const NGramModel& model, TokenView prompt, const SymbioticConfig& cfg)
{
    require(cfg.strategy == Strategy::Parallel, ErrorCode::Config, "config strategy is not parallel");
    return run_strategy(model, nullptr, prompt, cfg, Strategy::Parallel);
}

Generation generate_hybrid(const NGramModel& model, const EmbeddingTable& embeddings, TokenView prompt,
                           const SymbioticConfig& cfg)
{
    require(cfg.strategy == Strategy::Hybrid, ErrorCode::Config, "config strategy is not hybrid");
    return run_strategy(model, &embeddings, prompt, cfg, Strategy::Hybrid);
}

double combined_score(const std::optional<LogitsFragment>& l, const std::optional<SamplingFragment>& s)
{
    double best = -std::numeric_limits<double>::infinity();
    if (l) best = std::max(best, l->z / l->z_threshold);
    if (s) {
        const double sampling = s->log_p_value / std::log(s->p_threshold);
        best = std::max(best, sampling);
    }
    return best;
}

double DetectionReport::combined_score() const { return twinmark::combined_score(logits, sampling); }

namespace {

template <class F>
auto named(const char* detector, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(detector) + " detector: " + e.what());
    }
}

} // namespace

DetectionReport detect_unified(TokenView tokens, const SymbioticConfig& cfg, std::size_t vocab_size)
{
    DetectionReport r;
    r.logits = named("logits", [&] { return detect_logits(tokens, cfg.logits, vocab_size); });
    r.sampling = named("sampling", [&] { return detect_sampling(tokens, cfg.sampling, vocab_size); });
    r.verdict = r.logits->verdict || r.sampling->verdict;
    return r;
}

TokenSequence TokenGroups::logits_tokens(TokenView tokens) const
{
    TokenSequence out;
    for (auto p : logits_positions) out.push_back(tokens[p]);
    return out;
}

TokenSequence TokenGroups::sampling_tokens(TokenView tokens) const
{
    TokenSequence out;
    for (auto p : sampling_positions) out.push_back(tokens[p]);
    return out;
}

TokenGroups group_tokens(TokenView tokens, const SymbioticConfig& cfg, const EntropyMeter* meter, TokenView prompt)
{
    TokenGroups g;
    switch (cfg.strategy) {
    case Strategy::Series:
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            g.logits_positions.push_back(i);
            g.sampling_positions.push_back(i);
        }
        break;
    case Strategy::Parallel:
        for (std::size_t i = 0; i < tokens.size(); ++i)
            (i % 2 == 0 ? g.logits_positions : g.sampling_positions).push_back(i);
        break;
    case Strategy::Hybrid: {
        require(meter != nullptr, ErrorCode::InvalidArgument, "hybrid grouping needs model access for entropies");
        TokenSequence ctx(prompt.begin(), prompt.end());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto reading = meter->read(ctx);
            if (reading.apply_logits) g.logits_positions.push_back(i);
            if (reading.apply_sampling) g.sampling_positions.push_back(i);
            ctx.push_back(tokens[i]);
        }
        break;
    }
    case Strategy::LogitsOnly:
        for (std::size_t i = 0; i < tokens.size(); ++i) g.logits_positions.push_back(i);
        break;
    case Strategy::SamplingOnly:
        for (std::size_t i = 0; i < tokens.size(); ++i) g.sampling_positions.push_back(i);
        break;
    case Strategy::None: break;
    }
    return g;
}

DetectionReport detect_grouped(TokenView tokens, const TokenGroups& groups, const SymbioticConfig& cfg,
                               std::size_t vocab_size)
{
    DetectionReport r;
    r.grouped = true;
    r.logits_group_size = groups.logits_positions.size();
    r.sampling_group_size = groups.sampling_positions.size();

    // A group with no scorable position is reported as not evaluated.
    auto scorable = [](const std::vector<std::size_t>& pos, std::size_t skip) {
        return std::any_of(pos.begin(), pos.end(), [&](std::size_t p) { return p >= skip; });
    };
    const std::size_t logits_skip =
        cfg.logits.scheme == PartitionScheme::Kgw ? static_cast<std::size_t>(cfg.logits.prefix_len) : 0;
    if (scorable(groups.logits_positions, logits_skip))
        r.logits = detect_logits(tokens, cfg.logits, vocab_size, groups.logits_positions);
    if (scorable(groups.sampling_positions, static_cast<std::size_t>(cfg.sampling.prefix_len)))
        r.sampling = detect_sampling(tokens, cfg.sampling, vocab_size, groups.sampling_positions);
    r.verdict = (r.logits && r.logits->verdict) || (r.sampling && r.sampling->verdict);
    return r;
}

} // namespace twinmark
