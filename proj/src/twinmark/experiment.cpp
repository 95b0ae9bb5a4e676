#include "twinmark/experiment.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/language_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace twinmark {

namespace {

constexpr std::uint64_t kGenerationSalt = 0x67656e;
constexpr std::uint64_t kAttackSalt = 0x61746b;

} // namespace

void ExperimentSpec::validate() const
{
    watermark.validate();
    require(n_pos >= 1 && n_neg >= 1, ErrorCode::Config, "n_pos and n_neg must be >= 1");
    require(length >= 1, ErrorCode::Config, "length must be >= 1");
    if (attack) attack->validate();
}

std::vector<HeldOutSlice> held_out_slices(TokenView heldout, std::size_t count, std::size_t prompt_length,
                                          std::size_t length)
{
    const std::size_t stride = prompt_length + length;
    require(heldout.size() / stride >= count, ErrorCode::CorpusTooShort,
            "held-out text has " + std::to_string(heldout.size()) + " tokens; " + std::to_string(count) +
                " slices of " + std::to_string(stride) + " need " + std::to_string(count * stride));
    std::vector<HeldOutSlice> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto base = heldout.begin() + static_cast<std::ptrdiff_t>(i * stride);
        out[i].prompt.assign(base, base + static_cast<std::ptrdiff_t>(prompt_length));
        out[i].natural.assign(base + static_cast<std::ptrdiff_t>(prompt_length), base + static_cast<std::ptrdiff_t>(stride));
    }
    return out;
}

CategoryCounts count_categories(const GenerationTrace& trace)
{
    CategoryCounts c{};
    for (const auto& e : trace.entries) ++c[(e.applied_logits ? 2 : 0) + (e.applied_sampling ? 1 : 0)];
    return c;
}

double strategy_statistic(const DetectionReport& report, Strategy strategy)
{
    switch (strategy) {
    case Strategy::LogitsOnly: return combined_score(report.logits, std::nullopt);
    case Strategy::SamplingOnly: return combined_score(std::nullopt, report.sampling);
    default: return report.combined_score();
    }
}

bool strategy_verdict(const DetectionReport& report, Strategy strategy)
{
    switch (strategy) {
    case Strategy::LogitsOnly: return report.logits && report.logits->verdict;
    case Strategy::SamplingOnly: return report.sampling && report.sampling->verdict;
    default: return report.verdict;
    }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

SampleRecord score_sample(TokenView tokens, const SymbioticConfig& cfg, std::size_t V, SampleLabel label,
                          std::size_t index)
{
    const auto report = detect_unified(tokens, cfg, V);
    SampleRecord r;
    r.index = index;
    r.label = label;
    r.length = tokens.size();
    if (report.logits) r.z = report.logits->z;
    if (report.sampling) r.p_value = report.sampling->p_value;
    r.statistic = strategy_statistic(report, cfg.strategy);
    r.verdict = strategy_verdict(report, cfg.strategy);
    return r;
}

} // namespace

ExperimentResult run_experiment(const LanguageModel& model, TokenView heldout, const ExperimentSpec& spec,
                                const NGramModel* judge)
{
    spec.validate();
    require(judge == nullptr || judge->vocab_size() == model.vocab.size(), ErrorCode::LengthMismatch,
            "judge model vocabulary does not match the generation model");
    const std::size_t V = model.vocab.size();
    const bool copy_paste = spec.attack && spec.attack->kind == AttackKind::CopyPaste;
    const std::size_t paired = std::max(spec.n_pos, spec.n_neg);
    const auto slices =
        held_out_slices(heldout, paired + (copy_paste ? spec.n_pos : 0), spec.prompt_length, spec.length);

    SymbioticConfig cfg = spec.watermark;
    cfg.max_tokens = spec.length;
    const SymbioticGenerator gen(model.ngram, &model.embeddings, cfg);

    std::vector<SampleRecord> positives(spec.n_pos);
    std::vector<CategoryCounts> categories(spec.n_pos);
    parallel_for(spec.n_pos, [&](std::size_t i) {
        const auto g = gen.generate(slices[i].prompt, derive_seed(spec.seed, i, kGenerationSalt));
        categories[i] = count_categories(g.trace);
        TokenSequence text = g.tokens;
        if (spec.attack) {
            AttackConfig a = *spec.attack;
            a.seed = derive_seed(spec.seed ^ a.seed, i, kAttackSalt);
            if (copy_paste) {
                // Host trimmed so the document keeps length T.
                const auto kept = static_cast<std::size_t>(std::floor(a.ratio * static_cast<double>(text.size())));
                const auto& host = slices[paired + i].natural;
                const TokenView trimmed = TokenView(host).first(host.size() - std::min(kept, host.size()));
                text = apply_attack(text, a, V, &model.embeddings, trimmed);
            } else {
                text = apply_attack(text, a, V, &model.embeddings);
            }
        }
        positives[i] = score_sample(text, cfg, V, SampleLabel::Watermarked, i);
        if (judge) positives[i].perplexity = perplexity(*judge, g.tokens, slices[i].prompt);
    });

    std::vector<SampleRecord> negatives(spec.n_neg);
    parallel_for(spec.n_neg, [&](std::size_t i) {
        negatives[i] = score_sample(slices[i].natural, cfg, V, SampleLabel::Natural, i);
    });

    ExperimentResult res;
    res.records = std::move(positives);
    res.records.insert(res.records.end(), negatives.begin(), negatives.end());
    for (const auto& c : categories)
        for (std::size_t k = 0; k < 4; ++k) res.categories[k] += c[k];

    std::vector<ScoredSample> samples;
    std::size_t tp = 0, tn = 0;
    for (const auto& r : res.records) {
        samples.push_back({r.label, r.statistic, r.verdict});
        if (r.label == SampleLabel::Watermarked && r.verdict) ++tp;
        if (r.label == SampleLabel::Natural && !r.verdict) ++tn;
    }
    const double fp = static_cast<double>(spec.n_neg - tn), fn = static_cast<double>(spec.n_pos - tp);
    res.at_verdict.tpr = static_cast<double>(tp) / static_cast<double>(spec.n_pos);
    res.at_verdict.tnr = static_cast<double>(tn) / static_cast<double>(spec.n_neg);
    res.at_verdict.f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / (2.0 * static_cast<double>(tp) + fp + fn);
    res.best = best_f1(samples);
    res.roc = roc_auc(samples);
    if (judge) {
        double sum = 0.0;
        for (std::size_t i = 0; i < spec.n_pos; ++i) sum += *res.records[i].perplexity;
        res.mean_perplexity = sum / static_cast<double>(spec.n_pos);
    }
    return res;
}

std::vector<SweepCell> sweep_thresholds(const LanguageModel& model, TokenView heldout, const ExperimentSpec& base,
                                        std::span<const double> alphas, std::span<const double> betas,
                                        const NGramModel* judge)
{
    require(base.watermark.strategy == Strategy::Hybrid, ErrorCode::Config, "threshold sweeps need the hybrid strategy");
    require(!alphas.empty() && !betas.empty(), ErrorCode::Config, "sweep grid is empty");
    std::vector<SweepCell> cells;
    for (double alpha : alphas) {
        for (double beta : betas) {
            ExperimentSpec spec = base;
            spec.watermark.entropy.alpha = alpha;
            spec.watermark.entropy.beta = beta;
            const auto r = run_experiment(model, heldout, spec, judge);
            cells.push_back({alpha, beta, r.best, r.roc.auc, r.mean_perplexity, r.categories});
        }
    }
    return cells;
}

NGramModel train_judge(const LanguageModel& model, std::string_view text, int order, double lambda)
{
    const auto ids = model.vocab.encode(text, Vocabulary::Unknown::Skip);
    return NGramModel::train(ids, model.vocab.size(), order, lambda);
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string records_csv(const ExperimentResult& result)
{
    std::string out = "index,label,length,z,p_value,statistic,verdict,perplexity\n";
    for (const auto& r : result.records) {
        out += std::to_string(r.index) + ',' + (r.label == SampleLabel::Watermarked ? "watermarked" : "natural") + ',' +
               std::to_string(r.length) + ',' + (r.z ? fmt(*r.z) : "") + ',' + (r.p_value ? fmt(*r.p_value) : "") +
               ',' + fmt(r.statistic) + ',' + (r.verdict ? "1" : "0") + ',' +
               (r.perplexity ? fmt(*r.perplexity) : "") + '\n';
    }
    return out;
}

} // namespace twinmark
