// Acceptance run: one PASS/FAIL line per criterion, numbered 1 to 11.
// usage: acceptance [criterion ...]   (default: all)
// Exit status is nonzero when any selected criterion fails.

#include "../common/oracles.hpp"
#include "twinmark/adversary.hpp"
#include "twinmark/entropy.hpp"
#include "twinmark/experiment.hpp"
#include "twinmark/keyed_random.hpp"
#include "twinmark/language_model.hpp"
#include "twinmark/logits_watermark.hpp"
#include "twinmark/metrics.hpp"
#include "twinmark/sampling_watermark.hpp"
#include "twinmark/symbiotic.hpp"
#include "twinmark/synthetic_corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace twinmark;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pinned thresholds.
constexpr double kSerialF1 = 0.99, kSerialAuc = 0.995;
constexpr double kMixedF1 = 0.97, kMixedAuc = 0.98;
constexpr double kNullMean = 0.15, kNullStd = 0.15, kKsAlpha = 0.01, kMaxFpRate = 0.01;
constexpr std::size_t kNullSamples = 500;
constexpr std::size_t kLimitPrompts = 50;
constexpr double kRobustMargin = 0.01, kRobustFloor = 0.85, kMonotoneTol = 0.02;
constexpr double kAsrTol = 0.02;
constexpr double kEntropyTol = 1e-9;
constexpr std::size_t kEntropyCases = 1000, kMetricCases = 500, kMetricMaxSize = 20;
constexpr std::size_t kAarDraws = 100000, kAarVocab = 8;
constexpr double kAarTv = 0.02, kZTol = 1e-6;
constexpr double kPplTol = 0.01;

// Attacker protocol for the security criterion.
constexpr std::size_t kStealReplicates = 25, kSpoofsPerReplicate = 40;
constexpr std::size_t kBudgets[] = {1000, 10000, 100000};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Shared fixtures, built lazily.

struct MainWorld {
    SyntheticCorpusConfig language; // defaults: the mixed-entropy desk language
    LanguageModel model;
    TokenSequence heldout;
    TokenSequence null_text; // separate natural stream for calibration
    NGramModel judge;
};

const MainWorld& main_world()
{
    static const MainWorld w = [] {
        MainWorld m;
        TrainingOptions opts;
        opts.order = 2;
        opts.lambda = 1e-3;
        m.model = LanguageModel::train(synthesize_corpus(m.language, 1000000, 0), opts);
        m.heldout = m.model.vocab.encode(synthesize_corpus(m.language, 130000, 1), Vocabulary::Unknown::Skip);
        m.judge = train_judge(m.model, synthesize_corpus(m.language, 1000000, 2), 2, 0.01);
        m.null_text = m.model.vocab.encode(synthesize_corpus(m.language, 110000, 3), Vocabulary::Unknown::Skip);
        return m;
    }();
    return w;
}

ExperimentSpec main_spec(Strategy s)
{
    ExperimentSpec spec;
    spec.watermark.strategy = s;
    return spec; // 200 + 200 texts of T = 200
}

/// Clean runs with the perplexity judge, memoized per strategy.
const ExperimentResult& clean_run(Strategy s)
{
    static std::map<Strategy, ExperimentResult> cache;
    auto it = cache.find(s);
    if (it == cache.end()) {
        const auto& w = main_world();
        it = cache.emplace(s, run_experiment(w.model, w.heldout, main_spec(s), &w.judge)).first;
    }
    return it->second;
}

// ---------------------------------------------------------------------------

Outcome serial_detectability()
{
    const auto& w = main_world();
    const auto t0 = std::chrono::steady_clock::now();
    const auto& r = clean_run(Strategy::Series);
    const double secs = seconds_since(t0);
    const bool pass = w.model.vocab.size() >= 500 && r.best.f1 >= kSerialF1 && r.roc.auc >= kSerialAuc;
    return {pass, fmt("|V|=%zu best-F1=%.4f AUC=%.4f TPR=%.3f TNR=%.3f (%.1fs)", w.model.vocab.size(), r.best.f1,
                      r.roc.auc, r.at_verdict.tpr, r.at_verdict.tnr, secs)};
}

Outcome mixed_detectability()
{
    const auto& p = clean_run(Strategy::Parallel);
    const auto& h = clean_run(Strategy::Hybrid);
    const bool pass = p.best.f1 >= kMixedF1 && p.roc.auc >= kMixedAuc && h.best.f1 >= kMixedF1 && h.roc.auc >= kMixedAuc;
    return {pass, fmt("parallel best-F1=%.4f AUC=%.4f; hybrid best-F1=%.4f AUC=%.4f", p.best.f1, p.roc.auc, h.best.f1,
                      h.roc.auc)};
}

Outcome null_calibration()
{
    const auto& w = main_world();
    const SymbioticConfig cfg; // default keys, z1 = 4, p threshold 1e-4
    std::vector<double> zs, ps;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < kNullSamples; ++i) {
        const TokenView s = TokenView(w.null_text).subspan(i * 200, 200);
        const auto r = detect_unified(s, cfg, w.model.vocab.size());
        zs.push_back(r.logits->z);
        ps.push_back(r.sampling->p_value);
        flagged += r.verdict;
    }
    const auto ms = mean_std(zs);
    const auto ks = ks_uniform(ps);
    const double fpr = static_cast<double>(flagged) / static_cast<double>(kNullSamples);
    const bool pass = std::abs(ms.mean) < kNullMean && std::abs(ms.stddev - 1.0) < kNullStd && ks.p_value > kKsAlpha &&
                      fpr <= kMaxFpRate;
    return {pass, fmt("z mean=%.3f sd=%.3f; AAR KS p=%.3f; combined FPR=%.4f (N=%zu)", ms.mean, ms.stddev, ks.p_value,
                      fpr, kNullSamples)};
}

Outcome hybrid_limit()
{
    const auto& w = main_world();
    SymbioticConfig series;
    series.strategy = Strategy::Series;
    SymbioticConfig hybrid;
    hybrid.strategy = Strategy::Hybrid;
    hybrid.entropy.alpha = 0.0;
    hybrid.entropy.beta = kInf;
    const SymbioticGenerator gs(w.model.ngram, &w.model.embeddings, series);
    const SymbioticGenerator gh(w.model.ngram, &w.model.embeddings, hybrid);
    Rng rng(404);
    std::size_t identical = 0;
    for (std::size_t i = 0; i < kLimitPrompts; ++i) {
        TokenSequence prompt(4);
        for (auto& t : prompt) t = static_cast<TokenId>(rng.below(w.model.vocab.size()));
        identical += gs.generate(prompt, i).tokens == gh.generate(prompt, i).tokens;
    }
    return {identical == kLimitPrompts, fmt("%zu/%zu random prompts token-identical", identical, kLimitPrompts)};
}

Outcome robustness()
{
    const auto& w = main_world();
    struct Attack {
        AttackKind kind;
        double headline; // the gated setting
        const char* name;
    };
    const Attack attacks[] = {{AttackKind::WordDelete, 0.3, "word_delete"},
                              {AttackKind::WordSubRandom, 0.5, "word_sub_random"},
                              {AttackKind::CopyPaste, 0.2, "copy_paste"}};
    const Strategy strategies[] = {Strategy::Series, Strategy::Hybrid, Strategy::LogitsOnly};
    const double strengths[] = {0.0, 0.1, 0.3, 0.5};

    auto auc_for = [&](Strategy s, AttackKind k, double ratio) {
        if (ratio < 0.0) return clean_run(s).roc.auc;
        auto spec = main_spec(s);
        AttackConfig a;
        a.kind = k;
        a.ratio = ratio;
        a.segments = 3;
        spec.attack = a;
        return run_experiment(w.model, w.heldout, spec).roc.auc;
    };
    // Copy-paste strength is the share of the text that is not watermarked.
    auto ratio_at = [](AttackKind k, double strength) {
        if (strength == 0.0) return -1.0; // clean
        return k == AttackKind::CopyPaste ? 1.0 - strength : strength;
    };

    bool pass = true;
    std::ostringstream detail;
    for (const auto& a : attacks) {
        const double s = auc_for(Strategy::Series, a.kind, a.headline);
        const double h = auc_for(Strategy::Hybrid, a.kind, a.headline);
        const double u = auc_for(Strategy::LogitsOnly, a.kind, a.headline);
        const bool ok = s >= u - kRobustMargin && h >= u - kRobustMargin && s >= kRobustFloor && h >= kRobustFloor;
        pass &= ok;
        detail << fmt("%s(%.1f) series=%.4f hybrid=%.4f unigram=%.4f%s; ", a.name, a.headline, s, h, u,
                      ok ? "" : " [ordering/floor violated]");
    }
    for (const auto& a : attacks) {
        for (auto st : strategies) {
            std::vector<double> aucs;
            for (double x : strengths) aucs.push_back(auc_for(st, a.kind, ratio_at(a.kind, x)));
            bool mono = true;
            for (std::size_t i = 1; i < aucs.size(); ++i) mono &= aucs[i] <= aucs[i - 1] + kMonotoneTol;
            pass &= mono;
            if (!mono)
                detail << fmt("non-monotone %s/%s: %.4f %.4f %.4f %.4f; ", a.name, strategy_name(st), aucs[0], aucs[1],
                              aucs[2], aucs[3]);
        }
    }
    detail << "degradation over strengths {0, .1, .3, .5} "
           << (pass ? "monotone" : "checked") << " for all attacks and strategies";
    return {pass, detail.str()};
}

Outcome security_separation()
{
    // A near-deterministic language lets frequency analysis work at all.
    SyntheticCorpusConfig lang;
    lang.concepts = 140;
    lang.synset_sizes = {1};
    lang.synset_weights = {1.0};
    lang.branching = {8};
    lang.branching_weights = {1.0};
    lang.successor_skew = 2.4;
    TrainingOptions opts;
    opts.lambda = 1e-3;
    const auto lm = LanguageModel::train(synthesize_corpus(lang, 300000, 0), opts);
    const auto held = lm.vocab.encode(synthesize_corpus(lang, 130000, 1), Vocabulary::Unknown::Skip);
    std::vector<TokenSequence> prompts;
    for (auto& s : held_out_slices(held, 200, 4, 200)) prompts.push_back(s.prompt);

    LogitsWatermarkConfig target;
    target.gamma = 0.25;
    target.delta = 0.4;
    const auto base = base_frequencies(lm.ngram);
    const StealingConfig steal;

    auto asr_curve = [&](Strategy strategy) {
        SymbioticConfig cfg;
        cfg.strategy = strategy;
        cfg.logits = target;
        std::vector<double> out;
        for (std::size_t budget : kBudgets) {
            std::vector<TokenSequence> spoofed(kStealReplicates * kSpoofsPerReplicate);
            parallel_for(kStealReplicates, [&](std::size_t r) {
                const auto corpus =
                    collect_watermarked(lm.ngram, &lm.embeddings, cfg, prompts, budget, derive_seed(5, r));
                const auto est = estimate_greenlist(corpus, base, steal.top_fraction);
                for (std::size_t i = 0; i < kSpoofsPerReplicate; ++i)
                    spoofed[r * kSpoofsPerReplicate + i] =
                        spoof_generate(lm.ngram, est, steal.spoof_strength, prompts[(r * 37 + i) % prompts.size()],
                                       200, derive_seed(7, r * 1000 + i));
            });
            out.push_back(attack_success_rate(spoofed, target, lm.vocab.size(), steal.z_spoof_threshold));
        }
        return out;
    };
    const auto uni = asr_curve(Strategy::LogitsOnly);
    const auto hyb = asr_curve(Strategy::Hybrid);
    bool separated = true, monotone = true;
    for (std::size_t i = 0; i < uni.size(); ++i) {
        separated &= hyb[i] < uni[i];
        if (i > 0) monotone &= uni[i] >= uni[i - 1] - kAsrTol && hyb[i] >= hyb[i - 1] - kAsrTol;
    }
    return {separated && monotone,
            fmt("ASR at budgets 1e3/1e4/1e5: unigram %.3f/%.3f/%.3f, hybrid %.3f/%.3f/%.3f; separated=%s "
                "non-decreasing=%s",
                uni[0], uni[1], uni[2], hyb[0], hyb[1], hyb[2], separated ? "yes" : "no", monotone ? "yes" : "no")};
}

Outcome entropy_oracles()
{
    Rng rng(707);
    double worst_te = 0.0, worst_se = 0.0;
    std::size_t bound_violations = 0, coarse_violations = 0;
    for (std::size_t c = 0; c < kEntropyCases; ++c) {
        const std::size_t V = 4 + rng.below(61), dim = 2 + rng.below(7);
        std::vector<double> p(V);
        double total = 0.0;
        for (auto& x : p) {
            x = rng.uniform() < 0.15 ? 0.0 : -std::log(rng.uniform());
            total += x;
        }
        if (total == 0.0) p[0] = total = 1.0;
        for (auto& x : p) x /= total;
        std::vector<double> emb(V * dim);
        for (auto& x : emb) x = rng.uniform() - 0.5;
        const EmbeddingTable table(V, dim, emb);
        EntropyConfig cfg;
        cfg.top_k = 2 + rng.below(V - 1);
        cfg.n_clusters = 1 + rng.below(cfg.top_k);
        cfg.kmeans_seed = rng.next();

        worst_te = std::max(worst_te, std::abs(token_entropy(p) - oracle::entropy(p)));

        // Same candidates and labels, independently merged.
        const auto top = top_k_tokens(p, cfg.top_k);
        std::vector<double> cand;
        std::vector<std::vector<double>> pts;
        for (auto id : top) {
            cand.push_back(p[id]);
            auto v = table.vector(id);
            pts.emplace_back(v.begin(), v.end());
        }
        const auto clusters = kmeans(pts, cfg.n_clusters, cfg.kmeans_iters, cfg.kmeans_seed);
        const double se = semantic_entropy(p, table, cfg);
        worst_se = std::max(worst_se, std::abs(se - oracle::clustered_entropy(cand, clusters.labels)));
        bound_violations += se > std::log(static_cast<double>(cfg.n_clusters)) + 1e-12;

        // Merging never adds entropy, whatever the labels.
        std::vector<std::size_t> labels(V);
        const std::size_t k = 1 + rng.below(V);
        for (auto& l : labels) l = rng.below(k);
        coarse_violations += merged_entropy(p, labels) > oracle::entropy(p) + 1e-12;
    }
    const bool pass = worst_te <= kEntropyTol && worst_se <= kEntropyTol && bound_violations == 0 && coarse_violations == 0;
    return {pass, fmt("%zu cases: max |dH_TE|=%.2e max |dH_SE|=%.2e; ln n bound violations=%zu; coarse-graining "
                      "violations=%zu",
                      kEntropyCases, worst_te, worst_se, bound_violations, coarse_violations)};
}

Outcome metric_oracles()
{
    Rng rng(808);
    std::size_t auc_mismatch = 0, f1_mismatch = 0;
    for (std::size_t c = 0; c < kMetricCases; ++c) {
        const std::size_t n = 2 + rng.below(kMetricMaxSize - 1);
        const bool coarse = rng.uniform() < 0.5; // many ties
        std::vector<ScoredSample> s;
        for (std::size_t i = 0; i < n; ++i) {
            const auto label = i == 0 ? SampleLabel::Watermarked
                               : i == 1 ? SampleLabel::Natural
                                        : (rng.uniform() < 0.5 ? SampleLabel::Watermarked : SampleLabel::Natural);
            const double stat = coarse ? static_cast<double>(rng.below(5)) : 10.0 * rng.uniform() - 5.0;
            s.push_back({label, stat, false});
        }
        auc_mismatch += roc_auc(s).auc != oracle::pairwise_auc(s);
        const auto b = best_f1(s), o = oracle::enumerate_best_f1(s);
        f1_mismatch += b.f1 != o.f1 || b.threshold != o.threshold;
    }
    return {auc_mismatch == 0 && f1_mismatch == 0,
            fmt("%zu instances of size <= %zu: AUC mismatches=%zu, best-F1 mismatches=%zu", kMetricCases,
                kMetricMaxSize, auc_mismatch, f1_mismatch)};
}

Outcome aar_faithfulness()
{
    SamplingWatermarkConfig cfg;
    Rng rng(909);
    double worst_tv = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> p(kAarVocab);
        double total = 0.0;
        for (auto& x : p) total += (x = trial == 0 ? 1.0 : std::pow(rng.uniform(), 2.0 * trial));
        for (auto& x : p) x /= total;
        std::vector<double> freq(kAarVocab, 0.0);
        for (std::size_t d = 0; d < kAarDraws; ++d) {
            const TokenSequence ctx{static_cast<TokenId>(d), static_cast<TokenId>(d >> 16), static_cast<TokenId>(trial),
                                    0};
            freq[aar_sample(p, random_vector(cfg, ctx, kAarVocab))] += 1.0 / static_cast<double>(kAarDraws);
        }
        double tv = 0.0;
        for (std::size_t i = 0; i < kAarVocab; ++i) tv += 0.5 * std::abs(freq[i] - p[i]);
        worst_tv = std::max(worst_tv, tv);
    }
    // (|s|_G - gamma T) / sqrt(T gamma (1 - gamma)) by hand at gamma = 1/2, T = 200
    const double z150 = 50.0 / std::sqrt(50.0), z200 = 100.0 / std::sqrt(50.0);
    const double dz = std::max({std::abs(z_from_counts(150, 200, 0.5) - z150),
                                std::abs(z_from_counts(200, 200, 0.5) - z200),
                                std::abs(z_from_counts(100, 200, 0.5))});
    return {worst_tv <= kAarTv && dz <= kZTol,
            fmt("worst TV=%.4f over 3 targets x %zu draws (|V|=%zu); max z deviation=%.2e", worst_tv, kAarDraws,
                kAarVocab, dz)};
}

// ---------------------------------------------------------------------------
// CLI reproducibility.

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool sh(const std::string& cmd)
{
    return std::system((cmd + " >/dev/null 2>&1").c_str()) == 0;
}

/// Runs every subcommand into `dir`; false if any command fails.
bool cli_pipeline(const fs::path& dir, std::vector<std::string>& failed)
{
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = TWINMARK_CLI_PATH;
    const std::string d = dir.string();
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"seed": 21,
  "synthetic": {"concepts": 200, "synset_sizes": [1, 2], "synset_weights": [0.5, 0.5],
                "branching": [2, 6], "branching_weights": [0.5, 0.5]},
  "attack": {"kind": "word_sub_embed", "ratio": 0.3},
  "experiment": {"n_pos": 30, "n_neg": 30, "attack": {"kind": "word_delete", "ratio": 0.2}},
  "stealing": {"budget_tokens": 5000},
  "spoof": {"count": 10},
  "sweep": {"alphas": [0.5, 1.0], "betas": [0.5]}})";
        std::ofstream cp(dir / "cp.json");
        cp << R"({"seed": 21, "attack": {"kind": "copy_paste", "ratio": 0.2, "segments": 3}})";
    }
    const std::string base = cli + " --config " + d + "/cfg.json";
    const std::string with = base + " --model " + d + "/model.json --heldout " + d + "/held.txt --judge-corpus " + d +
                             "/judge.txt";
    const std::vector<std::pair<std::string, std::string>> steps{
        {"synth", base + " synth --tokens 60000 --stream 0 --out " + d + "/train.txt"},
        {"synth held-out", base + " synth --tokens 30000 --stream 1 --out " + d + "/held.txt"},
        {"synth judge", base + " synth --tokens 30000 --stream 2 --out " + d + "/judge.txt"},
        {"train", base + " train " + d + "/train.txt --out " + d + "/model.json"},
        {"generate", with + " generate --out " + d + "/gen.json"},
        {"detect", with + " detect " + d + "/gen.json --out " + d + "/det.json"},
        {"detect --grouped", with + " detect " + d + "/gen.json --grouped --out " + d + "/gdet.json"},
        {"attack", with + " attack " + d + "/gen.json --out " + d + "/att.json"},
        {"attack copy_paste", cli + " --config " + d + "/cp.json --model " + d + "/model.json --heldout " + d +
                                  "/held.txt attack " + d + "/gen.json --out " + d + "/cp_att.json"},
        {"steal", with + " steal --out " + d + "/green.json"},
        {"spoof", with + " spoof " + d + "/green.json --out " + d + "/spoof.json"},
        {"asr", with + " asr " + d + "/spoof.json --out " + d + "/asr.json"},
        {"eval", with + " eval --out " + d + "/eval.json"},
        {"sweep", with + " sweep --out " + d + "/sweep.json"},
    };
    bool ok = true;
    for (const auto& [name, cmd] : steps) {
        if (!sh(cmd)) {
            failed.push_back(name);
            ok = false;
        }
    }
    return ok;
}

Outcome cli_reproducibility()
{
    // Same directory both times: artifact provenance records the file paths.
    const fs::path root = fs::temp_directory_path() / fmt("twinmark-acceptance-%d", static_cast<int>(::getpid()));
    const fs::path run = root / "run", first = root / "first";
    std::vector<std::string> failed;
    bool ran = cli_pipeline(run, failed);
    fs::create_directories(first);
    for (const auto& e : fs::directory_iterator(run)) fs::copy(e.path(), first / e.path().filename());
    ran &= cli_pipeline(run, failed);
    std::size_t files = 0;
    std::vector<std::string> differ;
    for (const auto& e : fs::directory_iterator(first)) {
        ++files;
        const auto name = e.path().filename();
        if (!fs::exists(run / name) || slurp(e.path()) != slurp(run / name)) differ.push_back(name.string());
    }
    fs::remove_all(root);
    std::string detail = fmt("%zu output files byte-compared across two runs", files);
    for (const auto& f : failed) detail += "; command failed: " + f;
    for (const auto& f : differ) detail += "; differs: " + f;
    return {ran && differ.empty() && files == 18, detail}; // 2 configs + 16 outputs
}

Outcome quality_direction()
{
    const auto& s = clean_run(Strategy::Series);
    const auto& p = clean_run(Strategy::Parallel);
    const auto& h = clean_run(Strategy::Hybrid);
    const double ps = *s.mean_perplexity, pp = *p.mean_perplexity, ph = *h.mean_perplexity;
    const bool pass = pp <= ps * (1.0 + kPplTol) && ph <= ps * (1.0 + kPplTol);
    return {pass, fmt("judge PPL over 200 paired generations: series=%.3f parallel=%.3f hybrid=%.3f", ps, pp, ph)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"serial detectability", serial_detectability},
        {"parallel and hybrid detectability", mixed_detectability},
        {"null calibration", null_calibration},
        {"hybrid limit equals series", hybrid_limit},
        {"robustness ordering", robustness},
        {"security separation", security_separation},
        {"entropy oracles", entropy_oracles},
        {"metric oracles", metric_oracles},
        {"AAR faithfulness and z formula", aar_faithfulness},
        {"CLI reproducibility", cli_reproducibility},
        {"text-quality direction", quality_direction},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::strtoul(argv[i], nullptr, 10));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && !selected.count(i + 1)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %2zu: %s  %s: %s [%.0fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
