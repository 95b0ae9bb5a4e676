#include "twinmark/twinmark.h"

#include "twinmark/adversary.hpp"
#include "twinmark/config.hpp"
#include "twinmark/experiment.hpp"
#include "twinmark/keyed_random.hpp"
#include "twinmark/language_model.hpp"
#include "twinmark/synthetic_corpus.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>

using namespace twinmark;
using nlohmann::ordered_json;

struct tmk_config {
    ToolkitConfig cfg;
};

struct tmk_model {
    LanguageModel m;
};

namespace {

thread_local std::string g_last_error;

constexpr const char* kTextsFormat = "twinmark-texts";
constexpr const char* kDetectionFormat = "twinmark-detection";
constexpr const char* kGreenListFormat = "twinmark-greenlist";
constexpr const char* kAsrFormat = "twinmark-asr";
constexpr const char* kEvalFormat = "twinmark-eval";
constexpr const char* kSweepFormat = "twinmark-sweep";
constexpr int kDocumentVersion = 1;

constexpr std::uint64_t kGenerationSalt = 0x67656e; // matches run_experiment
constexpr std::uint64_t kAttackSalt = 0x61746b;     // matches run_experiment
constexpr std::uint64_t kStealSalt = 0x73746c;
constexpr std::uint64_t kSpoofSalt = 0x737066;

template <class F>
tmk_status guarded(F&& body)
{
    try {
        body();
        g_last_error.clear();
        return TMK_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<tmk_status>(static_cast<int>(e.code()));
    } catch (const ordered_json::exception& e) {
        g_last_error = std::string("malformed document: ") + e.what();
        return TMK_ERR_FORMAT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TMK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TMK_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return TMK_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void hand_out(char** out, const std::string& s)
{
    if (out) *out = dup_string(s);
}

ordered_json real(double x)
{
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

ordered_json provenance(const ToolkitConfig& c)
{
    return {{"tool_version", TWINMARK_VERSION}, {"seed", c.seed}, {"config", ordered_json::parse(config_to_json(c))}};
}

ordered_json document(const char* format, const ToolkitConfig& c)
{
    return {{"format", format}, {"version", kDocumentVersion}, {"provenance", provenance(c)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string csv_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV artifacts open with comment lines so they stay self-describing.
std::string csv_preamble(const ToolkitConfig& c)
{
    return std::string("# tool_version=") + TWINMARK_VERSION + " seed=" + std::to_string(c.seed) +
           "\n# config=" + ordered_json::parse(config_to_json(c)).dump() + "\n";
}

TokenSequence load_heldout(const LanguageModel& m, const ToolkitConfig& c, const char* command)
{
    require(!c.paths.heldout.empty(), ErrorCode::Config,
            std::string("config key 'paths.heldout': required by ") + command);
    return m.vocab.encode(read_text_file(c.paths.heldout), Vocabulary::Unknown::Skip);
}

std::optional<NGramModel> load_judge(const LanguageModel& m, const ToolkitConfig& c)
{
    if (c.paths.judge_corpus.empty()) return std::nullopt;
    return train_judge(m, read_text_file(c.paths.judge_corpus), c.judge.order, c.judge.lambda);
}

struct TextItem {
    TokenSequence prompt;
    TokenSequence tokens;
    std::optional<CategoryCounts> categories;
};

bool looks_like_json(std::string_view s)
{
    const auto pos = s.find_first_not_of(" \t\r\n");
    return pos != std::string_view::npos && s[pos] == '{';
}

std::vector<TextItem> parse_texts(const LanguageModel& m, std::string_view doc)
{
    const auto j = ordered_json::parse(doc);
    require(j.is_object() && j.value("format", "") == kTextsFormat, ErrorCode::Format, "not a twinmark texts document");
    require(j.at("version") == kDocumentVersion, ErrorCode::Format, "unsupported texts document version");
    std::vector<TextItem> items;
    for (const auto& t : j.at("texts")) {
        TextItem it;
        it.prompt = t.at("prompt_ids").get<TokenSequence>();
        it.tokens = t.at("ids").get<TokenSequence>();
        validate_sequence(it.prompt, m.vocab.size());
        validate_sequence(it.tokens, m.vocab.size());
        items.push_back(std::move(it));
    }
    return items;
}

/// A texts document, or plain text as a single item with an empty prompt.
std::vector<TextItem> read_input(const LanguageModel& m, std::string_view input, Vocabulary::Unknown unknown)
{
    if (looks_like_json(input)) return parse_texts(m, input);
    return {TextItem{{}, m.vocab.encode(input, unknown), std::nullopt}};
}

ordered_json categories_json(const CategoryCounts& c)
{
    return {{"none", c[static_cast<int>(TokenCategory::None)]},
            {"sampling_only", c[static_cast<int>(TokenCategory::SamplingOnly)]},
            {"logits_only", c[static_cast<int>(TokenCategory::LogitsOnly)]},
            {"symbiotic", c[static_cast<int>(TokenCategory::Symbiotic)]}};
}

std::string texts_document(const LanguageModel& m, const ToolkitConfig& c, const std::vector<TextItem>& items)
{
    auto j = document(kTextsFormat, c);
    ordered_json texts = ordered_json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        ordered_json t = {{"index", i},
                          {"prompt", m.vocab.decode(items[i].prompt)},
                          {"prompt_ids", items[i].prompt},
                          {"text", m.vocab.decode(items[i].tokens)},
                          {"ids", items[i].tokens}};
        if (items[i].categories) t["categories"] = categories_json(*items[i].categories);
        texts.push_back(std::move(t));
    }
    j["texts"] = std::move(texts);
    return dump(j);
}

std::vector<TokenSequence> heldout_prompts(const LanguageModel& m, const ToolkitConfig& c, std::size_t count,
                                           std::size_t prompt_length, std::size_t length, const char* command)
{
    const auto held = load_heldout(m, c, command);
    std::vector<TokenSequence> prompts;
    for (auto& s : held_out_slices(held, count, prompt_length, length)) prompts.push_back(std::move(s.prompt));
    return prompts;
}

ordered_json report_json(std::size_t index, const DetectionReport& r, Strategy strategy)
{
    ordered_json j = {{"index", index},
                      {"verdict", strategy_verdict(r, strategy)},
                      {"statistic", real(strategy_statistic(r, strategy))},
                      {"grouped", r.grouped}};
    if (r.logits)
        j["logits"] = {{"z", real(r.logits->z)},
                       {"n_green", r.logits->n_green},
                       {"scored", r.logits->scored},
                       {"z_threshold", real(r.logits->z_threshold)},
                       {"verdict", r.logits->verdict}};
    else
        j["logits"] = nullptr;
    if (r.sampling)
        j["sampling"] = {{"score", real(r.sampling->score)},
                         {"scored", r.sampling->scored},
                         {"p_value", real(r.sampling->p_value)},
                         {"log_p_value", real(r.sampling->log_p_value)},
                         {"p_threshold", r.sampling->p_threshold},
                         {"verdict", r.sampling->verdict}};
    else
        j["sampling"] = nullptr;
    if (r.grouped) {
        j["logits_group_size"] = r.logits_group_size;
        j["sampling_group_size"] = r.sampling_group_size;
    }
    return j;
}

} // namespace

extern "C" {

const char* tmk_version(void) { return TWINMARK_VERSION; }

const char* tmk_status_name(tmk_status status)
{
    if (status == TMK_OK) return "Ok";
    if (status == TMK_ERR_INTERNAL) return "Internal";
    if (status >= TMK_ERR_INVALID_ARGUMENT && status <= TMK_ERR_CONFIG)
        return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
    return "Unknown";
}

const char* tmk_last_error(void) { return g_last_error.c_str(); }

void tmk_string_free(char* s) { std::free(s); }

tmk_status tmk_config_parse(const char* json, int check_paths, tmk_config** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        auto c = std::make_unique<tmk_config>();
        c->cfg = parse_config(json ? json : "{}", check_paths != 0);
        *out = c.release();
    });
}

tmk_status tmk_config_set_seed(tmk_config* cfg, uint64_t seed)
{
    return guarded([&] {
        need(cfg, "cfg");
        cfg->cfg.seed = seed;
        cfg->cfg.experiment.seed = seed;
    });
}

namespace {

std::string& path_slot(PathConfig& p, const char* key)
{
    need(key, "key");
    const std::string k = key;
    if (k == "model") return p.model;
    if (k == "heldout") return p.heldout;
    if (k == "judge_corpus") return p.judge_corpus;
    throw Error(ErrorCode::Config, "config key 'paths." + k + "': unknown key");
}

} // namespace

tmk_status tmk_config_set_path(tmk_config* cfg, const char* key, const char* path)
{
    return guarded([&] {
        need(cfg, "cfg");
        need(path, "path");
        path_slot(cfg->cfg.paths, key) = path;
    });
}

tmk_status tmk_config_get_path(const tmk_config* cfg, const char* key, char** out)
{
    return guarded([&] {
        need(cfg, "cfg");
        need(out, "out");
        PathConfig copy = cfg->cfg.paths;
        *out = dup_string(path_slot(copy, key));
    });
}

tmk_status tmk_config_json(const tmk_config* cfg, char** out)
{
    return guarded([&] {
        need(cfg, "cfg");
        need(out, "out");
        *out = dup_string(config_to_json(cfg->cfg));
    });
}

void tmk_config_free(tmk_config* cfg) { delete cfg; }

tmk_status tmk_synthesize(const tmk_config* cfg, uint64_t tokens, uint64_t stream, char** out_text)
{
    return guarded([&] {
        need(cfg, "cfg");
        need(out_text, "out_text");
        *out_text = dup_string(synthesize_corpus(cfg->cfg.synthetic, tokens, stream));
    });
}

tmk_status tmk_model_train(const tmk_config* cfg, const char* corpus_text, tmk_model** out)
{
    return guarded([&] {
        need(cfg, "cfg");
        need(corpus_text, "corpus_text");
        need(out, "out");
        *out = nullptr;
        auto m = std::make_unique<tmk_model>();
        m->m = LanguageModel::train(corpus_text, cfg->cfg.training);
        *out = m.release();
    });
}

tmk_status tmk_model_load(const char* path, tmk_model** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        auto m = std::make_unique<tmk_model>();
        m->m = load_model(path);
        *out = m.release();
    });
}

tmk_status tmk_model_save(const tmk_model* model, const tmk_config* cfg, const char* path)
{
    return guarded([&] {
        need(model, "model");
        need(path, "path");
        save_model(model->m, path, cfg ? provenance(cfg->cfg).dump() : std::string());
    });
}

void tmk_model_free(tmk_model* model) { delete model; }

size_t tmk_model_vocab_size(const tmk_model* model) { return model ? model->m.vocab.size() : 0; }

tmk_status tmk_model_encode(const tmk_model* model, const char* text, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(text, "text");
        need(out_json, "out_json");
        *out_json = dup_string(ordered_json(model->m.vocab.encode(text)).dump());
    });
}

tmk_status tmk_generate(const tmk_model* model, const tmk_config* cfg, const char* prompt, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        std::vector<TokenSequence> prompts;
        if (prompt) prompts.push_back(m.vocab.encode(prompt));
        else
            prompts = heldout_prompts(m, c, c.experiment.n_pos, c.experiment.prompt_length, c.experiment.length,
                                      "generate");
        SymbioticConfig w = c.watermark;
        w.max_tokens = c.experiment.length;
        const SymbioticGenerator gen(m.ngram, &m.embeddings, w);
        std::vector<TextItem> items(prompts.size());
        parallel_for(prompts.size(), [&](std::size_t i) {
            auto g = gen.generate(prompts[i], derive_seed(c.seed, i, kGenerationSalt));
            items[i] = {prompts[i], std::move(g.tokens), count_categories(g.trace)};
        });
        *out_json = dup_string(texts_document(m, c, items));
    });
}

tmk_status tmk_detect(const tmk_model* model, const tmk_config* cfg, const char* input, int grouped, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(input, "input");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& w = cfg->cfg.watermark;
        const auto items = read_input(m, input, Vocabulary::Unknown::Reject);
        std::optional<SymbioticGenerator> gen;
        if (grouped) gen.emplace(m.ngram, &m.embeddings, w);
        std::vector<ordered_json> results(items.size());
        parallel_for(items.size(), [&](std::size_t i) {
            const auto& it = items[i];
            const auto report =
                grouped ? detect_grouped(it.tokens, group_tokens(it.tokens, w, gen->entropy_meter(), it.prompt), w,
                                         m.vocab.size())
                        : detect_unified(it.tokens, w, m.vocab.size());
            results[i] = report_json(i, report, w.strategy);
        });
        auto j = document(kDetectionFormat, cfg->cfg);
        j["strategy"] = strategy_name(w.strategy);
        j["results"] = results;
        *out_json = dup_string(dump(j));
    });
}

tmk_status tmk_attack(const tmk_model* model, const tmk_config* cfg, const char* texts_json, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(texts_json, "texts_json");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        auto items = parse_texts(m, texts_json);
        std::vector<HeldOutSlice> hosts;
        if (c.attack.kind == AttackKind::CopyPaste) {
            const auto held = load_heldout(m, c, "copy_paste attacks");
            hosts = held_out_slices(held, items.size(), c.experiment.prompt_length, c.experiment.length);
        }
        parallel_for(items.size(), [&](std::size_t i) {
            AttackConfig a = c.attack;
            a.seed = derive_seed(c.seed ^ a.seed, i, kAttackSalt);
            auto& text = items[i].tokens;
            if (!hosts.empty()) {
                const auto kept = static_cast<std::size_t>(std::floor(a.ratio * static_cast<double>(text.size())));
                const auto& host = hosts[i].natural;
                const TokenView trimmed = TokenView(host).first(host.size() - std::min(kept, host.size()));
                text = apply_attack(text, a, m.vocab.size(), &m.embeddings, trimmed);
            } else {
                text = apply_attack(text, a, m.vocab.size(), &m.embeddings);
            }
            items[i].categories.reset();
        });
        *out_json = dup_string(texts_document(m, c, items));
    });
}

tmk_status tmk_steal(const tmk_model* model, const tmk_config* cfg, const char* corpus, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        TokenSequence observed;
        if (corpus) {
            for (const auto& it : read_input(m, corpus, Vocabulary::Unknown::Skip))
                observed.insert(observed.end(), it.tokens.begin(), it.tokens.end());
        } else {
            const auto prompts = heldout_prompts(m, c, c.experiment.n_pos, c.experiment.prompt_length,
                                                 c.experiment.length, "steal without a corpus");
            SymbioticConfig w = c.watermark;
            w.max_tokens = c.experiment.length;
            observed = collect_watermarked(m.ngram, &m.embeddings, w, prompts, c.stealing.budget_tokens,
                                           derive_seed(c.seed, 0, kStealSalt));
        }
        const auto est = estimate_greenlist(observed, base_frequencies(m.ngram), c.stealing.top_fraction);
        auto j = document(kGreenListFormat, c);
        j["vocab_size"] = m.vocab.size();
        j["observed_tokens"] = observed.size();
        j["green_ids"] = green_ids(est);
        *out_json = dup_string(dump(j));
    });
}

tmk_status tmk_spoof(const tmk_model* model, const tmk_config* cfg, const char* greenlist_json, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(greenlist_json, "greenlist_json");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        const auto g = ordered_json::parse(greenlist_json);
        require(g.is_object() && g.value("format", "") == kGreenListFormat, ErrorCode::Format,
                "not a twinmark green-list document");
        require(g.at("vocab_size").get<std::size_t>() == m.vocab.size(), ErrorCode::LengthMismatch,
                "green list was estimated for a different vocabulary");
        const auto ids = g.at("green_ids").get<std::vector<TokenId>>();
        const auto est = green_from_ids(ids, m.vocab.size());
        const auto prompts =
            heldout_prompts(m, c, c.spoof.count, c.spoof.prompt_length, c.spoof.length, "spoof");
        std::vector<TextItem> items(prompts.size());
        parallel_for(prompts.size(), [&](std::size_t i) {
            items[i] = {prompts[i],
                        spoof_generate(m.ngram, est, c.stealing.spoof_strength, prompts[i], c.spoof.length,
                                       derive_seed(c.seed, i, kSpoofSalt)),
                        std::nullopt};
        });
        *out_json = dup_string(texts_document(m, c, items));
    });
}

tmk_status tmk_asr(const tmk_model* model, const tmk_config* cfg, const char* texts_json, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(texts_json, "texts_json");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        const auto items = parse_texts(m, texts_json);
        std::vector<TokenSequence> texts;
        ordered_json zs = ordered_json::array();
        for (const auto& it : items) {
            zs.push_back(real(detect_logits(it.tokens, c.watermark.logits, m.vocab.size()).z));
            texts.push_back(it.tokens);
        }
        auto j = document(kAsrFormat, c);
        j["z_threshold"] = real(c.stealing.z_spoof_threshold);
        j["count"] = texts.size();
        j["asr"] = attack_success_rate(texts, c.watermark.logits, m.vocab.size(), c.stealing.z_spoof_threshold);
        j["z"] = std::move(zs);
        *out_json = dup_string(dump(j));
    });
}

tmk_status tmk_eval(const tmk_model* model, const tmk_config* cfg, char** summary_json, char** records_csv_out,
                    char** roc_csv)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        const auto held = load_heldout(m, c, "eval");
        const auto judge = load_judge(m, c);
        ExperimentSpec spec = c.experiment;
        spec.watermark = c.watermark;
        spec.seed = c.seed;
        const auto r = run_experiment(m, held, spec, judge ? &*judge : nullptr);

        auto j = document(kEvalFormat, c);
        j["strategy"] = strategy_name(spec.watermark.strategy);
        j["n_pos"] = spec.n_pos;
        j["n_neg"] = spec.n_neg;
        j["length"] = spec.length;
        j["tpr"] = r.at_verdict.tpr;
        j["tnr"] = r.at_verdict.tnr;
        j["f1"] = r.at_verdict.f1;
        j["best_f1"] = r.best.f1;
        j["best_threshold"] = real(r.best.threshold);
        j["auc"] = r.roc.auc;
        j["mean_perplexity"] = r.mean_perplexity ? real(*r.mean_perplexity) : ordered_json(nullptr);
        j["categories"] = categories_json(r.categories);
        std::string roc = csv_preamble(c) + "fpr,tpr\n";
        for (const auto& p : r.roc.points) roc += csv_real(p.fpr) + ',' + csv_real(p.tpr) + '\n';
        hand_out(summary_json, dump(j));
        hand_out(records_csv_out, csv_preamble(c) + records_csv(r));
        hand_out(roc_csv, roc);
    });
}

tmk_status tmk_sweep(const tmk_model* model, const tmk_config* cfg, char** out_json)
{
    return guarded([&] {
        need(model, "model");
        need(cfg, "cfg");
        need(out_json, "out_json");
        const auto& m = model->m;
        const auto& c = cfg->cfg;
        const auto held = load_heldout(m, c, "sweep");
        const auto judge = load_judge(m, c);
        ExperimentSpec spec = c.experiment;
        spec.watermark = c.watermark;
        spec.watermark.strategy = Strategy::Hybrid; // the gates only exist in hybrid runs
        spec.seed = c.seed;
        const auto cells = sweep_thresholds(m, held, spec, c.sweep.alphas, c.sweep.betas, judge ? &*judge : nullptr);
        ordered_json out = ordered_json::array();
        for (const auto& cell : cells) {
            double total = 0.0;
            for (auto n : cell.categories) total += static_cast<double>(n);
            ordered_json ratios = ordered_json::object();
            const auto counts = categories_json(cell.categories);
            for (const auto& [name, count] : counts.items())
                ratios[name] = total > 0.0 ? count.get<double>() / total : 0.0;
            out.push_back({{"alpha", real(cell.alpha)},
                           {"beta", real(cell.beta)},
                           {"best_f1", cell.best.f1},
                           {"best_threshold", real(cell.best.threshold)},
                           {"auc", cell.auc},
                           {"mean_perplexity", cell.mean_perplexity ? real(*cell.mean_perplexity) : ordered_json(nullptr)},
                           {"category_ratios", std::move(ratios)}});
        }
        auto j = document(kSweepFormat, c);
        j["cells"] = std::move(out);
        *out_json = dup_string(dump(j));
    });
}

} // extern "C"
