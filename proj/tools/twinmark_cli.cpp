// twinmark command-line tool: a thin wrapper over the C API.

#include "twinmark/twinmark.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Failure {
    tmk_status status;
    std::string message;
};

void check(tmk_status s)
{
    if (s != TMK_OK) throw Failure{s, tmk_last_error()};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{TMK_ERR_IO, "cannot open '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{TMK_ERR_IO, "cannot write '" + path + "'"};
    out << text;
    if (!out) throw Failure{TMK_ERR_IO, "write failed for '" + path + "'"};
}

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { tmk_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using ConfigPtr = std::unique_ptr<tmk_config, decltype(&tmk_config_free)>;
using ModelPtr = std::unique_ptr<tmk_model, decltype(&tmk_model_free)>;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string model;
    std::string heldout;
    std::string judge_corpus;
};

/// Paths are checked only for commands that read them; synth and train
/// produce the files the other commands consume.
ConfigPtr resolve_config(const Globals& g, bool check_paths)
{
    const std::string text = g.config_path.empty() ? "{}" : read_file(g.config_path);
    tmk_config* raw = nullptr;
    check(tmk_config_parse(text.c_str(), 0, &raw));
    ConfigPtr cfg(raw, tmk_config_free);
    if (g.seed) check(tmk_config_set_seed(cfg.get(), *g.seed));
    if (!g.model.empty()) check(tmk_config_set_path(cfg.get(), "model", g.model.c_str()));
    if (!g.heldout.empty()) check(tmk_config_set_path(cfg.get(), "heldout", g.heldout.c_str()));
    if (!g.judge_corpus.empty()) check(tmk_config_set_path(cfg.get(), "judge_corpus", g.judge_corpus.c_str()));
    // Reparse with overrides applied so path existence is checked once, on the final values.
    OwnedString json;
    check(tmk_config_json(cfg.get(), &json.p));
    tmk_config* checked = nullptr;
    check(tmk_config_parse(json.p, check_paths ? 1 : 0, &checked));
    return ConfigPtr(checked, tmk_config_free);
}

ModelPtr load_model(const tmk_config* cfg)
{
    OwnedString path;
    check(tmk_config_get_path(cfg, "model", &path.p));
    if (path.str().empty()) throw Failure{TMK_ERR_CONFIG, "config key 'paths.model': required (or pass --model)"};
    tmk_model* raw = nullptr;
    check(tmk_model_load(path.p, &raw));
    return ModelPtr(raw, tmk_model_free);
}

void emit(const Globals& g, const std::string& text)
{
    if (g.out.empty()) std::cout << text;
    else write_file(g.out, text);
}

std::string sibling(const std::string& out, const std::string& suffix)
{
    std::filesystem::path p(out);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"twinmark: symbiotic text watermarking toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand
    app.set_version_flag("--version", std::string(tmk_version()));

    Globals g;
    app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "master seed (overrides the config)");
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--model", g.model, "model file (overrides paths.model)");
    app.add_option("--heldout", g.heldout, "held-out text (overrides paths.heldout)");
    app.add_option("--judge-corpus", g.judge_corpus, "judge training text (overrides paths.judge_corpus)");

    std::uint64_t synth_tokens = 100000, synth_stream = 0;
    auto* synth = app.add_subcommand("synth", "write synthetic corpus text");
    synth->add_option("--tokens", synth_tokens, "corpus length in tokens");
    synth->add_option("--stream", synth_stream, "independent stream index (0 train, 1 held-out, 2 judge)");

    std::string corpus_path;
    auto* train = app.add_subcommand("train", "train a model on a text corpus");
    train->add_option("corpus", corpus_path, "training text")->required();

    std::optional<std::string> prompt;
    auto* generate = app.add_subcommand("generate", "watermarked generations");
    generate->add_option("--prompt", prompt, "single prompt (default: held-out prompts)");

    std::string input_path;
    bool grouped = false;
    auto* detect = app.add_subcommand("detect", "detect watermarks in a texts document or plain text");
    detect->add_option("input", input_path, "texts document or plain text file")->required();
    detect->add_flag("--grouped", grouped, "score each detector on its own token group");

    auto* attack = app.add_subcommand("attack", "apply the configured attack to a texts document");
    attack->add_option("input", input_path, "texts document")->required();

    std::string steal_corpus;
    auto* steal = app.add_subcommand("steal", "estimate the green list by frequency analysis");
    steal->add_option("corpus", steal_corpus, "observed watermarked text (default: generate the budget)");

    auto* spoof = app.add_subcommand("spoof", "generate text biased toward an estimated green list");
    spoof->add_option("greenlist", input_path, "green-list document")->required();

    auto* asr = app.add_subcommand("asr", "attack success rate of spoofed texts");
    asr->add_option("input", input_path, "texts document")->required();

    auto* eval = app.add_subcommand("eval", "detection experiment (summary JSON, records and ROC CSV)");
    auto* sweep = app.add_subcommand("sweep", "hybrid entropy-threshold sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = resolve_config(g, !*synth && !*train);
        if (*synth) {
            OwnedString text;
            check(tmk_synthesize(cfg.get(), synth_tokens, synth_stream, &text.p));
            emit(g, text.str());
        } else if (*train) {
            OwnedString model_path;
            check(tmk_config_get_path(cfg.get(), "model", &model_path.p));
            const std::string dest = g.out.empty() ? model_path.str() : g.out;
            if (dest.empty()) throw Failure{TMK_ERR_INVALID_ARGUMENT, "train needs --out or paths.model"};
            const auto corpus = read_file(corpus_path);
            tmk_model* raw = nullptr;
            check(tmk_model_train(cfg.get(), corpus.c_str(), &raw));
            ModelPtr model(raw, tmk_model_free);
            check(tmk_model_save(model.get(), cfg.get(), dest.c_str()));
        } else if (*eval) {
            const auto model = load_model(cfg.get());
            OwnedString summary, records, roc;
            check(tmk_eval(model.get(), cfg.get(), &summary.p, g.out.empty() ? nullptr : &records.p,
                           g.out.empty() ? nullptr : &roc.p));
            emit(g, summary.str());
            if (!g.out.empty()) {
                write_file(sibling(g.out, ".records.csv"), records.str());
                write_file(sibling(g.out, ".roc.csv"), roc.str());
            }
        } else {
            const auto model = load_model(cfg.get());
            OwnedString result;
            if (*generate) {
                check(tmk_generate(model.get(), cfg.get(), prompt ? prompt->c_str() : nullptr, &result.p));
            } else if (*detect) {
                check(tmk_detect(model.get(), cfg.get(), read_file(input_path).c_str(), grouped ? 1 : 0, &result.p));
            } else if (*attack) {
                check(tmk_attack(model.get(), cfg.get(), read_file(input_path).c_str(), &result.p));
            } else if (*steal) {
                const auto corpus = steal_corpus.empty() ? std::string() : read_file(steal_corpus);
                check(tmk_steal(model.get(), cfg.get(), steal_corpus.empty() ? nullptr : corpus.c_str(), &result.p));
            } else if (*spoof) {
                check(tmk_spoof(model.get(), cfg.get(), read_file(input_path).c_str(), &result.p));
            } else if (*asr) {
                check(tmk_asr(model.get(), cfg.get(), read_file(input_path).c_str(), &result.p));
            } else if (*sweep) {
                check(tmk_sweep(model.get(), cfg.get(), &result.p));
            }
            emit(g, result.str());
        }
    } catch (const Failure& f) {
        std::cerr << "twinmark: error [" << tmk_status_name(f.status) << "]: " << f.message << "\n";
        return 1;
    }
    return 0;
}
