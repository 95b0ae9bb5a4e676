#include "twinmark/config.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>

namespace twinmark {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw Error(ErrorCode::Config, "config key '" + key + "': " + what);
}

/// Walks one JSON object, remembering which keys were consumed so leftovers
/// can be reported as unknown.
class Section {
public:
    Section(const ordered_json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

    const ordered_json* find(const std::string& name)
    {
        seen_.insert(name);
        auto it = j_.find(name);
        return it == j_.end() ? nullptr : &*it;
    }

    void real(const std::string& name, double& out, const std::function<bool(double)>& ok = {},
              const char* expect = nullptr)
    {
        const auto* v = find(name);
        if (!v) return;
        double x = 0.0;
        if (v->is_number()) {
            x = v->get<double>();
        } else if (v->is_string() && (*v == "inf" || *v == "-inf")) {
            x = *v == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        } else {
            bad(key(name), "expected a number (or \"inf\" / \"-inf\")");
        }
        if (ok && !ok(x)) bad(key(name), expect ? expect : "value out of range");
        out = x;
    }

    template <class Int>
    void integer(const std::string& name, Int& out, long long min_value = 0)
    {
        const auto* v = find(name);
        if (!v) return;
        if (!v->is_number_integer()) bad(key(name), "expected an integer");
        if (v->is_number_unsigned()) {
            const auto u = v->get<std::uint64_t>();
            if (min_value > 0 && u < static_cast<std::uint64_t>(min_value))
                bad(key(name), "must be >= " + std::to_string(min_value));
            out = static_cast<Int>(u);
        } else {
            const auto s = v->get<long long>();
            if (s < min_value) bad(key(name), "must be >= " + std::to_string(min_value));
            out = static_cast<Int>(s);
        }
    }

    void string(const std::string& name, std::string& out)
    {
        const auto* v = find(name);
        if (!v) return;
        if (!v->is_string()) bad(key(name), "expected a string");
        out = v->get<std::string>();
    }

    template <class Enum>
    void choice(const std::string& name, Enum& out, const std::function<Enum(const std::string&)>& parse)
    {
        std::string s;
        string(name, s);
        if (s.empty()) return;
        try {
            out = parse(s);
        } catch (const Error& e) {
            bad(key(name), e.what());
        }
    }

    void reals(const std::string& name, std::vector<double>& out)
    {
        const auto* v = find(name);
        if (!v) return;
        if (!v->is_array()) bad(key(name), "expected an array of numbers");
        std::vector<double> xs;
        for (const auto& e : *v) {
            if (e.is_number()) xs.push_back(e.get<double>());
            else if (e == "inf") xs.push_back(std::numeric_limits<double>::infinity());
            else if (e == "-inf") xs.push_back(-std::numeric_limits<double>::infinity());
            else bad(key(name), "expected an array of numbers");
        }
        out = std::move(xs);
    }

    void sizes(const std::string& name, std::vector<std::size_t>& out)
    {
        const auto* v = find(name);
        if (!v) return;
        if (!v->is_array()) bad(key(name), "expected an array of integers");
        std::vector<std::size_t> xs;
        for (const auto& e : *v) {
            if (!e.is_number_unsigned()) bad(key(name), "expected an array of non-negative integers");
            xs.push_back(e.get<std::size_t>());
        }
        out = std::move(xs);
    }

    template <class F>
    void object(const std::string& name, F&& body)
    {
        const auto* v = find(name);
        if (!v) return;
        Section sub(*v, key(name));
        body(sub);
        sub.finish();
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) bad(key(it.key()), "unknown key");
    }

private:
    const ordered_json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

bool in_open01(double x) { return x > 0.0 && x < 1.0; }
bool in_closed01(double x) { return x >= 0.0 && x <= 1.0; }
bool non_negative(double x) { return x >= 0.0 && !std::isnan(x); }
bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }
bool not_nan(double x) { return !std::isnan(x); }

void read_logits(Section& s, LogitsWatermarkConfig& c)
{
    s.choice<PartitionScheme>("scheme", c.scheme, [](const std::string& n) {
        if (n == "unigram") return PartitionScheme::Unigram;
        if (n == "kgw") return PartitionScheme::Kgw;
        throw Error(ErrorCode::Config, "unknown scheme '" + n + "' (unigram, kgw)");
    });
    s.integer("key", c.key);
    s.real("gamma", c.gamma, in_open01, "must lie in (0,1)");
    s.real("delta", c.delta, non_negative, "must be >= 0");
    s.integer("prefix_len", c.prefix_len, 1);
    s.real("z_threshold", c.z_threshold, not_nan, "must be a number");
}

void read_sampling(Section& s, SamplingWatermarkConfig& c)
{
    s.integer("key", c.key);
    s.integer("prefix_len", c.prefix_len, 1);
    s.real("p_threshold", c.p_threshold, in_open01, "must lie in (0,1)");
}

void read_entropy(Section& s, EntropyConfig& c)
{
    s.integer("top_k", c.top_k, 2);
    s.integer("n_clusters", c.n_clusters, 1);
    s.integer("kmeans_iters", c.kmeans_iters, 1);
    s.integer("kmeans_seed", c.kmeans_seed);
    s.real("alpha", c.alpha, not_nan, "must be a number");
    s.real("beta", c.beta, not_nan, "must be a number");
    if (c.n_clusters > c.top_k) bad(s.key("n_clusters"), "must not exceed top_k");
}

void read_watermark(Section& s, SymbioticConfig& c)
{
    s.choice<Strategy>("strategy", c.strategy, parse_strategy);
    s.object("logits", [&](Section& sub) { read_logits(sub, c.logits); });
    s.object("sampling", [&](Section& sub) { read_sampling(sub, c.sampling); });
    s.object("entropy", [&](Section& sub) { read_entropy(sub, c.entropy); });
    s.choice<OriginalSampler>("original_sampler", c.original_sampler, [](const std::string& n) {
        if (n == "multinomial") return OriginalSampler::Multinomial;
        if (n == "greedy") return OriginalSampler::Greedy;
        throw Error(ErrorCode::Config, "unknown sampler '" + n + "' (multinomial, greedy)");
    });
    s.integer("sampler_seed", c.sampler_seed);
    s.integer("max_tokens", c.max_tokens, 1);
}

void read_attack(Section& s, AttackConfig& c)
{
    s.choice<AttackKind>("kind", c.kind, parse_attack);
    s.real("ratio", c.ratio, in_closed01, "must lie in [0,1]");
    s.integer("segments", c.segments, 1);
    s.integer("seed", c.seed);
    if (c.kind == AttackKind::CopyPaste && c.ratio == 0.0) bad(s.key("ratio"), "copy_paste retain ratio must be > 0");
}

ordered_json real_json(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

ordered_json reals_json(const std::vector<double>& xs)
{
    ordered_json a = ordered_json::array();
    for (double x : xs) a.push_back(real_json(x));
    return a;
}

ordered_json watermark_json(const SymbioticConfig& c)
{
    return {
        {"strategy", strategy_name(c.strategy)},
        {"logits",
         {{"scheme", c.logits.scheme == PartitionScheme::Unigram ? "unigram" : "kgw"},
          {"key", c.logits.key},
          {"gamma", c.logits.gamma},
          {"delta", real_json(c.logits.delta)},
          {"prefix_len", c.logits.prefix_len},
          {"z_threshold", real_json(c.logits.z_threshold)}}},
        {"sampling",
         {{"key", c.sampling.key}, {"prefix_len", c.sampling.prefix_len}, {"p_threshold", c.sampling.p_threshold}}},
        {"entropy",
         {{"top_k", c.entropy.top_k},
          {"n_clusters", c.entropy.n_clusters},
          {"kmeans_iters", c.entropy.kmeans_iters},
          {"kmeans_seed", c.entropy.kmeans_seed},
          {"alpha", real_json(c.entropy.alpha)},
          {"beta", real_json(c.entropy.beta)}}},
        {"original_sampler", c.original_sampler == OriginalSampler::Greedy ? "greedy" : "multinomial"},
        {"sampler_seed", c.sampler_seed},
        {"max_tokens", c.max_tokens},
    };
}

ordered_json attack_json(const AttackConfig& a)
{
    return {{"kind", attack_name(a.kind)}, {"ratio", a.ratio}, {"segments", a.segments}, {"seed", a.seed}};
}

} // namespace

void ToolkitConfig::validate() const
{
    watermark.validate();
    attack.validate();
    stealing.validate();
    experiment.validate();
    require(judge.order >= 1, ErrorCode::Config, "config key 'judge.order': must be >= 1");
    require(judge.lambda > 0.0, ErrorCode::Config, "config key 'judge.lambda': must be > 0");
}

ToolkitConfig parse_config(std::string_view json_text, bool check_paths)
{
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
    }
    ToolkitConfig c;
    Section root(j, "");
    if (const auto* f = root.find("format"); f && *f != kConfigFormat)
        bad("format", "expected \"" + std::string(kConfigFormat) + "\"");
    if (const auto* v = root.find("version"); v && *v != kConfigFormatVersion)
        bad("version", "unsupported config version " + v->dump());
    root.find("tool_version"); // informational, written into resolved configs

    root.integer("seed", c.seed);
    root.object("paths", [&](Section& s) {
        s.string("model", c.paths.model);
        s.string("heldout", c.paths.heldout);
        s.string("judge_corpus", c.paths.judge_corpus);
    });
    root.object("synthetic", [&](Section& s) {
        auto& y = c.synthetic;
        s.integer("seed", y.seed);
        s.integer("concepts", y.concepts, 8);
        s.sizes("synset_sizes", y.synset_sizes);
        s.reals("synset_weights", y.synset_weights);
        s.sizes("branching", y.branching);
        s.reals("branching_weights", y.branching_weights);
        s.real("successor_skew", y.successor_skew, non_negative, "must be >= 0");
        s.real("synonym_skew", y.synonym_skew, non_negative, "must be >= 0");
        s.integer("sentence_length", y.sentence_length);
        if (y.synset_sizes.size() != y.synset_weights.size())
            bad(s.key("synset_weights"), "needs one weight per synset size");
        if (y.branching.size() != y.branching_weights.size())
            bad(s.key("branching_weights"), "needs one weight per branching factor");
    });
    root.object("training", [&](Section& s) {
        s.integer("order", c.training.order, 1);
        s.real("lambda", c.training.lambda, positive_finite, "must be > 0");
        s.integer("embedding_dim", c.training.embedding_dim, 1);
        s.integer("embedding_window", c.training.embedding_window, 1);
        s.integer("embedding_seed", c.training.embedding_seed);
    });
    root.object("watermark", [&](Section& s) { read_watermark(s, c.watermark); });
    root.object("attack", [&](Section& s) { read_attack(s, c.attack); });
    root.object("stealing", [&](Section& s) {
        s.integer("budget_tokens", c.stealing.budget_tokens, 1);
        s.real("top_fraction", c.stealing.top_fraction, in_open01, "must lie in (0,1)");
        s.real("spoof_strength", c.stealing.spoof_strength, non_negative, "must be >= 0");
        s.real("z_spoof_threshold", c.stealing.z_spoof_threshold, not_nan, "must be a number");
    });
    root.object("spoof", [&](Section& s) {
        s.integer("count", c.spoof.count, 1);
        s.integer("length", c.spoof.length, 1);
        s.integer("prompt_length", c.spoof.prompt_length);
    });
    root.object("experiment", [&](Section& s) {
        s.integer("n_pos", c.experiment.n_pos, 1);
        s.integer("n_neg", c.experiment.n_neg, 1);
        s.integer("length", c.experiment.length, 1);
        s.integer("prompt_length", c.experiment.prompt_length);
        if (const auto* a = s.find("attack"); a && !a->is_null()) {
            AttackConfig ac;
            Section sub(*a, s.key("attack"));
            read_attack(sub, ac);
            sub.finish();
            c.experiment.attack = ac;
        }
    });
    root.object("judge", [&](Section& s) {
        s.integer("order", c.judge.order, 1);
        s.real("lambda", c.judge.lambda, positive_finite, "must be > 0");
    });
    root.object("sweep", [&](Section& s) {
        s.reals("alphas", c.sweep.alphas);
        s.reals("betas", c.sweep.betas);
        if (c.sweep.alphas.empty()) bad(s.key("alphas"), "must not be empty");
        if (c.sweep.betas.empty()) bad(s.key("betas"), "must not be empty");
    });
    root.finish();

    c.experiment.watermark = c.watermark;
    c.experiment.seed = c.seed;
    c.validate();

    if (check_paths) {
        for (const auto& [name, path] : {std::pair{"paths.model", &c.paths.model}, {"paths.heldout", &c.paths.heldout},
                                         {"paths.judge_corpus", &c.paths.judge_corpus}}) {
            if (!path->empty() && !std::filesystem::exists(*path))
                throw Error(ErrorCode::Io, std::string("config key '") + name + "': file '" + *path + "' does not exist");
        }
    }
    return c;
}

std::string config_to_json(const ToolkitConfig& c)
{
    const auto& y = c.synthetic;
    ordered_json j = {
        {"format", kConfigFormat},
        {"version", kConfigFormatVersion},
        {"seed", c.seed},
        {"paths", {{"model", c.paths.model}, {"heldout", c.paths.heldout}, {"judge_corpus", c.paths.judge_corpus}}},
        {"synthetic",
         {{"seed", y.seed},
          {"concepts", y.concepts},
          {"synset_sizes", y.synset_sizes},
          {"synset_weights", reals_json(y.synset_weights)},
          {"branching", y.branching},
          {"branching_weights", reals_json(y.branching_weights)},
          {"successor_skew", y.successor_skew},
          {"synonym_skew", y.synonym_skew},
          {"sentence_length", y.sentence_length}}},
        {"training",
         {{"order", c.training.order},
          {"lambda", c.training.lambda},
          {"embedding_dim", c.training.embedding_dim},
          {"embedding_window", c.training.embedding_window},
          {"embedding_seed", c.training.embedding_seed}}},
        {"watermark", watermark_json(c.watermark)},
        {"attack", attack_json(c.attack)},
        {"stealing",
         {{"budget_tokens", c.stealing.budget_tokens},
          {"top_fraction", c.stealing.top_fraction},
          {"spoof_strength", c.stealing.spoof_strength},
          {"z_spoof_threshold", real_json(c.stealing.z_spoof_threshold)}}},
        {"spoof", {{"count", c.spoof.count}, {"length", c.spoof.length}, {"prompt_length", c.spoof.prompt_length}}},
        {"experiment",
         {{"n_pos", c.experiment.n_pos},
          {"n_neg", c.experiment.n_neg},
          {"length", c.experiment.length},
          {"prompt_length", c.experiment.prompt_length},
          {"attack", c.experiment.attack ? attack_json(*c.experiment.attack) : ordered_json(nullptr)}}},
        {"judge", {{"order", c.judge.order}, {"lambda", c.judge.lambda}}},
        {"sweep", {{"alphas", reals_json(c.sweep.alphas)}, {"betas", reals_json(c.sweep.betas)}}},
    };
    return j.dump(2) + "\n";
}

} // namespace twinmark
