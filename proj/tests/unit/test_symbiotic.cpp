#include "support.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/symbiotic.hpp"

#include <cmath>
#include <limits>

using namespace twinmark;
using namespace twinmark::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SymbioticConfig with_strategy(Strategy s)
{
    SymbioticConfig c;
    c.strategy = s;
    return c;
}

Generation run(const SymbioticConfig& cfg, TokenView prompt, std::uint64_t seed)
{
    const auto& lm = small_model();
    return SymbioticGenerator(lm.ngram, &lm.embeddings, cfg).generate(prompt, seed);
}

} // namespace

TEST_CASE("series applies both watermarks at every position and is deterministic")
{
    const auto cfg = with_strategy(Strategy::Series);
    const auto prompt = small_prompts(1)[0];
    const auto a = run(cfg, prompt, 1), b = run(cfg, prompt, 1);
    CHECK(a.tokens == b.tokens);
    REQUIRE(a.tokens.size() == cfg.max_tokens);
    for (const auto& e : a.trace.entries) {
        CHECK(e.applied_logits);
        CHECK(e.applied_sampling);
    }
}

TEST_CASE("series text is detected by both detectors")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Series);
    int both = 0;
    const auto prompts = small_prompts(200);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const auto r = detect_unified(run(cfg, prompts[i], i).tokens, cfg, lm.vocab.size());
        both += r.logits->verdict && r.sampling->verdict;
    }
    CHECK(both >= 190);
}

TEST_CASE("parallel alternates the watermarks")
{
    const auto cfg = with_strategy(Strategy::Parallel);
    const auto g = run(cfg, small_prompts(1)[0], 3);
    for (const auto& e : g.trace.entries) {
        CHECK(e.applied_logits == (e.position % 2 == 0));
        CHECK(e.applied_sampling == (e.position % 2 == 1));
    }
}

TEST_CASE("parallel with greedy sampling and a huge bias puts every even position in the green list")
{
    const auto& lm = small_model();
    auto cfg = with_strategy(Strategy::Parallel);
    cfg.original_sampler = OriginalSampler::Greedy;
    cfg.logits.delta = 50.0;
    const auto green = partition(cfg.logits, lm.vocab.size(), {});
    for (const auto& prompt : small_prompts(20)) {
        const auto g = run(cfg, prompt, 0);
        std::size_t even = 0, even_green = 0;
        for (std::size_t i = 0; i < g.tokens.size(); i += 2) {
            ++even;
            even_green += green.contains(g.tokens[i]);
        }
        CHECK(even_green == even);
    }
}

TEST_CASE("parallel text triggers at least one detector")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Parallel);
    int hits = 0;
    const auto prompts = small_prompts(200);
    for (std::size_t i = 0; i < prompts.size(); ++i) hits += detect_unified(run(cfg, prompts[i], i).tokens, cfg, lm.vocab.size()).verdict;
    CHECK(hits >= 190);
}

TEST_CASE("hybrid with open gates reproduces series exactly")
{
    auto hybrid = with_strategy(Strategy::Hybrid);
    hybrid.entropy.alpha = 0.0;
    hybrid.entropy.beta = kInf;
    const auto series = with_strategy(Strategy::Series);
    for (const auto& prompt : small_prompts(10)) {
        const auto h = run(hybrid, prompt, 5), s = run(series, prompt, 5);
        CHECK(h.tokens == s.tokens);
        for (std::size_t i = 0; i < h.trace.entries.size(); ++i) {
            CHECK(h.trace.entries[i].applied_logits == s.trace.entries[i].applied_logits);
            CHECK(h.trace.entries[i].applied_sampling == s.trace.entries[i].applied_sampling);
        }
    }
}

TEST_CASE("hybrid with closed gates is plain sampling")
{
    auto hybrid = with_strategy(Strategy::Hybrid);
    hybrid.entropy.alpha = kInf;
    hybrid.entropy.beta = -kInf;
    const auto none = with_strategy(Strategy::None);
    for (const auto& prompt : small_prompts(10)) {
        const auto h = run(hybrid, prompt, 9);
        CHECK(h.tokens == run(none, prompt, 9).tokens);
        for (const auto& e : h.trace.entries) {
            CHECK_FALSE(e.applied_logits);
            CHECK_FALSE(e.applied_sampling);
        }
    }
}

TEST_CASE("default hybrid gates produce all four token categories")
{
    const auto cfg = with_strategy(Strategy::Hybrid);
    const auto g = run(cfg, small_prompts(1)[0], 2);
    int seen[4] = {};
    for (const auto& e : g.trace.entries) ++seen[(e.applied_logits ? 2 : 0) + (e.applied_sampling ? 1 : 0)];
    for (int k = 0; k < 4; ++k) CHECK(seen[k] > 0);
}

TEST_CASE("natural text is not flagged")
{
    const auto& lm = small_model();
    const SymbioticConfig cfg;
    int flagged = 0;
    for (const auto& s : held_out_slices(small_heldout(), 200, 4, 200))
        flagged += detect_unified(s.natural, cfg, lm.vocab.size()).verdict;
    CHECK(flagged <= 2);
}

TEST_CASE("scrambling the sampling half of parallel text leaves the logits evidence untouched")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Parallel);
    REQUIRE(cfg.logits.scheme == PartitionScheme::Unigram); // membership ignores neighbours
    Rng rng(21);
    const auto prompts = small_prompts(50);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const auto clean = run(cfg, prompts[i], i).tokens;
        auto text = clean;
        for (std::size_t j = 1; j < text.size(); j += 2) text[j] = static_cast<TokenId>(rng.below(lm.vocab.size()));
        const auto before = detect_grouped(clean, group_tokens(clean, cfg, nullptr), cfg, lm.vocab.size());
        const auto after = detect_grouped(text, group_tokens(text, cfg, nullptr), cfg, lm.vocab.size());
        CHECK(after.logits->z == before.logits->z);
        CHECK(after.logits->verdict == before.logits->verdict);
        if (after.logits->verdict) CHECK(after.verdict);
    }
}

TEST_CASE("grouping by strategy")
{
    TokenSequence ten(10);
    for (std::size_t i = 0; i < ten.size(); ++i) ten[i] = static_cast<TokenId>(i);
    const auto s = group_tokens(ten, with_strategy(Strategy::Series), nullptr);
    CHECK(s.logits_tokens(ten) == ten);
    CHECK(s.sampling_tokens(ten) == ten);
    const auto p = group_tokens(ten, with_strategy(Strategy::Parallel), nullptr);
    CHECK(p.logits_tokens(ten) == TokenSequence{0, 2, 4, 6, 8});
    CHECK(p.sampling_tokens(ten) == TokenSequence{1, 3, 5, 7, 9});
}

TEST_CASE("hybrid grouping recovers the generation-time flags")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Hybrid);
    const SymbioticGenerator gen(lm.ngram, &lm.embeddings, cfg);
    for (const auto& prompt : small_prompts(5)) {
        const auto g = gen.generate(prompt, 4);
        const auto groups = group_tokens(g.tokens, cfg, gen.entropy_meter(), prompt);
        std::vector<std::size_t> lp, sp;
        for (const auto& e : g.trace.entries) {
            if (e.applied_logits) lp.push_back(e.position);
            if (e.applied_sampling) sp.push_back(e.position);
        }
        CHECK(groups.logits_positions == lp);
        CHECK(groups.sampling_positions == sp);
    }
}

TEST_CASE("grouped detection of parallel text scores the logits half higher")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Parallel);
    double grouped = 0.0, unified = 0.0;
    const auto prompts = small_prompts(200);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const auto text = run(cfg, prompts[i], i).tokens;
        grouped += detect_grouped(text, group_tokens(text, cfg, nullptr), cfg, lm.vocab.size()).logits->z;
        unified += detect_unified(text, cfg, lm.vocab.size()).logits->z;
    }
    CHECK(grouped >= unified);
}

TEST_CASE("empty sampling group leaves the verdict to the logits detector")
{
    const auto& lm = small_model();
    auto cfg = with_strategy(Strategy::Hybrid);
    cfg.entropy.alpha = 0.0;
    cfg.entropy.beta = -kInf;
    const SymbioticGenerator gen(lm.ngram, &lm.embeddings, cfg);
    const auto prompt = small_prompts(1)[0];
    const auto g = gen.generate(prompt, 0);
    const auto groups = group_tokens(g.tokens, cfg, gen.entropy_meter(), prompt);
    CHECK(groups.sampling_positions.empty());
    const auto r = detect_grouped(g.tokens, groups, cfg, lm.vocab.size());
    CHECK_FALSE(r.sampling.has_value());
    REQUIRE(r.logits.has_value());
    CHECK(r.verdict == r.logits->verdict);
}

TEST_CASE("series: grouped and unified verdicts agree")
{
    const auto& lm = small_model();
    const auto cfg = with_strategy(Strategy::Series);
    for (const auto& prompt : small_prompts(20)) {
        const auto text = run(cfg, prompt, 1).tokens;
        const auto g = detect_grouped(text, group_tokens(text, cfg, nullptr), cfg, lm.vocab.size());
        const auto u = detect_unified(text, cfg, lm.vocab.size());
        CHECK(g.verdict == u.verdict);
        CHECK(g.logits->z == u.logits->z);
    }
}

TEST_CASE("combined score crosses one exactly when a verdict fires")
{
    const auto& lm = small_model();
    const SymbioticConfig cfg;
    auto check = [&](TokenView t) {
        const auto r = detect_unified(t, cfg, lm.vocab.size());
        CHECK((r.combined_score() > 1.0) == r.verdict);
    };
    for (const auto& s : held_out_slices(small_heldout(), 30, 4, 200)) check(s.natural);
    for (const auto& p : small_prompts(30)) check(run(with_strategy(Strategy::Parallel), p, 0).tokens);

    LogitsFragment l;
    l.z = 6.0;
    l.z_threshold = 4.0;
    SamplingFragment s;
    s.log_p_value = std::log(1e-8);
    s.p_threshold = 1e-4;
    CHECK(combined_score(l, s) == doctest::Approx(2.0));
    CHECK(combined_score(l, std::nullopt) == doctest::Approx(1.5));
}
