#include "support.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/logits_watermark.hpp"
#include "twinmark/symbiotic.hpp"

#include <cmath>

using namespace twinmark;
using namespace twinmark::testing;

namespace {

/// A sequence of `length` tokens with exactly `n_green` green ones under a
/// unigram partition.
TokenSequence with_green_count(const GreenList& g, std::size_t length, std::size_t n_green)
{
    TokenId green = 0, red = 0;
    while (!g.contains(green)) ++green;
    while (g.contains(red)) ++red;
    TokenSequence t(length, red);
    for (std::size_t i = 0; i < n_green; ++i) t[i] = green;
    return t;
}

} // namespace

TEST_CASE("unigram partition ignores the context")
{
    LogitsWatermarkConfig cfg;
    const auto a = partition(cfg, 100, TokenSequence{1, 2, 3});
    const auto b = partition(cfg, 100, TokenSequence{7});
    CHECK(a.membership == b.membership);
    CHECK(a.membership == partition(cfg, 100, {}).membership);
}

TEST_CASE("green list has floor(gamma |V|) members")
{
    LogitsWatermarkConfig cfg;
    cfg.gamma = 0.5;
    const auto g = partition(cfg, 100, {});
    CHECK(g.green_count == 50);
    CHECK(std::count(g.membership.begin(), g.membership.end(), true) == 50);
    cfg.gamma = 0.25;
    CHECK(partition(cfg, 201, {}).green_count == 50);
}

TEST_CASE("kgw partition depends on the last context token")
{
    auto cfg = LogitsWatermarkConfig::kgw_preset();
    Rng rng(3);
    int changed = 0;
    for (int i = 0; i < 100; ++i) {
        const auto a = static_cast<TokenId>(rng.below(500));
        TokenId b = static_cast<TokenId>(rng.below(500));
        if (b == a) b = (a + 1) % 500;
        changed += partition(cfg, 500, TokenSequence{a}).membership != partition(cfg, 500, TokenSequence{b}).membership;
    }
    CHECK(changed >= 99);
}

TEST_CASE("zero bias is the identity")
{
    const std::vector<double> logits{-1.0, 0.5, 2.0, -3.0};
    LogitsWatermarkConfig cfg;
    CHECK(apply_bias(logits, partition(cfg, 4, {}), 0.0) == logits);
}

TEST_CASE("biased softmax over four flat logits")
{
    LogitsWatermarkConfig cfg;
    cfg.gamma = 0.5;
    const auto g = partition(cfg, 4, {});
    const auto p = softmax(apply_bias(std::vector<double>(4, 0.0), g, 2.0));
    const double e2 = std::exp(2.0);
    const double expected_green = e2 / (2.0 * e2 + 2.0); // 0.44039...
    for (TokenId i = 0; i < 4; ++i) {
        if (g.contains(i)) CHECK(p[i] == doctest::Approx(expected_green).epsilon(1e-12));
        else CHECK(p[i] == doctest::Approx(1.0 / (2.0 * e2 + 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("red-token probabilities strictly decrease under a positive bias")
{
    const auto& lm = small_model();
    LogitsWatermarkConfig cfg;
    const auto g = partition(cfg, lm.vocab.size(), {});
    const auto logits = lm.ngram.logits(TokenView(small_heldout()).first(2));
    const auto before = softmax(logits);
    const auto after = softmax(apply_bias(logits, g, 1.0));
    for (TokenId i = 0; i < before.size(); ++i)
        if (!g.contains(i)) CHECK(after[i] < before[i]);
}

TEST_CASE("z-score examples")
{
    CHECK(z_from_counts(100, 200, 0.5) == doctest::Approx(0.0));
    CHECK(std::abs(z_from_counts(150, 200, 0.5) - 7.0710678118654755) < 1e-6);
    CHECK(std::abs(z_from_counts(200, 200, 0.5) - 14.142135623730951) < 1e-6);

    LogitsWatermarkConfig cfg;
    const auto g = partition(cfg, 100, {});
    const auto f = detect_logits(with_green_count(g, 200, 150), cfg, 100);
    CHECK(f.n_green == 150);
    CHECK(f.scored == 200);
    CHECK(std::abs(f.z - 50.0 / std::sqrt(50.0)) < 1e-6);
    CHECK(f.verdict);
    CHECK(std::abs(z_score(with_green_count(g, 200, 200), cfg, 100) - 100.0 / std::sqrt(50.0)) < 1e-6);
}

TEST_CASE("verdict needs z strictly above the threshold")
{
    LogitsWatermarkConfig cfg;
    const auto g = partition(cfg, 100, {});
    const auto text = with_green_count(g, 200, 150);
    cfg.z_threshold = z_from_counts(150, 200, 0.5);
    CHECK_FALSE(detect_logits(text, cfg, 100).verdict);
    cfg.z_threshold = std::nextafter(cfg.z_threshold, 0.0);
    CHECK(detect_logits(text, cfg, 100).verdict);
}

TEST_CASE("kgw scores positions from the prefix length on")
{
    auto cfg = LogitsWatermarkConfig::kgw_preset();
    cfg.prefix_len = 2;
    TokenSequence t(50);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<TokenId>(i * 7 % 90);
    CHECK(detect_logits(t, cfg, 90).scored == 48);
}

TEST_CASE("unwatermarked model text rarely crosses z = 4")
{
    const auto& lm = small_model();
    SymbioticConfig cfg;
    cfg.strategy = Strategy::None;
    const SymbioticGenerator gen(lm.ngram, nullptr, cfg);
    const auto prompts = small_prompts(200);
    int positives = 0;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const auto text = gen.generate(prompts[i], derive_seed(17, i)).tokens;
        positives += detect_logits(text, cfg.logits, lm.vocab.size()).verdict;
    }
    CHECK(positives <= 2); // at least 99% negative
}

TEST_CASE("invalid logits configs are rejected")
{
    LogitsWatermarkConfig cfg;
    cfg.gamma = 1.0;
    CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::Config);
    cfg.gamma = 0.5;
    cfg.delta = -1.0;
    CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::Config);
}
