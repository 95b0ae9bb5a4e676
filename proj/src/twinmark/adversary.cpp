#include "twinmark/adversary.hpp"

#include "twinmark/keyed_random.hpp"
#include "twinmark/ngram.hpp"
#include "twinmark/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twinmark {

void StealingConfig::validate() const
{
    require(budget_tokens >= 1, ErrorCode::Config, "budget_tokens must be >= 1");
    require(top_fraction > 0.0 && top_fraction < 1.0, ErrorCode::Config, "top_fraction must lie in (0,1)");
    require(spoof_strength >= 0.0, ErrorCode::Config, "spoof_strength must be >= 0");
    require(!std::isnan(z_spoof_threshold), ErrorCode::Config, "z_spoof_threshold must not be NaN");
}

GreenList estimate_greenlist(TokenView wm_corpus, std::span<const double> base_freqs, double gamma)
{
    require(!wm_corpus.empty(), ErrorCode::SequenceTooShort, "stealing needs at least one observed token");
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument, "gamma must lie in (0,1)");
    const std::size_t V = base_freqs.size();
    validate_sequence(wm_corpus, V);

    std::vector<double> observed(V, 0.0);
    for (TokenId id : wm_corpus) observed[id] += 1.0;
    std::vector<double> score(V);
    for (std::size_t i = 0; i < V; ++i)
        score[i] = observed[i] / static_cast<double>(wm_corpus.size()) / (base_freqs[i] + kStealEpsilon);

    std::vector<TokenId> order(V);
    std::iota(order.begin(), order.end(), TokenId{0});
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) { return score[a] > score[b]; });

    GreenList g;
    g.membership.assign(V, false);
    g.green_count = green_list_size(gamma, V);
    for (std::size_t i = 0; i < g.green_count; ++i) g.membership[order[i]] = true;
    return g;
}

double green_overlap(const GreenList& estimated, const GreenList& truth)
{
    require(estimated.membership.size() == truth.membership.size(), ErrorCode::LengthMismatch,
            "green lists cover different vocabularies");
    require(truth.green_count > 0, ErrorCode::InvalidArgument, "true green list is empty");
    std::size_t both = 0;
    for (std::size_t i = 0; i < truth.membership.size(); ++i) both += estimated.membership[i] && truth.membership[i];
    return static_cast<double>(both) / static_cast<double>(truth.green_count);
}

std::vector<TokenId> green_ids(const GreenList& g)
{
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < g.membership.size(); ++i)
        if (g.membership[i]) ids.push_back(static_cast<TokenId>(i));
    return ids;
}

GreenList green_from_ids(std::span<const TokenId> ids, std::size_t vocab_size)
{
    GreenList g;
    g.membership.assign(vocab_size, false);
    for (TokenId id : ids) {
        require(id < vocab_size, ErrorCode::UnknownToken, "green id " + std::to_string(id) + " outside vocabulary");
        if (!g.membership[id]) ++g.green_count;
        g.membership[id] = true;
    }
    return g;
}

TokenSequence spoof_generate(const NGramModel& model, const GreenList& estimated, double strength, TokenView prompt,
                             std::size_t length, std::uint64_t seed)
{
    require(strength >= 0.0, ErrorCode::InvalidArgument, "spoof strength must be >= 0");
    require(estimated.membership.size() == model.vocab_size(), ErrorCode::LengthMismatch,
            "estimated green list does not match the model vocabulary");
    validate_sequence(prompt, model.vocab_size());
    Rng rng(seed);
    TokenSequence ctx(prompt.begin(), prompt.end());
    TokenSequence out;
    out.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
        auto p = model.probabilities(ctx);
        if (strength > 0.0) {
            for (auto& v : p) v = std::log(v);
            p = softmax(apply_bias(p, estimated, strength));
        }
        const TokenId next = sample_original(p, OriginalSampler::Multinomial, rng);
        ctx.push_back(next);
        out.push_back(next);
    }
    return out;
}

double attack_success_rate(std::span<const TokenSequence> spoofed, const LogitsWatermarkConfig& detector,
                           std::size_t vocab_size, double z_threshold)
{
    require(!spoofed.empty(), ErrorCode::InvalidArgument, "attack success rate needs at least one text");
    std::size_t hits = 0;
    for (const auto& text : spoofed) hits += detect_logits(text, detector, vocab_size).z > z_threshold;
    return static_cast<double>(hits) / static_cast<double>(spoofed.size());
}

std::vector<double> base_frequencies(const NGramModel& model) { return model.probabilities({}); }

TokenSequence collect_watermarked(const NGramModel& model, const EmbeddingTable* embeddings,
                                  const SymbioticConfig& cfg, std::span<const TokenSequence> prompts,
                                  std::size_t budget, std::uint64_t seed)
{
    require(!prompts.empty(), ErrorCode::InvalidArgument, "need at least one prompt");
    const SymbioticGenerator gen(model, embeddings, cfg);
    TokenSequence corpus;
    corpus.reserve(budget);
    for (std::size_t i = 0; corpus.size() < budget; ++i) {
        const auto g = gen.generate(prompts[i % prompts.size()], derive_seed(seed, i));
        const std::size_t take = std::min(g.tokens.size(), budget - corpus.size());
        corpus.insert(corpus.end(), g.tokens.begin(), g.tokens.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return corpus;
}

} // namespace twinmark
