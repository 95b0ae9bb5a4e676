#include "twinmark/synthetic_corpus.hpp"

#include "twinmark/common.hpp"
#include "twinmark/keyed_random.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace twinmark {

namespace {

std::size_t pick_weighted(const std::vector<double>& w, Rng& rng)
{
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (u < w[i]) return i;
        u -= w[i];
    }
    return w.size() - 1;
}

struct Concept {
    std::vector<std::string> words;
    std::vector<double> word_weights;
    std::vector<std::size_t> successors;
    std::vector<double> successor_weights;
};

std::vector<double> zipf_weights(std::size_t n, double exponent, Rng& rng)
{
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = std::pow(static_cast<double>(r + 1), -exponent);
    for (std::size_t i = n; i > 1; --i) std::swap(w[i - 1], w[rng.below(i)]);
    return w;
}

std::vector<Concept> build_language(const SyntheticCorpusConfig& cfg)
{
    require(cfg.concepts >= 8, ErrorCode::InvalidArgument, "synthetic corpus needs at least 8 concepts");
    require(!cfg.synset_sizes.empty() && cfg.synset_sizes.size() == cfg.synset_weights.size(),
            ErrorCode::InvalidArgument, "synset sizes and weights must be non-empty and of equal length");
    require(!cfg.branching.empty() && cfg.branching.size() == cfg.branching_weights.size(),
            ErrorCode::InvalidArgument, "branching factors and weights must be non-empty and of equal length");
    for (auto b : cfg.branching)
        require(b >= 1 && b < cfg.concepts, ErrorCode::InvalidArgument, "branching factor out of range");
    for (auto z : cfg.synset_sizes) require(z >= 1, ErrorCode::InvalidArgument, "synset size must be >= 1");

    Rng rng(derive_seed(cfg.seed, 0, 0x6c616e67));
    static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                              "br", "tr", "st", "kl", "sh", "ch"};
    static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    std::set<std::string> used;
    auto fresh_word = [&] {
        for (;;) {
            std::string w;
            const std::size_t syllables = 2 + rng.below(2);
            for (std::size_t s = 0; s < syllables; ++s) {
                w += kOnsets[rng.below(std::size(kOnsets))];
                w += kVowels[rng.below(std::size(kVowels))];
            }
            if (used.insert(w).second) return w;
        }
    };

    std::vector<Concept> concepts(cfg.concepts);
    for (auto& c : concepts) {
        const std::size_t size = cfg.synset_sizes[pick_weighted(cfg.synset_weights, rng)];
        for (std::size_t i = 0; i < size; ++i) c.words.push_back(fresh_word());
        c.word_weights = zipf_weights(size, cfg.synonym_skew, rng);
    }
    // A random cyclic order keeps the chain irreducible: every concept's
    // successor set contains the next concept on the cycle.
    std::vector<std::size_t> order(concepts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<std::size_t> next_on_cycle(concepts.size());
    for (std::size_t i = 0; i < order.size(); ++i) next_on_cycle[order[i]] = order[(i + 1) % order.size()];

    for (std::size_t i = 0; i < concepts.size(); ++i) {
        const std::size_t b = cfg.branching[pick_weighted(cfg.branching_weights, rng)];
        std::set<std::size_t> succ{next_on_cycle[i]};
        while (succ.size() < b) {
            const std::size_t s = rng.below(concepts.size());
            if (s != i) succ.insert(s);
        }
        concepts[i].successors.assign(succ.begin(), succ.end());
        concepts[i].successor_weights = zipf_weights(b, cfg.successor_skew, rng);
    }
    return concepts;
}

} // namespace

std::string synthesize_corpus(const SyntheticCorpusConfig& cfg, std::size_t tokens, std::uint64_t stream_seed)
{
    const auto concepts = build_language(cfg);
    Rng rng(derive_seed(cfg.seed, stream_seed + 1, 0x74657874));
    std::string out;
    std::size_t c = rng.below(concepts.size());
    for (std::size_t t = 0, in_sentence = 0; t < tokens; ++t) {
        if (cfg.sentence_length > 0 && in_sentence == cfg.sentence_length) {
            out += ". ";
            in_sentence = 0;
            ++t;
            if (t == tokens) break;
        }
        const auto& node = concepts[c];
        out += node.words[pick_weighted(node.word_weights, rng)];
        out += t + 1 < tokens ? ' ' : '\n';
        ++in_sentence;
        c = node.successors[pick_weighted(node.successor_weights, rng)];
    }
    if (!out.empty() && out.back() != '\n') out.back() = '\n';
    return out;
}

} // namespace twinmark
