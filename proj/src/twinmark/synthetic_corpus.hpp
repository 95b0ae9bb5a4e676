#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twinmark {

/// Parameters of the synthetic "concept chain" corpus.
///
/// Text is produced by a first-order Markov chain over concepts; each concept
/// is realized as one word drawn from its synonym set. Synonyms share
/// every context, so co-occurrence embeddings put them close together, while a
/// concept's branching factor and the synonym-set sizes of its successors fix
/// the token entropy at each position. Mixing these gives the low/high token
/// entropy and low/high semantic entropy positions that entropy gating needs.
struct SyntheticCorpusConfig {
    std::uint64_t seed = 1;
    std::size_t concepts = 1000;
    std::vector<std::size_t> synset_sizes{1, 8};
    std::vector<double> synset_weights{0.4, 0.6};
    std::vector<std::size_t> branching{1, 2, 6};
    std::vector<double> branching_weights{0.3, 0.3, 0.4};
    // Zipf exponents for successor and synonym choice (0: uniform); the
    // rank order is random per concept.
    double successor_skew = 1.5;
    double synonym_skew = 0.0;
    std::size_t sentence_length = 0; // 0: no sentence punctuation
};

/// The generator is fixed by `cfg`; `stream_seed` selects an independent text
/// drawn from it, so training, judge, and held-out corpora share a language.
std::string synthesize_corpus(const SyntheticCorpusConfig& cfg, std::size_t tokens, std::uint64_t stream_seed);

} // namespace twinmark
