#pragma once

#include "twinmark/experiment.hpp"
#include "twinmark/language_model.hpp"
#include "twinmark/synthetic_corpus.hpp"

#include <doctest.h>

namespace twinmark::testing {

/// Small mixed-entropy language shared by the end-to-end tests.
inline const SyntheticCorpusConfig& small_language()
{
    static const SyntheticCorpusConfig cfg = [] {
        SyntheticCorpusConfig c;
        c.concepts = 300;
        c.synset_sizes = {1, 2, 4};
        c.synset_weights = {0.3, 0.3, 0.4};
        c.branching = {1, 2, 6};
        c.branching_weights = {0.4, 0.2, 0.4};
        c.successor_skew = 0.5;
        return c;
    }();
    return cfg;
}

inline const LanguageModel& small_model()
{
    static const LanguageModel m = [] {
        TrainingOptions opts;
        opts.lambda = 1e-3;
        return LanguageModel::train(synthesize_corpus(small_language(), 120000, 0), opts);
    }();
    return m;
}

/// Natural text from the same language, never seen in training.
inline const TokenSequence& small_heldout()
{
    static const TokenSequence t =
        small_model().vocab.encode(synthesize_corpus(small_language(), 120000, 1), Vocabulary::Unknown::Skip);
    return t;
}

inline std::vector<TokenSequence> small_prompts(std::size_t n, std::size_t prompt_len = 4)
{
    std::vector<TokenSequence> out;
    for (auto& s : held_out_slices(small_heldout(), n, prompt_len, 200)) out.push_back(s.prompt);
    return out;
}

template <class F>
ErrorCode error_code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a twinmark::Error");
    return ErrorCode::InvalidArgument;
}

} // namespace twinmark::testing
