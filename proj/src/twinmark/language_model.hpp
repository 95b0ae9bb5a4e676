#pragma once

#include "twinmark/embeddings.hpp"
#include "twinmark/ngram.hpp"
#include "twinmark/vocabulary.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace twinmark {

struct TrainingOptions {
    int order = 2;
    double lambda = 0.1;
    std::size_t embedding_dim = 32;
    std::size_t embedding_window = 2;
    std::uint64_t embedding_seed = 0;
};

/// Vocabulary, n-gram table, and embeddings travel together; every id in one
/// indexes the others.
struct LanguageModel {
    Vocabulary vocab;
    NGramModel ngram;
    EmbeddingTable embeddings;
    TrainingOptions options;

    static LanguageModel train(std::string_view corpus_text, const TrainingOptions& opts);

    bool operator==(const LanguageModel& o) const
    {
        return vocab == o.vocab && ngram == o.ngram && embeddings == o.embeddings;
    }
};

inline constexpr const char* kModelFormat = "twinmark-model";
inline constexpr int kModelFormatVersion = 1;

/// Self-describing JSON; doubles are written with 17 significant digits so a
/// save/load round trip is bit-exact. `provenance`, when non-empty, must be a
/// JSON object and is stored verbatim under "provenance" (ignored on load).
std::string serialize_model(const LanguageModel& m, std::string_view provenance = {});
LanguageModel deserialize_model(std::string_view text);

void save_model(const LanguageModel& m, const std::filesystem::path& path, std::string_view provenance = {});
LanguageModel load_model(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace twinmark
