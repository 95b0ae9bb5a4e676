#include "twinmark/language_model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace twinmark {

using nlohmann::json;

LanguageModel LanguageModel::train(std::string_view corpus_text, const TrainingOptions& opts)
{
    LanguageModel m;
    m.options = opts;
    m.vocab = Vocabulary::build(corpus_text);
    require(m.vocab.size() >= 2, ErrorCode::EmptyCorpus, "corpus needs at least two distinct tokens");
    const auto ids = m.vocab.encode(corpus_text);
    m.ngram = NGramModel::train(ids, m.vocab.size(), opts.order, opts.lambda);
    m.embeddings = train_embeddings(ids, m.vocab.size(), opts.embedding_dim, opts.embedding_window, opts.embedding_seed);
    return m;
}

std::string serialize_model(const LanguageModel& m, std::string_view provenance)
{
    json contexts = json::array();
    for (const auto& [ctx, cc] : m.ngram.table()) {
        json succ = json::array();
        for (const auto& [id, count] : cc.successors) succ.push_back({id, count});
        contexts.push_back({{"context", ctx}, {"successors", std::move(succ)}});
    }
    json j = {
        {"format", kModelFormat},
        {"version", kModelFormatVersion},
        {"vocabulary", m.vocab.tokens()},
        {"order", m.ngram.order()},
        {"lambda", m.ngram.lambda()},
        {"training",
         {{"embedding_dim", m.options.embedding_dim},
          {"embedding_window", m.options.embedding_window},
          {"embedding_seed", m.options.embedding_seed}}},
        {"contexts", std::move(contexts)},
        {"embeddings", {{"dim", m.embeddings.dim()}, {"values", m.embeddings.values()}}},
    };
    if (!provenance.empty()) j["provenance"] = json::parse(provenance);
    return j.dump() + "\n";
}

LanguageModel deserialize_model(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        require(j.at("format") == kModelFormat, ErrorCode::Format, "not a twinmark model file");
        require(j.at("version") == kModelFormatVersion, ErrorCode::Format,
                "unsupported model format version " + j.at("version").dump());
        LanguageModel m;
        m.vocab = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
        NGramModel::Table table;
        for (const auto& c : j.at("contexts")) {
            ContextCounts cc;
            for (const auto& s : c.at("successors")) {
                cc.successors.emplace_back(s.at(0).get<TokenId>(), s.at(1).get<std::uint32_t>());
                cc.total += cc.successors.back().second;
            }
            table.emplace(c.at("context").get<TokenSequence>(), std::move(cc));
        }
        m.options.order = j.at("order").get<int>();
        m.options.lambda = j.at("lambda").get<double>();
        const auto& tr = j.at("training");
        m.options.embedding_dim = tr.at("embedding_dim").get<std::size_t>();
        m.options.embedding_window = tr.at("embedding_window").get<std::size_t>();
        m.options.embedding_seed = tr.at("embedding_seed").get<std::uint64_t>();
        m.ngram = NGramModel(m.vocab.size(), m.options.order, m.options.lambda, std::move(table));
        const auto& e = j.at("embeddings");
        m.embeddings = EmbeddingTable(m.vocab.size(), e.at("dim").get<std::size_t>(),
                                      e.at("values").get<std::vector<double>>());
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("malformed model file: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "write to '" + path.string() + "' failed");
}

void save_model(const LanguageModel& m, const std::filesystem::path& path, std::string_view provenance)
{
    write_text_file(path, serialize_model(m, provenance));
}

LanguageModel load_model(const std::filesystem::path& path) { return deserialize_model(read_text_file(path)); }

} // namespace twinmark
