#include "twinmark/vocabulary.hpp"

namespace twinmark {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_punct(unsigned char c)
{
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

} // namespace

const char* error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::CorpusTooShort: return "CorpusTooShort";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            out.emplace_back(1, ch);
        } else {
            word.push_back(ch);
        }
    }
    flush();
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
{
    for (auto& t : tokens) {
        require(!index_.contains(t), ErrorCode::Format, "duplicate vocabulary token '" + t + "'");
        intern(t);
    }
}

Vocabulary Vocabulary::build(std::string_view corpus)
{
    Vocabulary v;
    for (const auto& t : tokenize(corpus)) v.intern(t);
    require(v.size() > 0, ErrorCode::EmptyCorpus, "corpus contains no tokens");
    return v;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const
{
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TokenId Vocabulary::intern(std::string_view token)
{
    auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<TokenId>(tokens_.size()));
    if (inserted) tokens_.emplace_back(token);
    return it->second;
}

TokenSequence Vocabulary::encode(std::string_view text, Unknown policy) const
{
    TokenSequence ids;
    for (const auto& t : tokenize(text)) {
        if (auto id = find(t)) {
            ids.push_back(*id);
        } else if (policy == Unknown::Reject) {
            throw Error(ErrorCode::UnknownToken, "token '" + t + "' is not in the vocabulary");
        }
    }
    return ids;
}

std::string Vocabulary::decode(TokenView ids) const
{
    std::string out;
    for (TokenId id : ids) {
        if (!out.empty()) out.push_back(' ');
        out += token(id);
    }
    return out;
}

void validate_sequence(TokenView ids, std::size_t vocab_size)
{
    for (TokenId id : ids)
        require(id < vocab_size, ErrorCode::UnknownToken,
                "token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(vocab_size));
}

} // namespace twinmark
