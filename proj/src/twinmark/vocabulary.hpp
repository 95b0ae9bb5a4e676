#pragma once

#include "twinmark/common.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace twinmark {

/// Splits on ASCII whitespace; every ASCII punctuation character is a token of
/// its own. Non-ASCII bytes are treated as word characters.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens);

    /// Tokens in first-occurrence order.
    static Vocabulary build(std::string_view corpus);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::string& token(TokenId id) const { return tokens_.at(id); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::optional<TokenId> find(std::string_view token) const;

    /// Returns the id, appending the token if new.
    TokenId intern(std::string_view token);

    enum class Unknown { Reject, Skip };
    TokenSequence encode(std::string_view text, Unknown policy = Unknown::Reject) const;
    std::string decode(TokenView ids) const;

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
};

void validate_sequence(TokenView ids, std::size_t vocab_size);

} // namespace twinmark
