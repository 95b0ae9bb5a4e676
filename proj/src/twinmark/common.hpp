#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinmark {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;
using TokenView = std::span<const TokenId>;

enum class ErrorCode {
    InvalidArgument = 1,
    EmptyCorpus,
    CorpusTooShort,
    SequenceTooShort,
    LengthMismatch,
    UnknownToken,
    Io,
    Format,
    Config,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) throw Error(code, what);
}

} // namespace twinmark
