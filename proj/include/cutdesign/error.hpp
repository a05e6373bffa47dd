#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cutdesign {

enum class ErrorCode {
    Disconnected,
    NotAClique,
    UnsupportedK,
    DependentRelations,
    ConfoundedTerm,
    ShapeMismatch,
    TooLarge,
    FiberTooLarge,
    TooManyRelations,
    NotRegular,
    NotConverged,
    AllZero,
    InvalidMove,
    NoSamples,
    NotMarkov,
    InvalidInput,
    Overflow,
};

std::string_view error_name(ErrorCode code);

/// Every library failure is reported through this type; `code()` carries the
/// stable name printed by the command-line tool.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const { return error_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace cutdesign
