#pragma once

#include <stdexcept>
#include <string>

namespace orbitclt {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    NotPrimitive,
    BudgetExceeded,
    NoPath,
    GapTooShort,
    WindowTooShort,
    IncompatibleSchedule,
    IndexOutOfRange,
    EmptyInput,
    ValidationFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace orbitclt
