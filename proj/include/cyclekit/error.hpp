#pragma once

#include <stdexcept>
#include <string>

namespace cyclekit {

enum class ErrorCode {
    malformed,
    missing_column,
    gap,
    duplicate,
    non_numeric,
    non_positive,
    unknown_variable,
    insufficient_data,
    singular,
    rank_deficient,
    non_finite,
    coverage,
    too_few,
    invalid_spec,
    missing_input,
    io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// True for failures of the numerical kernels rather than of the inputs.
    [[nodiscard]] bool is_numerical() const noexcept {
        return code_ == ErrorCode::singular || code_ == ErrorCode::rank_deficient ||
               code_ == ErrorCode::non_finite;
    }

private:
    ErrorCode code_;
};

}  // namespace cyclekit
