#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glif {

enum class ErrorCode {
    DimensionMismatch,
    InvalidParameter,
    NonSymmetric,
    NotPSD,
    NonOrthonormalBasis,
    SelfLoop,
    IndexOutOfRange,
    DegenerateDegree,
    NotPositiveDefinite,
    ZeroDenominator,
    InvalidSimplexRow,
    NotConverged,
    EmptyGroup,
    EmptySubset,
    NoLabels,
    EmptyPairs,
    UnsupportedSpec,
    ParseError,
    RowCountMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical failures map to CLI exit code 2, everything else is a
// validation failure (exit code 1).
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace glif
