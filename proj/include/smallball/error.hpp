#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smallball {

enum class ErrorCode {
    NotStochastic,
    NotReversible,
    NotStationary,
    NoUniqueStationary,
    ZeroStationaryMass,
    OutOfRange,
    InvalidDistribution,
    InvalidSigns,
    InvalidWeights,
    DimensionMismatch,
    BudgetExceeded,
    NonIntegerWeights,
    NotPrime,
    QuadratureNonConvergence,
    UnsupportedDimension,
    PreconditionViolated,
    DegenerateGap,
    HypothesisViolated,
    EmptyFamily,
    OddK,
    TooLarge,
    NotRegular,
    ParseError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the violated condition and, where there is one, the worst
/// offending entry.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace smallball
