#include "smallball/error.hpp"

namespace smallball {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotStochastic: return "NotStochastic";
        case ErrorCode::NotReversible: return "NotReversible";
        case ErrorCode::NotStationary: return "NotStationary";
        case ErrorCode::NoUniqueStationary: return "NoUniqueStationary";
        case ErrorCode::ZeroStationaryMass: return "ZeroStationaryMass";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::InvalidSigns: return "InvalidSigns";
        case ErrorCode::InvalidWeights: return "InvalidWeights";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NonIntegerWeights: return "NonIntegerWeights";
        case ErrorCode::NotPrime: return "NotPrime";
        case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::DegenerateGap: return "DegenerateGap";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::EmptyFamily: return "EmptyFamily";
        case ErrorCode::OddK: return "OddK";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::NotRegular: return "NotRegular";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

}  // namespace smallball
