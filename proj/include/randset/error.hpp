#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randset {

enum class ErrorCode {
    EmptySpace,
    NonPositiveWeight,
    DimensionMismatch,
    InvalidAlpha,
    ZeroMeasureSet,
    CoefficientsNotZeroSum,
    NotDisjointSystem,
    NegativeProbability,
    ProbabilitySumMismatch,
    InvalidOrder,
    InvalidMeanFunction,
    NotInSupport,
    TotalMassRemoved,
    InvalidParameter,
    PreconditionFailed,
    DecompositionInvalid,
    NotStable,
    NotNested,
    UnequalSampleSizes,
    InvalidPartition,
    EmptySample,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptySpace: return "EmptySpace";
        case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidAlpha: return "InvalidAlpha";
        case ErrorCode::ZeroMeasureSet: return "ZeroMeasureSet";
        case ErrorCode::CoefficientsNotZeroSum: return "CoefficientsNotZeroSum";
        case ErrorCode::NotDisjointSystem: return "NotDisjointSystem";
        case ErrorCode::NegativeProbability: return "NegativeProbability";
        case ErrorCode::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::InvalidMeanFunction: return "InvalidMeanFunction";
        case ErrorCode::NotInSupport: return "NotInSupport";
        case ErrorCode::TotalMassRemoved: return "TotalMassRemoved";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::DecompositionInvalid: return "DecompositionInvalid";
        case ErrorCode::NotStable: return "NotStable";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::UnequalSampleSizes: return "UnequalSampleSizes";
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library. The code names the violated
/// precondition; the message carries the details.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

inline void require(bool condition, ErrorCode code, const std::string& detail) {
    if (!condition) fail(code, detail);
}

}  // namespace detail

}  // namespace randset
