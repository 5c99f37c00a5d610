#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace platoon {

enum class ErrorCode {
    EmptyPlatoon,
    NonPositiveLag,
    BadMpfDepth,
    OffGridDelay,
    InvalidParameter,
    DimensionMismatch,
    HistoryUnderflow,
    UnstableChannel,
    NonzeroCommDelay,
    NonNegativePole,
    NonPositiveGain,
    InvalidAxis,
    NonMonotoneTime,
    NegativeSpeed,
    EmptyFile,
    ParseError,
    UnknownKey,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// command line front end can print `error[Code]: message`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace platoon
