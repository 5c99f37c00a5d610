#include "platoon/error.hpp"

namespace platoon {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyPlatoon: return "EmptyPlatoon";
        case ErrorCode::NonPositiveLag: return "NonPositiveLag";
        case ErrorCode::BadMpfDepth: return "BadMpfDepth";
        case ErrorCode::OffGridDelay: return "OffGridDelay";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::HistoryUnderflow: return "HistoryUnderflow";
        case ErrorCode::UnstableChannel: return "UnstableChannel";
        case ErrorCode::NonzeroCommDelay: return "NonzeroCommDelay";
        case ErrorCode::NonNegativePole: return "NonNegativePole";
        case ErrorCode::NonPositiveGain: return "NonPositiveGain";
        case ErrorCode::InvalidAxis: return "InvalidAxis";
        case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
        case ErrorCode::NegativeSpeed: return "NegativeSpeed";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace platoon
