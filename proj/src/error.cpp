#include "epi/error.hpp"

namespace epi {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Io: return "Io";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::DuplicateDate: return "DuplicateDate";
        case ErrorCode::UnparseableDate: return "UnparseableDate";
        case ErrorCode::GapInDates: return "GapInDates";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::AllMissingColumn: return "AllMissingColumn";
        case ErrorCode::UnknownFeature: return "UnknownFeature";
        case ErrorCode::MissingValuesPresent: return "MissingValuesPresent";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::ConstantTarget: return "ConstantTarget";
        case ErrorCode::FeatureMismatch: return "FeatureMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Format: return "Format";
        case ErrorCode::NoValidCell: return "NoValidCell";
        case ErrorCode::Divergence: return "DivergenceError";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
        case ErrorCode::DegenerateKernelMatrix: return "DegenerateKernelMatrix";
        case ErrorCode::LineSearchFailure: return "LineSearchFailure";
        case ErrorCode::NotConverged: return "NotConverged";
    }
    return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Divergence:
        case ErrorCode::SingularMatrix:
        case ErrorCode::NonFiniteLoss:
        case ErrorCode::NonFiniteObjective:
        case ErrorCode::DegenerateKernelMatrix:
            return 3;
        case ErrorCode::LineSearchFailure:
        case ErrorCode::NotConverged:
            return 4;
        default:
            return 2;
    }
}

}  // namespace epi
