#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epi {

enum class ErrorCode {
    // input errors
    Io,
    MalformedHeader,
    DuplicateDate,
    UnparseableDate,
    GapInDates,
    EmptyWindow,
    AllMissingColumn,
    UnknownFeature,
    MissingValuesPresent,
    EmptyInput,
    DimensionMismatch,
    LengthMismatch,
    DegenerateSplit,
    ConstantTarget,
    FeatureMismatch,
    InvalidConfig,
    Format,
    NoValidCell,
    // numeric failures
    Divergence,
    SingularMatrix,
    NonFiniteLoss,
    NonFiniteObjective,
    DegenerateKernelMatrix,
    // convergence failures, when a context treats them as errors
    LineSearchFailure,
    NotConverged,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit code for a failure: 2 input, 3 numeric, 4 non-convergence.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace epi
