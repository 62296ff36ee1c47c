#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bubble {

enum class ErrorCode {
    ConfigInvalid,
    ParseError,
    AssumptionIIViolated,
    RootStructure,
    NoCorridorFound,
    ScaleInconsistency,
    DegenerateSigma,
    MismatchedScales,
    InsufficientTail,
    InconclusiveRegime,
    HypothesisUnsatisfiable,
    NumericalOverflow,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is what
/// callers branch on; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bubble
