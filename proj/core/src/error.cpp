#include "bubble/error.hpp"

namespace bubble {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::AssumptionIIViolated: return "AssumptionIIViolated";
        case ErrorCode::RootStructure: return "RootStructure";
        case ErrorCode::NoCorridorFound: return "NoCorridorFound";
        case ErrorCode::ScaleInconsistency: return "ScaleInconsistency";
        case ErrorCode::DegenerateSigma: return "DegenerateSigma";
        case ErrorCode::MismatchedScales: return "MismatchedScales";
        case ErrorCode::InsufficientTail: return "InsufficientTail";
        case ErrorCode::InconclusiveRegime: return "InconclusiveRegime";
        case ErrorCode::HypothesisUnsatisfiable: return "HypothesisUnsatisfiable";
        case ErrorCode::NumericalOverflow: return "NumericalOverflow";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace bubble
