#include "cev/error.hpp"

namespace cev {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::SingularGamma: return "SingularGamma";
        case ErrorCode::PoleAtNonPositiveInteger: return "PoleAtNonPositiveInteger";
        case ErrorCode::ParameterPole: return "ParameterPole";
        case ErrorCode::ArgumentZero: return "ArgumentZero";
        case ErrorCode::NonIntegrableCoefficient: return "NonIntegrableCoefficient";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::ExtensionNotApplicable: return "ExtensionNotApplicable";
        case ErrorCode::CaseUncovered: return "CaseUncovered";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NonPolynomialInput: return "NonPolynomialInput";
        case ErrorCode::IntegerA: return "IntegerA";
        case ErrorCode::WrongEndpoint: return "WrongEndpoint";
        case ErrorCode::NonConvergentTail: return "NonConvergentTail";
        case ErrorCode::WrongRegime: return "WrongRegime";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::MissingIncrements: return "MissingIncrements";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams:
        case ErrorCode::SingularGamma:
        case ErrorCode::ExtensionNotApplicable:
        case ErrorCode::CaseUncovered:
        case ErrorCode::NonPolynomialInput:
        case ErrorCode::IntegerA:
        case ErrorCode::WrongEndpoint:
        case ErrorCode::WrongRegime:
        case ErrorCode::ConfigInvalid:
        case ErrorCode::MissingIncrements:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

void raise(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace cev
