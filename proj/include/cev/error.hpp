#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cev {

enum class ErrorCode {
    InvalidParams,
    SingularGamma,
    PoleAtNonPositiveInteger,
    ParameterPole,
    ArgumentZero,
    NonIntegrableCoefficient,
    NonConvergent,
    ExtensionNotApplicable,
    CaseUncovered,
    NoConvergence,
    NonPolynomialInput,
    IntegerA,
    WrongEndpoint,
    NonConvergentTail,
    WrongRegime,
    ConfigInvalid,
    MissingIncrements,
};

std::string_view to_string(ErrorCode code);

/// True for codes that describe bad input rather than a numerical failure.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);
    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& detail);

}  // namespace cev
