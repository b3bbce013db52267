#pragma once

#include <stdexcept>
#include <string>

namespace qmap {

enum class ErrorCode {
    InvalidParameters,
    UnsupportedFamily,
    NotOnLevelSet,
    BasisNotTangent,
    SingularHessian,
    NotPositiveDefinite,
    ZeroZ0,
    SingularI,
    SingularMetric,
    PoleAt4x3,
    ZeroDenominator,
    NotAutomorphism,
    OutOfDomain,
    DimensionMismatch,
    ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace qmap
