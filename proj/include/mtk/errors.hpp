#pragma once

#include <stdexcept>
#include <string>

namespace mtk {

enum class ErrorCode {
    NotPrime,
    NotUnit,
    NotOrdinary,
    ZeroVector,
    ResourceLimit,
    AmbiguousEigensystem,
    NonRational,
    DegreeTooLarge,
    BadReductionUnsupported,
    NotDivisor,
    BadModulus,
    NotSquareFree,
    NotPrimitiveRoot,
    GcdViolation,
    BadPrime,
    InsufficientLevels,
    NotSupersingularZero,
    WeightParity,
    NotKolyvagin,
    SingularCurve,
    PrecisionUnreachable,
    IoError,
    CorruptCache,
    ConfigError,
    InvariantViolation,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mtk
