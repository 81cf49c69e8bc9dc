#include "mtk/errors.hpp"

namespace mtk {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotOrdinary: return "NotOrdinary";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::AmbiguousEigensystem: return "AmbiguousEigensystem";
    case ErrorCode::NonRational: return "NonRational";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::BadReductionUnsupported: return "BadReductionUnsupported";
    case ErrorCode::NotDivisor: return "NotDivisor";
    case ErrorCode::BadModulus: return "BadModulus";
    case ErrorCode::NotSquareFree: return "NotSquareFree";
    case ErrorCode::NotPrimitiveRoot: return "NotPrimitiveRoot";
    case ErrorCode::GcdViolation: return "GcdViolation";
    case ErrorCode::BadPrime: return "BadPrime";
    case ErrorCode::InsufficientLevels: return "InsufficientLevels";
    case ErrorCode::NotSupersingularZero: return "NotSupersingularZero";
    case ErrorCode::WeightParity: return "WeightParity";
    case ErrorCode::NotKolyvagin: return "NotKolyvagin";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptCache: return "CorruptCache";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace mtk
