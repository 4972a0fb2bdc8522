#include "acim/errors.hpp"

namespace acim {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::PointOnBoundary: return "PointOnBoundary";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::NotMonotone: return "NotMonotone";
        case ErrorCode::DegenerateProbe: return "DegenerateProbe";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::NotInRegion: return "NotInRegion";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::NonPositiveTail: return "NonPositiveTail";
        case ErrorCode::BadResolution: return "BadResolution";
        case ErrorCode::PartitionMismatch: return "PartitionMismatch";
        case ErrorCode::InverseFailure: return "InverseFailure";
        case ErrorCode::EpsTooSmall: return "EpsTooSmall";
        case ErrorCode::EpsGridEmpty: return "EpsGridEmpty";
        case ErrorCode::DegenerateFamily: return "DegenerateFamily";
        case ErrorCode::DegenerateVectors: return "DegenerateVectors";
        case ErrorCode::BadRadii: return "BadRadii";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::InsufficientFit: return "InsufficientFit";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

}  // namespace acim
