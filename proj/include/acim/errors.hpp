#pragma once

#include <stdexcept>
#include <string>

namespace acim {

// Error taxonomy shared by all modules. Numeric failures that carry a
// partial result (NoConvergence, escape-time overflow) are returned as
// status fields instead of thrown.
enum class ErrorCode {
    PointOnBoundary,
    OutOfDomain,
    NoRoot,
    NotMonotone,
    DegenerateProbe,
    BadSpec,
    NotInRegion,
    Overflow,
    EmptyWindow,
    NonPositiveTail,
    BadResolution,
    PartitionMismatch,
    InverseFailure,
    EpsTooSmall,
    EpsGridEmpty,
    DegenerateFamily,
    DegenerateVectors,
    BadRadii,
    EmptyTable,
    InsufficientFit,
    BadConfig,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace acim
