#pragma once

#include <stdexcept>
#include <string>

namespace nestlab {

enum class Err {
    InvalidArgument,       // usage-level problems (CLI exit 1)
    DegenerateFixedPoints,
    RayTraceDiverged,
    NotLanded,
    CriticalHitsAlpha,
    WrongLimb,
    MixedDepths,
    OnBoundary,
    Outside,
    InvalidAccess,
    InadmissibleSigma,
    ImmediateRenormalizable,
    RenormalizationDetected,
    AdmissibilityViolation,
    NotBracketed,
    NotPrime,
    DegenerateAnnulus,
    BasepointOutside,
    NotInjective,
    BudgetExhausted,       // budget-level problems (CLI exit 3)
};

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }
    // CLI exit code contract: 1 usage, 2 math, 3 budget.
    int exit_code() const {
        if (code_ == Err::InvalidArgument) return 1;
        if (code_ == Err::BudgetExhausted) return 3;
        return 2;
    }

private:
    Err code_;
};

const char* err_name(Err code);

}  // namespace nestlab
