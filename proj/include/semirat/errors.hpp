#pragma once

#include <stdexcept>
#include <string>

namespace semirat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SEMIRAT_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what)                       \
            : Error(std::string(#Name ": ") + what) {}               \
    }

// ratfun
SEMIRAT_DEFINE_ERROR(PoleHit);
SEMIRAT_DEFINE_ERROR(NotHolomorphicAtZero);
SEMIRAT_DEFINE_ERROR(ConstantFunction);
SEMIRAT_DEFINE_ERROR(UnboundedAtInfinity);
SEMIRAT_DEFINE_ERROR(DegreeLimitExceeded);
SEMIRAT_DEFINE_ERROR(ParseError);

// stability
SEMIRAT_DEFINE_ERROR(NotAnApproximation);
SEMIRAT_DEFINE_ERROR(GridTooCoarse);
SEMIRAT_DEFINE_ERROR(NotStrictlyContractiveAtInfinity);
SEMIRAT_DEFINE_ERROR(EnvelopeFailed);
SEMIRAT_DEFINE_ERROR(ZeroModulusEncountered);
SEMIRAT_DEFINE_ERROR(PreconditionViolation);

// hnorm
SEMIRAT_DEFINE_ERROR(BranchCutHit);
SEMIRAT_DEFINE_ERROR(NonIntegrable);
SEMIRAT_DEFINE_ERROR(MaximumPrincipleViolation);

// semigroup_ops
SEMIRAT_DEFINE_ERROR(OutsideSector);
SEMIRAT_DEFINE_ERROR(SpectrumTooClose);
SEMIRAT_DEFINE_ERROR(PoleMeetsSpectrum);
SEMIRAT_DEFINE_ERROR(NumericalMismatch);

// experiments
SEMIRAT_DEFINE_ERROR(DegenerateInput);

#undef SEMIRAT_DEFINE_ERROR

}  // namespace semirat
