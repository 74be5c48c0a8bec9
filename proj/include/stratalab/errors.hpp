#pragma once

#include <stdexcept>
#include <string>

namespace stratalab {

// Base class for all library errors.  Subclasses name the failure mode so
// callers (and the CLI) can map them to diagnostics without string matching.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define STRATALAB_ERROR(NAME)                                          \
    struct NAME : Error {                                              \
        explicit NAME(const std::string& what = #NAME) : Error(what) {} \
    }

STRATALAB_ERROR(NonTameStep);
STRATALAB_ERROR(BadTwist);
STRATALAB_ERROR(ZeroElement);
STRATALAB_ERROR(ZeroResidue);
STRATALAB_ERROR(NotSubfield);
STRATALAB_ERROR(InsufficientPrecision);
STRATALAB_ERROR(OmegaTooSmall);
STRATALAB_ERROR(NotNormalizing);
STRATALAB_ERROR(NotContained);
STRATALAB_ERROR(SingularAtPrecision);
STRATALAB_ERROR(ModulusTooSmall);
STRATALAB_ERROR(NotPure);
STRATALAB_ERROR(NotSimple);
STRATALAB_ERROR(NotMinimal);
STRATALAB_ERROR(NotMaximal);
STRATALAB_ERROR(NotTame);
STRATALAB_ERROR(ConstructionFailed);
STRATALAB_ERROR(ConductorMismatch);
STRATALAB_ERROR(AxiomViolation);
STRATALAB_ERROR(MonotonicityViolation);
STRATALAB_ERROR(NegativeDepthGroup);
STRATALAB_ERROR(IdentityFailed);
STRATALAB_ERROR(EqualityFailed);
STRATALAB_ERROR(ProductMismatch);
STRATALAB_ERROR(OddExponent);
STRATALAB_ERROR(ConfigError);

#undef STRATALAB_ERROR

}  // namespace stratalab
