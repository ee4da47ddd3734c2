#pragma once

#include <stdexcept>
#include <string>

namespace tyurin {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define TYURIN_ERROR(Name)                                                  \
    struct Name : Error {                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

TYURIN_ERROR(DegenerateCurve);
TYURIN_ERROR(PeriodComputationFailed);
TYURIN_ERROR(ChartError);
TYURIN_ERROR(PathError);
TYURIN_ERROR(InvalidDivisor);
TYURIN_ERROR(TruncationError);
TYURIN_ERROR(IllConditionedReduction);
TYURIN_ERROR(SingularInput);
TYURIN_ERROR(InvalidDisk);
TYURIN_ERROR(AmbiguousCorank);
TYURIN_ERROR(SingularEvaluation);
TYURIN_ERROR(NumericalLimitFailure);
TYURIN_ERROR(SpecialDivisor);
TYURIN_ERROR(ConnectionAxiomViolation);
TYURIN_ERROR(PathTooClose);
TYURIN_ERROR(IntegratorStall);
TYURIN_ERROR(ApparentSingularityViolation);
TYURIN_ERROR(CharacterMismatch);
TYURIN_ERROR(ContourError);
TYURIN_ERROR(AdmissibilityError);
TYURIN_ERROR(StepSizeError);
TYURIN_ERROR(NonTransversalFamily);
TYURIN_ERROR(UsageError);
TYURIN_ERROR(InvalidTangent);

#undef TYURIN_ERROR

// Carries the measured corank so callers can report h^1.
struct OnThetaDivisor : Error {
    OnThetaDivisor(int corank, const std::string& what)
        : Error("OnThetaDivisor", what), corank(corank) {}
    int corank;
};

}  // namespace tyurin
