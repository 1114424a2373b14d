#pragma once

#include <stdexcept>
#include <string>

namespace yl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept = 0;
};

#define YL_DEFINE_ERROR(Name)                                         \
    struct Name : Error {                                             \
        using Error::Error;                                           \
        const char* kind() const noexcept override { return #Name; }  \
    };

YL_DEFINE_ERROR(SchemaError)
YL_DEFINE_ERROR(InvariantError)
YL_DEFINE_ERROR(BadReduction)
YL_DEFINE_ERROR(OddWeight)
YL_DEFINE_ERROR(RamifiedPrime)
YL_DEFINE_ERROR(UndefinedAction)
YL_DEFINE_ERROR(DependentInput)
YL_DEFINE_ERROR(FieldError)
YL_DEFINE_ERROR(SimilitudeMismatch)
YL_DEFINE_ERROR(UnsupportedDegree)
YL_DEFINE_ERROR(UnsupportedOperation)
YL_DEFINE_ERROR(InsufficientData)
YL_DEFINE_ERROR(ConditionFailure)
YL_DEFINE_ERROR(RangeError)
YL_DEFINE_ERROR(ResidualTokens)
YL_DEFINE_ERROR(UnsupportedRamification)
YL_DEFINE_ERROR(PrecisionLoss)
YL_DEFINE_ERROR(IllConditioned)
YL_DEFINE_ERROR(CalibrationMissing)
YL_DEFINE_ERROR(NotFound)
YL_DEFINE_ERROR(AmbiguousMatch)
YL_DEFINE_ERROR(PreconditionError)

#undef YL_DEFINE_ERROR

}  // namespace yl
