#pragma once

#include <stdexcept>
#include <string>

namespace sme {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SME_DEFINE_ERROR(Name)                                                \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

SME_DEFINE_ERROR(NotSpsd);
SME_DEFINE_ERROR(NonPositivePdet);
SME_DEFINE_ERROR(DegenerateLeadingCoefficient);
SME_DEFINE_ERROR(DegenerateDirection);
SME_DEFINE_ERROR(ZeroTrace);
SME_DEFINE_ERROR(NoRootInUnit);
SME_DEFINE_ERROR(NonPositiveScale);
SME_DEFINE_ERROR(InconsistentMeasurement);
SME_DEFINE_ERROR(InvalidBounds);
SME_DEFINE_ERROR(SingularTransition);
SME_DEFINE_ERROR(ParseError);
SME_DEFINE_ERROR(ValidationError);
SME_DEFINE_ERROR(IoError);

#undef SME_DEFINE_ERROR

}  // namespace sme
