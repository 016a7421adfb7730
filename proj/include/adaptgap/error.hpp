#pragma once

#include <stdexcept>
#include <string>

namespace adaptgap {

// Base of every error raised by the library. Precondition-style failures
// (PreconditionViolated, RegimeViolation, ...) map to CLI exit status 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ADAPTGAP_DEFINE_ERROR(Name) \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

ADAPTGAP_DEFINE_ERROR(BudgetExceeded);
ADAPTGAP_DEFINE_ERROR(DisciplineViolation);
ADAPTGAP_DEFINE_ERROR(IndexOutOfRange);
ADAPTGAP_DEFINE_ERROR(EmptyInput);
ADAPTGAP_DEFINE_ERROR(InvalidExponent);
ADAPTGAP_DEFINE_ERROR(InvalidParameters);
ADAPTGAP_DEFINE_ERROR(PreconditionViolated);
ADAPTGAP_DEFINE_ERROR(RegimeViolation);
ADAPTGAP_DEFINE_ERROR(InsufficientPoints);
ADAPTGAP_DEFINE_ERROR(NonpositiveError);

#undef ADAPTGAP_DEFINE_ERROR

}  // namespace adaptgap
