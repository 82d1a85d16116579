#pragma once

#include <stdexcept>
#include <string>

namespace osgood {

/// Broad failure classes; the CLI maps each to one exit code.
enum class ErrorClass { Precondition, Numeric, Regime };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  [[nodiscard]] ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

#define OSGOOD_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, what) {} \
  }

// Precondition failures.
OSGOOD_DEFINE_ERROR(ParameterViolation, Precondition);
OSGOOD_DEFINE_ERROR(DomainError, Precondition);
OSGOOD_DEFINE_ERROR(IndexError, Precondition);
OSGOOD_DEFINE_ERROR(ModeError, Precondition);
OSGOOD_DEFINE_ERROR(AdmissibilityError, Precondition);

// Numerical failures.
OSGOOD_DEFINE_ERROR(SaturationOverflow, Numeric);
OSGOOD_DEFINE_ERROR(QuadratureFailure, Numeric);
OSGOOD_DEFINE_ERROR(TailDominance, Numeric);
OSGOOD_DEFINE_ERROR(StepUnderflow, Numeric);

OSGOOD_DEFINE_ERROR(RegimeError, Regime);

#undef OSGOOD_DEFINE_ERROR

}  // namespace osgood
