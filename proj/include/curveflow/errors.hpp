#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

/// Base of every error raised by the library. Each subclass names one
/// failure mode so callers (the flow loop, the CLI) can map it to an outcome.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

#define CURVEFLOW_DEFINE_ERROR(Name)                          \
  class Name : public Error {                                 \
   public:                                                    \
    using Error::Error;                                       \
    const char* kind() const noexcept override { return #Name; } \
  };

CURVEFLOW_DEFINE_ERROR(ConvexityLost)
CURVEFLOW_DEFINE_ERROR(ClosingConditionViolated)
CURVEFLOW_DEFINE_ERROR(InvalidGeometry)
CURVEFLOW_DEFINE_ERROR(InvalidGrid)
CURVEFLOW_DEFINE_ERROR(InvalidParams)
CURVEFLOW_DEFINE_ERROR(EvalDomain)
CURVEFLOW_DEFINE_ERROR(NumericalBlowup)
CURVEFLOW_DEFINE_ERROR(InvalidMonitorParams)
CURVEFLOW_DEFINE_ERROR(InsufficientData)
CURVEFLOW_DEFINE_ERROR(NotConvex)
CURVEFLOW_DEFINE_ERROR(ConfigError)

#undef CURVEFLOW_DEFINE_ERROR

}  // namespace curveflow
