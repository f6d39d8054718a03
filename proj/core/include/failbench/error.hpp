#pragma once

#include <stdexcept>
#include <string>

namespace failbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FAILBENCH_DEFINE_ERROR(Name)     \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

FAILBENCH_DEFINE_ERROR(InvalidArgument);
FAILBENCH_DEFINE_ERROR(NonFinite);
FAILBENCH_DEFINE_ERROR(CrashDetected);
FAILBENCH_DEFINE_ERROR(NoTrimFound);
FAILBENCH_DEFINE_ERROR(AirspeedTooLow);
FAILBENCH_DEFINE_ERROR(NumericalBreakdown);
FAILBENCH_DEFINE_ERROR(InvalidProbability);
FAILBENCH_DEFINE_ERROR(DegeneratePlan);
FAILBENCH_DEFINE_ERROR(EmptyInput);
FAILBENCH_DEFINE_ERROR(ConfigError);

#undef FAILBENCH_DEFINE_ERROR

}  // namespace failbench
