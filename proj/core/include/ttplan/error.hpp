#pragma once

#include <stdexcept>
#include <string>

namespace ttplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TTPLAN_DEFINE_ERROR(Name)              \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

TTPLAN_DEFINE_ERROR(InvalidParameters);
TTPLAN_DEFINE_ERROR(NoFeasiblePath);
TTPLAN_DEFINE_ERROR(UnknownFlow);
TTPLAN_DEFINE_ERROR(DuplicateFlow);
TTPLAN_DEFINE_ERROR(DuplicateConfiguration);
TTPLAN_DEFINE_ERROR(EmptyGraph);
TTPLAN_DEFINE_ERROR(InstanceTooLarge);
TTPLAN_DEFINE_ERROR(MisalignedActivation);
TTPLAN_DEFINE_ERROR(MalformedInput);
TTPLAN_DEFINE_ERROR(InternalError);

#undef TTPLAN_DEFINE_ERROR

}  // namespace ttplan
