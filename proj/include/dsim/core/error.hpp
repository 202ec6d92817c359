#pragma once

#include <stdexcept>
#include <string>

namespace dsim {

/// Base for all simulator errors; `what()` carries a human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DSIM_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

DSIM_DEFINE_ERROR(PastEvent)
DSIM_DEFINE_ERROR(EngineBusy)
DSIM_DEFINE_ERROR(LinkBusy)
DSIM_DEFINE_ERROR(BadRange)
DSIM_DEFINE_ERROR(BadPacket)
DSIM_DEFINE_ERROR(ClockRegression)
DSIM_DEFINE_ERROR(UnmappedDscp)
DSIM_DEFINE_ERROR(EmptyQueue)
DSIM_DEFINE_ERROR(BadParam)
DSIM_DEFINE_ERROR(NegativeDelay)
DSIM_DEFINE_ERROR(EmptyStats)
DSIM_DEFINE_ERROR(Infeasible)
DSIM_DEFINE_ERROR(InvariantViolation)

#undef DSIM_DEFINE_ERROR

/// Invalid scenario configuration. Kept separate from runtime errors so the
/// CLI can map it to its own exit code.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsim
