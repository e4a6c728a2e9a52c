#pragma once

#include <stdexcept>
#include <string>

namespace rppg {

// Base of every error raised by the library. Each subclass names one failure
// category so batch drivers can record it without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define RPPG_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                           \
   public:                                                              \
    using Error::Error;                                                 \
    const char* kind() const noexcept override { return #Name; }        \
  };

RPPG_DEFINE_ERROR(PreconditionError)
RPPG_DEFINE_ERROR(RegionError)
RPPG_DEFINE_ERROR(FormatError)
RPPG_DEFINE_ERROR(DegenerateSignalError)
RPPG_DEFINE_ERROR(WindowError)
RPPG_DEFINE_ERROR(ResampleError)
RPPG_DEFINE_ERROR(BandError)
RPPG_DEFINE_ERROR(LabelError)
RPPG_DEFINE_ERROR(SampleError)
RPPG_DEFINE_ERROR(DataError)
RPPG_DEFINE_ERROR(EmptyPoolError)
RPPG_DEFINE_ERROR(InsufficientPoolError)
RPPG_DEFINE_ERROR(ParamError)
RPPG_DEFINE_ERROR(SaturationError)
RPPG_DEFINE_ERROR(MotionError)
RPPG_DEFINE_ERROR(IoError)
RPPG_DEFINE_ERROR(ConfigError)

#undef RPPG_DEFINE_ERROR

// Fixed-point ICA did not settle. Carries the iteration trace so callers can
// tell slow convergence from oscillation.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_change)
      : Error(what), iterations_(iterations), last_change_(last_change) {}
  const char* kind() const noexcept override { return "ConvergenceError"; }
  int iterations() const noexcept { return iterations_; }
  double last_change() const noexcept { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

}  // namespace rppg
