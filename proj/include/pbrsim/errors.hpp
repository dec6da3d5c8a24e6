#pragma once

#include <stdexcept>
#include <string>

namespace pbrsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PBRSIM_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

PBRSIM_DEFINE_ERROR(NormalizationError);
PBRSIM_DEFINE_ERROR(UnitarityError);
PBRSIM_DEFINE_ERROR(IndexError);
PBRSIM_DEFINE_ERROR(ChannelError);
PBRSIM_DEFINE_ERROR(KindError);
PBRSIM_DEFINE_ERROR(RangeError);
PBRSIM_DEFINE_ERROR(FormatError);
PBRSIM_DEFINE_ERROR(ValidationError);
PBRSIM_DEFINE_ERROR(CalibrationError);
PBRSIM_DEFINE_ERROR(NoSolutionError);
PBRSIM_DEFINE_ERROR(ProtocolError);
PBRSIM_DEFINE_ERROR(PathError);
PBRSIM_DEFINE_ERROR(CapError);

#undef PBRSIM_DEFINE_ERROR

}  // namespace pbrsim
