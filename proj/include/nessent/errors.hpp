#pragma once

#include <stdexcept>
#include <string>

namespace nessent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable tag, printed by the CLI on failure.
  virtual const char* kind() const noexcept { return "Error"; }
};

#define NESSENT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* kind() const noexcept override { return #Name; }     \
  };

NESSENT_DEFINE_ERROR(NonConvergence)
NESSENT_DEFINE_ERROR(NotHermitian)
NESSENT_DEFINE_ERROR(Singular)
NESSENT_DEFINE_ERROR(DomainError)
NESSENT_DEFINE_ERROR(SpectrumError)
NESSENT_DEFINE_ERROR(SingularResolvent)
NESSENT_DEFINE_ERROR(ImaginaryResidue)
NESSENT_DEFINE_ERROR(GeometryError)
NESSENT_DEFINE_ERROR(LengthMismatch)
NESSENT_DEFINE_ERROR(ParseError)
NESSENT_DEFINE_ERROR(IoError)

#undef NESSENT_DEFINE_ERROR

}  // namespace nessent
