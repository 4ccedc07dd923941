// errors.hpp — error hierarchy shared by all fibosc modules

#pragma once

#include <stdexcept>
#include <string>

namespace fibosc {

// Broad class used by the CLI to map failures onto exit codes:
// validation errors exit 2, numerical failures exit 3.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

#define FIBOSC_DEFINE_ERROR(NAME, KIND)                                                   \
    class NAME : public Error {                                                           \
      public:                                                                             \
        explicit NAME(const std::string& what) : Error(ErrorKind::KIND, #NAME ": " + what) {} \
    }

FIBOSC_DEFINE_ERROR(DegenerateParams, validation);
FIBOSC_DEFINE_ERROR(RegionViolation, validation);
FIBOSC_DEFINE_ERROR(IndexError, validation);
FIBOSC_DEFINE_ERROR(InvalidPair, validation);
FIBOSC_DEFINE_ERROR(DimensionMismatch, validation);
FIBOSC_DEFINE_ERROR(UnknownFrequency, validation);
FIBOSC_DEFINE_ERROR(DegenerateFrequency, validation);
FIBOSC_DEFINE_ERROR(NegativeEigenvalue, validation);
FIBOSC_DEFINE_ERROR(NonDiagonalInvariant, validation);

FIBOSC_DEFINE_ERROR(OverflowError, numerical);
FIBOSC_DEFINE_ERROR(TruncationTooSmall, numerical);
FIBOSC_DEFINE_ERROR(NoConvergence, numerical);
FIBOSC_DEFINE_ERROR(StabilityViolation, numerical);
FIBOSC_DEFINE_ERROR(TruncationLeak, numerical);
FIBOSC_DEFINE_ERROR(InsufficientDecay, numerical);

#undef FIBOSC_DEFINE_ERROR

} // namespace fibosc
