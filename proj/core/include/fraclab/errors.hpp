#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Base of every error raised by the toolkit. Callers that only need to map
/// failures onto exit codes can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FRACLAB_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

FRACLAB_DEFINE_ERROR(ArgumentError)
FRACLAB_DEFINE_ERROR(ParseError)
FRACLAB_DEFINE_ERROR(OverlapError)
FRACLAB_DEFINE_ERROR(DegenerateError)
FRACLAB_DEFINE_ERROR(NoBoundaryError)
FRACLAB_DEFINE_ERROR(SingularGradientError)
FRACLAB_DEFINE_ERROR(CoincidentPointsError)
FRACLAB_DEFINE_ERROR(DimensionMismatchError)
FRACLAB_DEFINE_ERROR(RangeError)
FRACLAB_DEFINE_ERROR(QuadratureError)
FRACLAB_DEFINE_ERROR(ToleranceError)
FRACLAB_DEFINE_ERROR(NotPositiveDefiniteError)
FRACLAB_DEFINE_ERROR(ConvergenceError)
FRACLAB_DEFINE_ERROR(AsymmetricMeshError)
FRACLAB_DEFINE_ERROR(SupercriticalError)
FRACLAB_DEFINE_ERROR(WindowError)
FRACLAB_DEFINE_ERROR(SupportError)
FRACLAB_DEFINE_ERROR(DomainCollisionError)

#undef FRACLAB_DEFINE_ERROR

}  // namespace fraclab
