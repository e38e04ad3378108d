#pragma once

#include <stdexcept>
#include <string>

namespace nlsd {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NLSD_DEFINE_ERROR(Name)         \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

NLSD_DEFINE_ERROR(PoleError);
NLSD_DEFINE_ERROR(DimensionMismatch);
NLSD_DEFINE_ERROR(DivergesAtInfinity);
NLSD_DEFINE_ERROR(ParameterError);
NLSD_DEFINE_ERROR(BoundStateError);
NLSD_DEFINE_ERROR(DegenerateError);
NLSD_DEFINE_ERROR(ParityError);
NLSD_DEFINE_ERROR(AutomorphismError);
NLSD_DEFINE_ERROR(GenericityError);
NLSD_DEFINE_ERROR(CaseMismatch);
NLSD_DEFINE_ERROR(NotPolynomial);
NLSD_DEFINE_ERROR(InfinityCase);
NLSD_DEFINE_ERROR(NotScalar);
NLSD_DEFINE_ERROR(ParseError);

#undef NLSD_DEFINE_ERROR

}  // namespace nlsd
