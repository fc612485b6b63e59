#pragma once

#include <stdexcept>
#include <string>

namespace eigenform {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input shapes (row lengths, index ranges, length mismatches).
struct DimensionError : Error {
  using Error::Error;
};

struct UnknownName : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// A trace produced a coefficient more negative than markov_tol; the trace of
// a Dirichlet form is a Dirichlet form, so this means the linear algebra broke.
struct MarkovViolation : Error {
  using Error::Error;
};

// |Lambda_r(E)| fell at or below image_zero_tol, where the normalized map has
// no continuous extension.
struct DegenerateImage : Error {
  using Error::Error;
};

// Radial projection / ray queries are undefined at the reference point itself.
struct AtCenter : Error {
  using Error::Error;
};

struct ZeroForm : Error {
  using Error::Error;
};

struct NotIrreducible : Error {
  using Error::Error;
};

struct NotInterior : Error {
  using Error::Error;
};

// Denominator of a generalized Rayleigh quotient is singular on the subspace.
struct DenominatorDegenerate : Error {
  using Error::Error;
};

// Kernel contains only constants, so there are no directions to compare on.
struct TrivialKernel : Error {
  using Error::Error;
};

struct NotDegenerateEigenform : Error {
  using Error::Error;
};

struct NotD3 : Error {
  using Error::Error;
};

// Probe rejection sampling exceeded its total draw budget.
struct SamplingExhausted : Error {
  using Error::Error;
};

}  // namespace eigenform
