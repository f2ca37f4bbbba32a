#pragma once

#include <stdexcept>
#include <string>

namespace hslab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (zero subspace, non-Hermitian input, ...).
struct DomainError : Error {
  using Error::Error;
};

// Iterative factorization failed to converge.
struct IterationLimit : Error {
  using Error::Error;
};

// An adjacent Schur swap was too ill-conditioned to perform.
struct SwapFailure : Error {
  int index;
  double separation;
  SwapFailure(int idx, double sep)
      : Error("schur swap at position " + std::to_string(idx) +
              " ill-conditioned (separation " + std::to_string(sep) + ")"),
        index(idx), separation(sep) {}
};

// No radial spectral gap at the requested split radius.
struct NoSpectralGap : Error {
  using Error::Error;
};

// Two subspaces fail to span a direct-sum decomposition.
struct SumNotDirect : Error {
  int intersection_dim;
  SumNotDirect(int k)
      : Error("subspace sum is not direct (intersection dimension " +
              std::to_string(k) + ")"),
        intersection_dim(k) {}
};

// An atom sits on a region boundary at matching tolerance.
struct BoundaryAmbiguity : Error {
  using Error::Error;
};

// A spectral-measure table cannot produce an invertible metric operator.
struct DegenerateMeasure : Error {
  using Error::Error;
};

// Malformed region expression / config / matrix file.
struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  explicit ParseError(const std::string& what) : Error(what), position(0) {}
};

}  // namespace hslab
