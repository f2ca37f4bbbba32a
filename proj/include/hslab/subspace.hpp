#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

// Orthonormal basis for the column space; rank from the single rank_rel cut.
inline CMatrix orthonormalize(const CMatrix& m, const ToleranceConfig& tol = {}) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  ThinSvd svd = svd_thin(m);
  const double top = svd.sigma.size() ? svd.sigma(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < svd.sigma.size() && svd.sigma(rank) > tol.rank_rel * top) ++rank;
  if (top == 0.0) rank = 0;
  return svd.u.leftCols(rank);
}

// A linear subspace of C^n carried as an orthonormal basis (n x k).
struct Subspace {
  CMatrix basis;

  Eigen::Index ambient() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }

  static Subspace from_columns(const CMatrix& m, const ToleranceConfig& tol = {}) {
    return Subspace{orthonormalize(m, tol)};
  }
  static Subspace zero(Eigen::Index n) { return Subspace{CMatrix(n, 0)}; }
  static Subspace full(Eigen::Index n) { return Subspace{cidentity(n)}; }
};

inline Subspace subspace_sum(const Subspace& a, const Subspace& b,
                             const ToleranceConfig& tol = {}) {
  if (a.ambient() != b.ambient())
    throw DomainError("subspace_sum: ambient dimensions differ");
  CMatrix cat(a.ambient(), a.dim() + b.dim());
  cat << a.basis, b.basis;
  return Subspace::from_columns(cat, tol);
}

// Intersection from the singular structure of basis_a* basis_b: directions
// with singular value within rank_rel of 1 are common to both spaces.
inline Subspace subspace_intersect(const Subspace& a, const Subspace& b,
                                   const ToleranceConfig& tol = {}) {
  if (a.ambient() != b.ambient())
    throw DomainError("subspace_intersect: ambient dimensions differ");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient());
  ThinSvd svd = svd_thin(CMatrix(a.basis.adjoint() * b.basis));
  Eigen::Index k = 0;
  while (k < svd.sigma.size() && svd.sigma(k) >= 1.0 - tol.rank_rel) ++k;
  if (k == 0) return Subspace::zero(a.ambient());
  return Subspace::from_columns(a.basis * svd.u.leftCols(k), tol);
}

// Orthogonal complement.
inline Subspace subspace_complement(const Subspace& a) {
  const Eigen::Index n = a.ambient(), k = a.dim();
  if (k == 0) return Subspace::full(n);
  if (k == n) return Subspace::zero(n);
  Eigen::HouseholderQR<CMatrix> qr(a.basis);
  CMatrix q = qr.householderQ() * cidentity(n);
  return Subspace{q.rightCols(n - k)};
}

// ||(1 - P_b) basis_a||_op: zero iff a is contained in b.
inline double containment_residual(const Subspace& a, const Subspace& b) {
  if (a.dim() == 0) return 0.0;
  CMatrix proj = a.basis - b.basis * (b.basis.adjoint() * a.basis);
  return op_norm(proj);
}

// Largest principal angle between equal-dimensional subspaces (their gap);
// zero-dimensional pairs agree trivially.
inline double subspace_gap_angle(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim())
    throw DomainError("subspace_gap_angle: dimensions differ");
  if (a.dim() == 0) return 0.0;
  RVector s = svd_values(CMatrix(a.basis.adjoint() * b.basis));
  double smin = s(s.size() - 1);
  smin = std::min(1.0, std::max(-1.0, smin));
  return std::acos(smin);
}

}  // namespace hslab
