#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/region.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

// m = u r u* with u unitary and r upper triangular.
struct SchurForm {
  CMatrix u;
  CMatrix r;
  double resid_factor = 0.0;   // ||u r u* - m||_F at construction
  double resid_unitary = 0.0;  // ||u* u - 1||_F at construction
};

inline SchurForm schur(const CMatrix& m, const ToleranceConfig& tol = {}) {
  if (m.rows() != m.cols()) throw DomainError("schur: matrix must be square");
  const Eigen::Index n = m.rows();
  if (!m.allFinite()) throw DomainError("schur: entries must be finite");
  SchurForm out;
  if (n == 0) {
    out.u = CMatrix(0, 0);
    out.r = CMatrix(0, 0);
    return out;
  }
  Eigen::ComplexSchur<CMatrix> cs(m, true);
  if (cs.info() != Eigen::Success)
    throw IterationLimit("schur: QR iteration failed to converge");
  out.u = cs.matrixU();
  out.r = cs.matrixT().triangularView<Eigen::Upper>();
  out.resid_factor = (out.u * out.r * out.u.adjoint() - m).norm();
  out.resid_unitary = (out.u.adjoint() * out.u - cidentity(n)).norm();
  double scale = (1.0 + m.norm()) * double(n);
  if (out.resid_factor > tol.schur_residual_rel * scale * 10 ||
      out.resid_unitary > tol.unitary_residual_rel * double(n) * 100)
    throw IterationLimit("schur: factorization residual above tolerance");
  return out;
}

inline std::vector<Complex> schur_eigenvalues(const SchurForm& s) {
  std::vector<Complex> ev(s.r.rows());
  for (Eigen::Index i = 0; i < s.r.rows(); ++i) ev[std::size_t(i)] = s.r(i, i);
  return ev;
}

struct ReorderedSchur {
  SchurForm form;
  Eigen::Index selected = 0;      // leading block size
  std::vector<int> order;         // order[new position] = original position
};

namespace detail {

// Unitary similarity swapping the diagonal of [[a,b],[0,d]] to [[d,b'],[0,a]].
// Columns/rows j, j+1 of r and columns of u are updated in place.
inline void swap_adjacent(CMatrix& r, CMatrix& u, Eigen::Index j,
                          const ToleranceConfig& tol) {
  const Complex a = r(j, j), b = r(j, j + 1), d = r(j + 1, j + 1);
  const double scale = std::max({std::abs(a), std::abs(d), std::abs(b), 1.0});
  const Complex eps = d - a;
  const double nv = std::hypot(std::abs(b), std::abs(eps));
  if (nv <= 0) return;  // equal eigenvalues, no coupling: nothing to move
  const Complex v1 = b / nv, v2 = eps / nv;
  Eigen::Matrix2cd g;
  g << v1, -std::conj(v2), v2, std::conj(v1);

  r.block(0, j, j + 2, 2) = r.block(0, j, j + 2, 2) * g;
  r.block(j, j, 2, r.cols() - j) = g.adjoint() * r.block(j, j, 2, r.cols() - j);
  u.middleCols(j, 2) = u.middleCols(j, 2) * g;

  const double sep = std::abs(eps) / scale;
  if (std::abs(r(j + 1, j)) > 1e-12 * scale || std::abs(r(j, j) - d) > 1e-8 * scale) {
    if (sep < tol.swap_sep_min) throw SwapFailure(int(j), sep);
    throw SwapFailure(int(j), sep);
  }
  r(j + 1, j) = Complex(0, 0);
}

}  // namespace detail

// Moves the flagged diagonal entries to the leading block, preserving order
// among flagged and among unflagged entries.
inline ReorderedSchur reorder_schur_flags(const SchurForm& s,
                                          std::vector<bool> flags,
                                          const ToleranceConfig& tol = {}) {
  const Eigen::Index n = s.r.rows();
  if (Eigen::Index(flags.size()) != n)
    throw DomainError("reorder_schur: flag count must match dimension");
  ReorderedSchur out;
  out.form.u = s.u;
  out.form.r = s.r;
  out.form.resid_factor = s.resid_factor;
  out.form.resid_unitary = s.resid_unitary;
  out.order.resize(std::size_t(n));
  std::iota(out.order.begin(), out.order.end(), 0);

  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!flags[std::size_t(i)]) continue;
    for (Eigen::Index j = i; j > k; --j) {
      detail::swap_adjacent(out.form.r, out.form.u, j - 1, tol);
      std::swap(out.order[std::size_t(j - 1)], out.order[std::size_t(j)]);
      // flags swap implicitly: positions j-1 (false) and j (true) exchange
    }
    ++k;
  }
  out.selected = k;
  return out;
}

inline ReorderedSchur reorder_schur(const SchurForm& s, const Region& select,
                                    const ToleranceConfig& tol = {}) {
  std::vector<bool> flags(std::size_t(s.r.rows()));
  for (Eigen::Index i = 0; i < s.r.rows(); ++i)
    flags[std::size_t(i)] = select.contains(s.r(i, i));
  return reorder_schur_flags(s, std::move(flags), tol);
}

}  // namespace hslab
