#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hslab/errors.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Complex = std::complex<double>;

struct ThinSvd {
  CMatrix u;
  RVector sigma;  // descending
  CMatrix v;
};

// Jacobi for small sizes, divide-and-conquer above; both are deterministic.
inline ThinSvd svd_thin(const CMatrix& m) {
  ThinSvd out;
  if (m.rows() == 0 || m.cols() == 0) {
    out.u = CMatrix(m.rows(), 0);
    out.sigma = RVector(0);
    out.v = CMatrix(m.cols(), 0);
    return out;
  }
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  }
  return out;
}

inline RVector svd_values(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return RVector(0);
  if (m.rows() <= 64 && m.cols() <= 64)
    return Eigen::JacobiSVD<CMatrix>(m).singularValues();
  return Eigen::BDCSVD<CMatrix>(m).singularValues();
}

// Largest singular value.
inline double op_norm(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  RVector s = svd_values(m);
  return s.size() ? s(0) : 0.0;
}

// Normalized Hilbert-Schmidt norm: sqrt(tr(m* m) / n).
inline double tr2_norm(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.norm() / std::sqrt(double(m.rows()));
}

inline bool is_hermitian(const CMatrix& h, double rel) {
  double scale = h.norm();
  return (h - h.adjoint()).norm() <= rel * (scale > 0 ? scale : 1.0) * 10.0;
}

// |m| = (m* m)^(1/2), via SVD: m = u s v*  =>  |m| = v s v*.
inline CMatrix abs_op(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("abs_op: matrix must be square");
  ThinSvd svd = svd_thin(m);
  return svd.v * svd.sigma.asDiagonal() * svd.v.adjoint();
}

// h^p for Hermitian PSD h (tiny negative eigenvalues clamp to zero).
inline CMatrix herm_power(const CMatrix& h, double p,
                          const ToleranceConfig& tol = {}) {
  if (h.rows() != h.cols()) throw DomainError("herm_power: matrix must be square");
  if (!is_hermitian(h, tol.herm_rel))
    throw DomainError("herm_power: input is not Hermitian at tolerance");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw IterationLimit("herm_power: eigensolver failed to converge");
  RVector lam = es.eigenvalues();
  double top = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
  RVector lp(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double x = lam(i);
    if (x < 0) {
      if (x < -tol.psd_clamp_rel * (top > 0 ? top : 1.0))
        throw DomainError("herm_power: input is not positive semidefinite");
      x = 0.0;
    }
    lp(i) = (x == 0.0 && p <= 0) ? 0.0 : std::pow(x, p);
  }
  return es.eigenvectors() * lp.asDiagonal() * es.eigenvectors().adjoint();
}

// Eigen-decomposition of a Hermitian matrix (ascending eigenvalues).
struct HermEig {
  RVector lambda;
  CMatrix vectors;
};

inline HermEig herm_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw IterationLimit("herm_eig: eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline CMatrix cidentity(Eigen::Index n) { return CMatrix::Identity(n, n); }

}  // namespace hslab
