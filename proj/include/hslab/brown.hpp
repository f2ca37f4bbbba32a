#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/region.hpp"
#include "hslab/schur.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

struct BrownAtom {
  Complex location;   // cluster centroid
  int multiplicity;   // algebraic multiplicity of the cluster
  double weight;      // multiplicity / n, exactly
};

// Normalized eigenvalue counting measure after clustering.
struct BrownMeasure {
  std::vector<BrownAtom> atoms;
  Eigen::Index n = 0;

  double total_weight() const {
    double s = 0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace detail

// Everything downstream of one Schur factorization: the measure's atoms and
// the cluster id of every diagonal position.
struct SpectralContext {
  CMatrix t;
  SchurForm sf;
  BrownMeasure measure;
  std::vector<int> atom_of;  // diagonal position -> atom index
  double cluster_tol = 0.0;
  double t_norm = 0.0;
};

inline SpectralContext make_context(const CMatrix& t,
                                    const ToleranceConfig& tol = {}) {
  SpectralContext ctx;
  ctx.t = t;
  ctx.sf = schur(t, tol);
  ctx.t_norm = op_norm(t);
  ctx.cluster_tol = tol.cluster_rel * (1.0 + ctx.t_norm);
  const Eigen::Index n = t.rows();
  ctx.measure.n = n;
  std::vector<Complex> ev = schur_eigenvalues(ctx.sf);

  detail::UnionFind uf{std::size_t(n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(ev[std::size_t(i)] - ev[std::size_t(j)]) <= ctx.cluster_tol)
        uf.unite(int(i), int(j));

  std::vector<int> root_to_atom(std::size_t(n), -1);
  std::vector<std::vector<int>> members;
  for (Eigen::Index i = 0; i < n; ++i) {
    int r = uf.find(int(i));
    if (root_to_atom[std::size_t(r)] < 0) {
      root_to_atom[std::size_t(r)] = int(members.size());
      members.emplace_back();
    }
    members[std::size_t(root_to_atom[std::size_t(r)])].push_back(int(i));
  }

  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  auto centroid = [&](std::size_t m) {
    Complex c(0, 0);
    for (int i : members[m]) c += ev[std::size_t(i)];
    return c / double(members[m].size());
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    Complex ca = centroid(a), cb = centroid(b);
    return ca.real() != cb.real() ? ca.real() < cb.real() : ca.imag() < cb.imag();
  });

  ctx.atom_of.assign(std::size_t(n), -1);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& mem = members[order[rank]];
    BrownAtom atom;
    atom.location = centroid(order[rank]);
    atom.multiplicity = int(mem.size());
    atom.weight = double(mem.size()) / double(n);
    ctx.measure.atoms.push_back(atom);
    for (int i : mem) ctx.atom_of[std::size_t(i)] = int(rank);
  }
  return ctx;
}

inline BrownMeasure brown_measure(const CMatrix& t,
                                  const ToleranceConfig& tol = {}) {
  return make_context(t, tol).measure;
}

// Same a+bi style Region::describe uses for PointSet entries.
inline std::string format_complex(Complex z) {
  std::string s = detail::fmt_num(z.real());
  if (z.imag() != 0)
    s += (z.imag() > 0 ? "+" : "") + detail::fmt_num(z.imag()) + "i";
  return s;
}

// Mass of the region under the measure. PointSet boundaries carry an
// ambiguity band: atoms inside it make the answer ill-posed.
inline double region_mass(const BrownMeasure& mu, const Region& b,
                          const ToleranceConfig& tol = {}) {
  double mass = 0;
  for (const auto& atom : mu.atoms) {
    if (b.point_boundary_ambiguous(atom.location, tol.boundary_guard_rel))
      throw BoundaryAmbiguity("region_mass: atom at (" +
                              format_complex(atom.location) +
                              ") sits on a PointSet matching boundary");
    if (b.contains(atom.location)) mass += atom.weight;
  }
  return mass;
}

inline double spectral_radius(const CMatrix& t, const ToleranceConfig& tol = {}) {
  SchurForm sf = schur(t, tol);
  double r = 0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    r = std::max(r, std::abs(sf.r(i, i)));
  return r;
}

inline bool is_quasinilpotent(const CMatrix& t, double tol_abs,
                              const ToleranceConfig& tol = {}) {
  return spectral_radius(t, tol) <= tol_abs;
}

// A_n = |t^n|^(1/n), with overflow handled by rescaling during the repeated
// squaring; log_scale records the factor taken out of t^n.
struct PowerLimit {
  CMatrix a;
  int n = 0;
  bool rescaled = false;
  double log_scale = 0.0;  // t^n = exp(log_scale) * (stored scaled power)
};

namespace detail {

struct ScaledPower {
  CMatrix m;
  double log_scale = 0.0;
  void normalize() {
    double f = m.norm();
    if (f > 0 && std::isfinite(f)) {
      m /= f;
      log_scale += std::log(f);
    }
  }
};

inline ScaledPower scaled_matrix_power(const CMatrix& t, long n) {
  ScaledPower result{cidentity(t.rows()), 0.0};
  ScaledPower base{t, 0.0};
  base.normalize();
  long e = n;
  while (e > 0) {
    if (e & 1) {
      result.m = result.m * base.m;
      result.log_scale += base.log_scale;
      result.normalize();
    }
    e >>= 1;
    if (e) {
      base.m = base.m * base.m;
      base.log_scale *= 2;
      base.normalize();
    }
  }
  return result;
}

}  // namespace detail

inline PowerLimit power_limit(const CMatrix& t, int n,
                              const ToleranceConfig& tol = {}) {
  if (t.rows() != t.cols()) throw DomainError("power_limit: matrix must be square");
  if (n < 1) throw DomainError("power_limit: n must be >= 1");
  detail::ScaledPower p = detail::scaled_matrix_power(t, n);
  PowerLimit out;
  out.n = n;
  out.log_scale = p.log_scale;
  out.rescaled = p.log_scale != 0.0;
  if (p.m.norm() == 0.0) {
    out.a = CMatrix::Zero(t.rows(), t.cols());
    return out;
  }
  ThinSvd svd = svd_thin(p.m);
  RVector lam(svd.sigma.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double s = svd.sigma(i);
    lam(i) = s > 0 ? std::exp((std::log(s) + p.log_scale) / double(n)) : 0.0;
  }
  out.a = svd.v * lam.asDiagonal() * svd.v.adjoint();
  (void)tol;
  return out;
}

}  // namespace hslab
