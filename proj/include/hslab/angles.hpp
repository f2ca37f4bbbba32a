#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hslab/brown.hpp"
#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/hs_projection.hpp"
#include "hslab/region.hpp"
#include "hslab/rng.hpp"
#include "hslab/subspace.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

struct AngleReport {
  double alpha = 0.0;      // smallest principal angle
  double cos_alpha = 0.0;  // largest singular value of basis_V* basis_W
  CVector witness_v, witness_w;
  Eigen::Index dim_v = 0, dim_w = 0;
};

namespace detail {

// Deterministic total order on bases: by dimension, then entrywise. Both
// argument orders of principal_angle map to the same computation, so the
// angle is symmetric bit for bit.
inline bool basis_before(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex x = a(i, j), y = b(i, j);
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
  return false;
}

}  // namespace detail

// alpha(V, W) = arccos sup { |<v,w>| : unit v in V, unit w in W }.
inline AngleReport principal_angle(const Subspace& v, const Subspace& w,
                                   const ToleranceConfig& tol = {}) {
  if (v.ambient() != w.ambient())
    throw DomainError("principal_angle: ambient dimensions differ");
  if (v.dim() == 0 || w.dim() == 0)
    throw DomainError("principal_angle: zero subspace has no angle");
  AngleReport rep;
  rep.dim_v = v.dim();
  rep.dim_w = w.dim();
  const bool v_first = detail::basis_before(v.basis, w.basis);
  const Subspace& a = v_first ? v : w;
  const Subspace& b = v_first ? w : v;
  ThinSvd svd = svd_thin(CMatrix(a.basis.adjoint() * b.basis));
  double smax = svd.sigma(0);
  rep.cos_alpha = smax <= tol.angle_zero_tol ? 0.0 : std::min(smax, 1.0);
  rep.alpha = std::acos(rep.cos_alpha);
  CVector wit_a = a.basis * svd.u.col(0);
  CVector wit_b = b.basis * svd.v.col(0);
  rep.witness_v = v_first ? wit_a : wit_b;
  rep.witness_w = v_first ? wit_b : wit_a;
  return rep;
}

// Norm bound for the idempotent with range V, kernel W at angle alpha:
// f(eps) = 1/sqrt(eps(2-eps)), eps = 1 - cos(alpha). Strictly decreasing in
// eps; the bound is attained exactly for complementary subspace pairs.
inline double wermer_bound(double alpha) {
  if (!(alpha > 0) || alpha > M_PI / 2 + 1e-12)
    throw DomainError("wermer_bound: need 0 < alpha <= pi/2");
  double eps = 2.0 * std::pow(std::sin(alpha / 2.0), 2);  // 1 - cos(alpha), stably
  return 1.0 / std::sqrt(eps * (2.0 - eps));
}

struct ObliqueIdempotent {
  CMatrix e;
  double norm_e = 0.0;
  double idem_residual = 0.0;  // ||e^2 - e||
  Eigen::Index range_dim = 0, kernel_dim = 0;
};

// The idempotent with range V and kernel W, for V (+) W = C^n.
inline ObliqueIdempotent oblique_idempotent(const Subspace& v, const Subspace& w,
                                            const ToleranceConfig& tol = {}) {
  const Eigen::Index n = v.ambient();
  if (w.ambient() != n)
    throw DomainError("oblique_idempotent: ambient dimensions differ");
  CMatrix m(n, v.dim() + w.dim());
  m << v.basis, w.basis;
  ThinSvd svd = svd_thin(m);
  Eigen::Index rank = 0;
  double top = svd.sigma.size() ? svd.sigma(0) : 0.0;
  while (rank < svd.sigma.size() && svd.sigma(rank) > tol.rank_rel * top) ++rank;
  if (v.dim() + w.dim() != n || rank < n)
    throw SumNotDirect(int(v.dim() + w.dim() - rank));

  CMatrix rhs(n, n);
  rhs << v.basis, CMatrix::Zero(n, w.dim());
  // e [V W] = [V 0]  =>  e = [V 0] (U S X*)^-1 = [V 0] X S^-1 U*
  CMatrix inv = svd.v * svd.sigma.cwiseInverse().asDiagonal() * svd.u.adjoint();
  ObliqueIdempotent out;
  out.e = rhs * inv;
  out.norm_e = op_norm(out.e);
  out.idem_residual = (out.e * out.e - out.e).norm();
  out.range_dim = v.dim();
  out.kernel_dim = w.dim();
  return out;
}

struct UnzaRow {
  std::string region_key;
  double alpha = 0.0;
  double cos_alpha = 0.0;
  Eigen::Index dim_b = 0, dim_bc = 0;
  bool skipped = false;
};

struct UnzaReport {
  std::vector<UnzaRow> rows;
  double kappa_hat = M_PI / 2;  // min over scanned angles
  int argmin = -1;
  bool nza_flag = true;  // every scanned angle positive at tolerance
  CVector witness_v, witness_w;
};

// Scans alpha(P(t,B), P(t,B^c)) over a family of regions.
inline UnzaReport unza_scan(const CMatrix& t, const std::vector<Region>& family,
                            const ToleranceConfig& tol = {}) {
  SpectralContext ctx = make_context(t, tol);
  UnzaReport rep;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const Region& b = family[idx];
    UnzaRow row;
    row.region_key = b.to_string();
    HSProjection p = hs_algebraic(ctx, b, tol);
    HSProjection pc = hs_algebraic(ctx, Region::complement(b), tol);
    row.dim_b = p.space.dim();
    row.dim_bc = pc.space.dim();
    if (row.dim_b == 0 || row.dim_bc == 0) {
      row.skipped = true;
      rep.rows.push_back(row);
      continue;
    }
    AngleReport ar = principal_angle(p.space, pc.space, tol);
    row.alpha = ar.alpha;
    row.cos_alpha = ar.cos_alpha;
    if (row.alpha <= tol.angle_zero_tol) rep.nza_flag = false;
    if (rep.argmin < 0 || row.alpha < rep.kappa_hat) {
      rep.kappa_hat = row.alpha;
      rep.argmin = int(idx);
      rep.witness_v = ar.witness_v;
      rep.witness_w = ar.witness_w;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// PointSet regions for subsets of the measure's atoms: exhaustive (all proper
// nonempty subsets) up to max_exhaustive atoms, otherwise singletons plus
// seeded random subsets.
inline std::vector<Region> atom_subset_family(const BrownMeasure& mu,
                                              std::size_t n_random = 50,
                                              std::uint64_t seed = 1,
                                              const ToleranceConfig& tol = {}) {
  const std::size_t k = mu.atoms.size();
  std::vector<Region> family;
  if (k < 2) return family;
  auto subset_region = [&](const std::vector<bool>& mask) {
    std::vector<Complex> pts;
    for (std::size_t j = 0; j < k; ++j)
      if (mask[j]) pts.push_back(mu.atoms[j].location);
    return Region::points(std::move(pts), tol.point_match_tol);
  };
  if (k <= tol.max_exhaustive_atoms && k < 63) {
    const std::uint64_t full = (std::uint64_t(1) << k) - 1;
    for (std::uint64_t word = 1; word < full; ++word) {
      std::vector<bool> mask(k, false);
      for (std::size_t j = 0; j < k; ++j) mask[j] = (word >> j) & 1;
      family.push_back(subset_region(mask));
    }
    return family;
  }
  std::vector<std::vector<bool>> masks;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<bool> m(k, false);
    m[j] = true;
    masks.push_back(std::move(m));
  }
  Rng rng(derive_seed(seed, 0x5eb5e7));
  std::size_t added = 0, guard = 0;
  while (added < n_random && guard < 64 * n_random) {
    ++guard;
    std::vector<bool> mask(k, false);
    std::size_t ones = 0;
    for (std::size_t base = 0; base < k; base += 64) {
      const std::uint64_t w = rng.raw();
      const std::size_t hi = std::min<std::size_t>(64, k - base);
      for (std::size_t b = 0; b < hi; ++b)
        if ((w >> b) & 1) {
          mask[base + b] = true;
          ++ones;
        }
    }
    if (ones == 0 || ones == k) continue;
    if (std::find(masks.begin(), masks.end(), mask) != masks.end()) continue;
    masks.push_back(std::move(mask));
    ++added;
  }
  for (const auto& mask : masks) family.push_back(subset_region(mask));
  return family;
}

struct DisjointAngleReport {
  AngleReport angle;
  Eigen::Index dim_1 = 0, dim_2 = 0;
};

// alpha(P(t, f1), P(t, f2)) for regions that split the atoms disjointly.
inline DisjointAngleReport disjoint_closed_angle(const CMatrix& t,
                                                 const Region& f1,
                                                 const Region& f2,
                                                 const ToleranceConfig& tol = {}) {
  SpectralContext ctx = make_context(t, tol);
  for (const auto& atom : ctx.measure.atoms)
    if (f1.contains(atom.location) && f2.contains(atom.location))
      throw DomainError("disjoint_closed_angle: regions share the atom at (" +
                        format_complex(atom.location) + ")");
  HSProjection p1 = hs_algebraic(ctx, f1, tol);
  HSProjection p2 = hs_algebraic(ctx, f2, tol);
  DisjointAngleReport rep;
  rep.dim_1 = p1.space.dim();
  rep.dim_2 = p2.space.dim();
  rep.angle = principal_angle(p1.space, p2.space, tol);
  return rep;
}

}  // namespace hslab
