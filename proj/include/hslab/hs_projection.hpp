#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hslab/brown.hpp"
#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/region.hpp"
#include "hslab/rng.hpp"
#include "hslab/schur.hpp"
#include "hslab/subspace.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

struct HSProjection {
  Subspace space;
  Region region = Region::all();
  double trace = 0.0;  // dim / n, exact rational as a double
  std::string method;  // "algebraic", "power_limit", "join", "meet", "joint"
  double invariance_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<Complex> boundary_atoms;  // atoms within cluster_tol of the boundary
};

inline double invariance_residual_of(const CMatrix& t, const Subspace& v) {
  if (v.dim() == 0 || v.dim() == v.ambient()) return 0.0;
  CMatrix tb = t * v.basis;
  return op_norm(CMatrix(tb - v.basis * (v.basis.adjoint() * tb)));
}

// Span of the generalized eigenspaces of the selected atoms, via Schur
// reordering; the workhorse behind every algebraic-route projection.
inline HSProjection hs_from_atom_mask(const SpectralContext& ctx,
                                      const std::vector<bool>& atom_in,
                                      const ToleranceConfig& tol = {}) {
  if (atom_in.size() != ctx.measure.atoms.size())
    throw DomainError("hs_from_atom_mask: mask size must match atom count");
  const Eigen::Index n = ctx.t.rows();
  HSProjection out;
  out.method = "algebraic";
  std::vector<bool> flags(std::size_t(n), false);
  for (Eigen::Index i = 0; i < n; ++i)
    flags[std::size_t(i)] = atom_in[std::size_t(ctx.atom_of[std::size_t(i)])];
  ReorderedSchur rs = reorder_schur_flags(ctx.sf, std::move(flags), tol);
  out.space = Subspace{rs.form.u.leftCols(rs.selected)};
  out.trace = double(rs.selected) / double(n);
  out.invariance_residual = invariance_residual_of(ctx.t, out.space);
  return out;
}

// T-invariant subspace carrying exactly the part of the measure inside b:
// cluster membership is decided at atom level, then the Schur form is
// reordered so the selected generalized eigenspaces span the leading block.
inline HSProjection hs_algebraic(const SpectralContext& ctx, const Region& b,
                                 const ToleranceConfig& tol = {}) {
  std::vector<bool> atom_in(ctx.measure.atoms.size());
  std::vector<Complex> warn;
  for (std::size_t j = 0; j < ctx.measure.atoms.size(); ++j) {
    const Complex loc = ctx.measure.atoms[j].location;
    atom_in[j] = b.contains(loc);
    if (b.near_boundary(loc, ctx.cluster_tol)) warn.push_back(loc);
  }
  HSProjection out = hs_from_atom_mask(ctx, atom_in, tol);
  out.region = b;
  out.boundary_atoms = std::move(warn);
  return out;
}

inline HSProjection hs_algebraic(const CMatrix& t, const Region& b,
                                 const ToleranceConfig& tol = {}) {
  return hs_algebraic(make_context(t, tol), b, tol);
}

// Power-limit route: spectral projection of A_n = |t^n|^(1/n) onto [0, r],
// at the largest power-of-two n <= n_max whose dynamic range is resolvable in
// double precision (rounding noise in t^n must stay below r^n).
inline HSProjection hs_power_limit(const CMatrix& t, double r, int n_max,
                                   const ToleranceConfig& tol = {}) {
  if (t.rows() != t.cols())
    throw DomainError("hs_power_limit: matrix must be square");
  if (!(r > 0)) throw DomainError("hs_power_limit: r must be > 0");
  if (n_max < 1) throw DomainError("hs_power_limit: n_max must be >= 1");
  const Eigen::Index dim = t.rows();
  const double log_r = std::log(r);
  const double log_eps = std::log(tol.power_feas_eps);
  const double log_frac = std::log(tol.power_feas_frac);

  detail::ScaledPower cur{t, 0.0};
  cur.normalize();
  int n = 1;
  detail::ScaledPower best = cur;
  int best_n = 0;
  auto feasible = [&](const detail::ScaledPower& p, int nn) {
    if (p.m.norm() == 0.0) return true;  // nilpotent: exact zero power
    double log_top = p.log_scale + std::log(op_norm(p.m));
    return (log_eps + log_top) / double(nn) < log_r + log_frac;
  };
  if (feasible(cur, 1)) best_n = 1;
  while (2 * n <= n_max) {
    detail::ScaledPower next{CMatrix(cur.m * cur.m), 2 * cur.log_scale};
    next.normalize();
    n *= 2;
    cur = next;
    if (feasible(cur, n)) {
      best = cur;
      best_n = n;
    }
  }
  if (best_n == 0)
    throw DomainError("hs_power_limit: r is below the resolvable scale of t");

  HSProjection out;
  out.region = Region::annulus(0.0, r, true);
  out.method = "power_limit";

  RVector log_lam;
  CMatrix vectors;
  if (best.m.norm() == 0.0) {
    log_lam = RVector::Constant(dim, -std::numeric_limits<double>::infinity());
    vectors = cidentity(dim);
  } else {
    ThinSvd svd = svd_thin(best.m);
    log_lam.resize(dim);
    vectors = svd.v;
    for (Eigen::Index i = 0; i < dim; ++i) {
      double s = i < svd.sigma.size() ? svd.sigma(i) : 0.0;
      log_lam(i) = s > 0
                       ? (std::log(s) + best.log_scale) / double(best_n)
                       : -std::numeric_limits<double>::infinity();
    }
  }
  // noise floor of the computed power, in A_n eigenvalue units
  double log_top = log_lam.size() ? log_lam(0) : log_r;
  double floor_lam = (log_eps + double(best_n) * log_top) / double(best_n);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double g = log_lam(i) - log_r;
    bool resolvable = log_lam(i) > floor_lam + tol.power_gap_min;
    if (resolvable && std::abs(g) < tol.power_gap_min)
      throw NoSpectralGap("hs_power_limit: eigenvalue of A_n within gap band of r");
  }
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (log_lam(i) <= log_r) inside.push_back(i);
  CMatrix basis(dim, Eigen::Index(inside.size()));
  for (std::size_t j = 0; j < inside.size(); ++j)
    basis.col(Eigen::Index(j)) = vectors.col(inside[j]);
  out.space = Subspace{basis};
  out.trace = double(inside.size()) / double(dim);
  out.invariance_residual = invariance_residual_of(t, out.space);
  return out;
}

struct GrowthRow {
  int sample = 0;
  bool in_range = false;
  double estimate = 0.0;  // ||t^n xi||^(1/n), or backward-orbit analogue
  double recovery = 0.0;  // co-disk: alignment error of t^n eta_n vs xi
  bool pass = false;
};

struct GrowthReport {
  double r = 0.0;
  bool disk_side = true;
  std::vector<GrowthRow> rows;
  bool all_pass = true;
};

// Vector-growth cross-check of an HS projection whose region is a disk
// annulus(0,r) or a co-disk annulus(r,inf).
inline GrowthReport growth_validate(const CMatrix& t, const HSProjection& p,
                                    int samples, std::uint64_t seed = 1,
                                    const ToleranceConfig& tol = {}) {
  const Region::Annulus* an = p.region.as_annulus();
  if (!an) throw DomainError("growth_validate: region must be an annulus");
  const bool disk_side = an->r == 0.0 && std::isfinite(an->s);
  const bool codisk_side = an->r > 0.0 && std::isinf(an->s);
  if (!disk_side && !codisk_side)
    throw DomainError("growth_validate: region must be annulus(0,r) or annulus(r,inf)");
  const double r = disk_side ? an->s : an->r;
  if (!(r > 0)) throw DomainError("growth_validate: split radius must be > 0");

  GrowthReport rep;
  rep.r = r;
  rep.disk_side = disk_side;
  const Eigen::Index n = t.rows();
  const int steps = tol.growth_n_max;
  Rng rng(derive_seed(seed, 0xA11CE));

  auto random_unit_in = [&](const Subspace& v) {
    CVector c(v.dim());
    for (Eigen::Index i = 0; i < v.dim(); ++i) c(i) = rng.cgaussian();
    CVector x = v.basis * c;
    return CVector(x / x.norm());
  };
  auto forward_log_growth = [&](CVector x) {
    double lsum = 0;
    for (int j = 0; j < steps; ++j) {
      x = t * x;
      double nn = x.norm();
      if (nn == 0) return -std::numeric_limits<double>::infinity();
      lsum += std::log(nn);
      x /= nn;
    }
    return lsum / double(steps);
  };

  if (disk_side) {
    for (int s = 0; s < samples; ++s) {
      GrowthRow row;
      row.sample = s;
      row.in_range = true;
      if (p.space.dim() == 0) break;
      double est = std::exp(forward_log_growth(random_unit_in(p.space)));
      row.estimate = est;
      row.pass = est <= r * (1.0 + tol.growth_rel_slack);
      rep.rows.push_back(row);
    }
    if (p.space.dim() < n) {
      for (int s = 0; s < samples; ++s) {
        GrowthRow row;
        row.sample = s;
        row.in_range = false;
        CVector x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.cgaussian();
        x /= x.norm();
        row.estimate = std::exp(forward_log_growth(x));
        row.pass = row.estimate > r * (1.0 + tol.growth_rel_gap);
        rep.rows.push_back(row);
      }
    }
  } else {
    if (p.space.dim() > 0) {
      CMatrix c = p.space.basis.adjoint() * t * p.space.basis;
      Eigen::PartialPivLU<CMatrix> lu(c);
      for (int s = 0; s < samples; ++s) {
        GrowthRow row;
        row.sample = s;
        row.in_range = true;
        CVector xi_hat(p.space.dim());
        for (Eigen::Index i = 0; i < p.space.dim(); ++i) xi_hat(i) = rng.cgaussian();
        xi_hat /= xi_hat.norm();
        // backward orbit eta_n = C^{-n} xi, normalized with log bookkeeping
        CVector y = xi_hat;
        double lsum = 0;
        for (int j = 0; j < steps; ++j) {
          y = lu.solve(y);
          double nn = y.norm();
          lsum += std::log(nn);
          y /= nn;
        }
        row.estimate = std::exp(lsum / double(steps));  // ~ ||eta_n||^(1/n)
        // forward recovery: t^n (B y) should re-align with B xi_hat
        CVector w = p.space.basis * y;
        for (int j = 0; j < steps; ++j) {
          w = t * w;
          w /= w.norm();
        }
        CVector target = p.space.basis * xi_hat;
        row.recovery = 1.0 - std::abs(w.dot(target));
        row.pass = row.estimate <= (1.0 / r) * (1.0 + tol.growth_rel_slack) &&
                   row.recovery <= 1e-6;
        rep.rows.push_back(row);
      }
    }
  }
  for (const auto& row : rep.rows) rep.all_pass = rep.all_pass && row.pass;
  return rep;
}

inline HSProjection hs_join(const std::vector<HSProjection>& ps,
                            const ToleranceConfig& tol = {}) {
  if (ps.empty()) throw DomainError("hs_join: empty input");
  HSProjection out;
  out.method = "join";
  Subspace acc = ps[0].space;
  Region reg = ps[0].region;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    if (ps[i].space.ambient() != acc.ambient())
      throw DomainError("hs_join: projections from different ambient spaces");
    acc = subspace_sum(acc, ps[i].space, tol);
    reg = Region::union_of(reg, ps[i].region);
  }
  out.space = acc;
  out.region = reg;
  out.trace = double(acc.dim()) / double(acc.ambient());
  return out;
}

inline HSProjection hs_meet(const std::vector<HSProjection>& ps,
                            const ToleranceConfig& tol = {}) {
  if (ps.empty()) throw DomainError("hs_meet: empty input");
  HSProjection out;
  out.method = "meet";
  Subspace acc = ps[0].space;
  Region reg = ps[0].region;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    if (ps[i].space.ambient() != acc.ambient())
      throw DomainError("hs_meet: projections from different ambient spaces");
    acc = subspace_intersect(acc, ps[i].space, tol);
    reg = Region::intersection(reg, ps[i].region);
  }
  out.space = acc;
  out.region = reg;
  out.trace = double(acc.dim()) / double(acc.ambient());
  return out;
}

struct SimilarityReport {
  double cond_a = 0.0;
  double angle = 0.0;  // gap angle between hs(a t a^-1, b) and a * hs(t, b)
  double threshold = 0.0;
  bool pass = false;
  HSProjection conjugated;
};

inline SimilarityReport hs_similarity(const CMatrix& t, const CMatrix& a,
                                      const Region& b,
                                      const ToleranceConfig& tol = {}) {
  if (a.rows() != a.cols() || a.rows() != t.rows())
    throw DomainError("hs_similarity: dimension mismatch");
  RVector sv = svd_values(a);
  if (sv(sv.size() - 1) <= tol.rank_rel * sv(0))
    throw DomainError("hs_similarity: a is numerically singular");
  SimilarityReport rep;
  rep.cond_a = sv(0) / sv(sv.size() - 1);
  Eigen::PartialPivLU<CMatrix> lu(a);
  CMatrix conj = a * t * lu.inverse();
  HSProjection pt = hs_algebraic(t, b, tol);
  rep.conjugated = hs_algebraic(conj, b, tol);
  Subspace image = Subspace::from_columns(a * pt.space.basis, tol);
  rep.threshold = tol.similarity_angle_factor * rep.cond_a;
  if (image.dim() != rep.conjugated.space.dim()) {
    rep.angle = M_PI / 2;
    rep.pass = false;
  } else {
    rep.angle = subspace_gap_angle(rep.conjugated.space, image);
    rep.pass = rep.angle <= rep.threshold;
  }
  return rep;
}

// P((s,t), b1 x b2) for a commuting pair, via the subspace lattice.
inline HSProjection hs_joint_product(const CMatrix& s, const CMatrix& t,
                                     const Region& b1, const Region& b2,
                                     const ToleranceConfig& tol = {}) {
  if (s.rows() != t.rows() || s.cols() != t.cols())
    throw DomainError("hs_joint_product: dimension mismatch");
  double comm = op_norm(CMatrix(s * t - t * s));
  if (comm > tol.commute_rel * std::max(1.0, op_norm(s)) * std::max(1.0, op_norm(t)))
    throw DomainError("hs_joint_product: matrices do not commute at tolerance");
  HSProjection ps = hs_algebraic(s, b1, tol);
  HSProjection pt = hs_algebraic(t, b2, tol);
  HSProjection out = hs_meet({ps, pt}, tol);
  out.method = "joint";
  return out;
}

struct PushforwardReport {
  double angle = 0.0;
  double threshold = 0.0;
  Eigen::Index dim_sum = 0, dim_base = 0;
  bool pass = false;
};

// P(s+q, b) = P(s, b) when q is quasinilpotent and commutes with s.
inline PushforwardReport hs_pushforward_check(const CMatrix& s, const CMatrix& q,
                                              const Region& b,
                                              const ToleranceConfig& tol = {}) {
  if (s.rows() != q.rows() || s.cols() != q.cols())
    throw DomainError("hs_pushforward_check: dimension mismatch");
  double comm = op_norm(CMatrix(s * q - q * s));
  if (comm > tol.commute_rel * std::max(1.0, op_norm(s)) * std::max(1.0, op_norm(q)))
    throw DomainError("hs_pushforward_check: pair does not commute at tolerance");
  // nilpotent spectra scatter like eps^(1/index) under any backward-stable
  // eigensolver, so the precondition screen is deliberately loose
  if (!is_quasinilpotent(q, 1e-3 * (1.0 + op_norm(q)), tol))
    throw DomainError("hs_pushforward_check: q is not quasinilpotent at tolerance");
  PushforwardReport rep;
  HSProjection sum = hs_algebraic(CMatrix(s + q), b, tol);
  HSProjection base = hs_algebraic(s, b, tol);
  rep.dim_sum = sum.space.dim();
  rep.dim_base = base.space.dim();
  rep.threshold = tol.pushforward_angle;
  if (rep.dim_sum != rep.dim_base) {
    rep.angle = M_PI / 2;
    rep.pass = false;
  } else {
    rep.angle = subspace_gap_angle(sum.space, base.space);
    rep.pass = rep.angle <= rep.threshold;
  }
  return rep;
}

struct DecomposabilityReport {
  std::vector<Complex> spectrum_direct;      // compression to range P(t, b)
  std::vector<Complex> spectrum_complement;  // compression to range P(t, b^c)^perp
  bool pass_direct = true;
  bool pass_complement = true;
  bool pass = true;
};

// Both compressions must have spectrum inside closure(b) within cluster_tol,
// widened by the attainable eigenvalue accuracy of the compression: a
// multiplicity-m cluster re-factorized from a dense compression scatters as
// the m-th root of machine noise.
inline DecomposabilityReport decomposability_check(const CMatrix& t,
                                                   const Region& b,
                                                   const ToleranceConfig& tol = {}) {
  SpectralContext ctx = make_context(t, tol);
  DecomposabilityReport rep;
  HSProjection p = hs_algebraic(ctx, b, tol);
  HSProjection pc = hs_algebraic(ctx, Region::complement(b), tol);
  int max_mult = 1;
  for (const auto& atom : ctx.measure.atoms)
    if (b.contains_with_slack(atom.location, ctx.cluster_tol))
      max_mult = std::max(max_mult, atom.multiplicity);
  const double slack =
      ctx.cluster_tol +
      ctx.t_norm * std::pow(1e3 * std::numeric_limits<double>::epsilon(),
                            1.0 / double(max_mult));
  auto check = [&](const CMatrix& basis, std::vector<Complex>& spec) {
    if (basis.cols() == 0) return true;
    CMatrix c = basis.adjoint() * t * basis;
    SchurForm sf = schur(c, tol);
    bool ok = true;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      spec.push_back(sf.r(i, i));
      if (!b.contains_with_slack(sf.r(i, i), slack)) ok = false;
    }
    return ok;
  };
  rep.pass_direct = check(p.space.basis, rep.spectrum_direct);
  Subspace comp = subspace_complement(pc.space);
  rep.pass_complement = check(comp.basis, rep.spectrum_complement);
  rep.pass = rep.pass_direct && rep.pass_complement;
  return rep;
}

}  // namespace hslab
