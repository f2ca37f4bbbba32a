#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hslab/angles.hpp"
#include "hslab/brown.hpp"
#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/hs_projection.hpp"
#include "hslab/rng.hpp"
#include "hslab/subspace.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

struct SpectralMeasureAtom {
  Complex location;
  int multiplicity = 0;
  CMatrix e;  // idempotent with range P(t,{atom}), kernel P(t, rest)
  double norm_e = 0.0;
};

struct SpectralMeasureTable {
  Eigen::Index n = 0;
  std::vector<SpectralMeasureAtom> atoms;
  double additivity_residual = 0.0;   // ||sum_j e_j - 1||
  double mult_residual = 0.0;         // max over pairs ||e_i e_j - delta_ij e_i||
  double commutation_residual = 0.0;  // max_j ||e_j t - t e_j||
  double range_residual = 0.0;        // max_j of ||e_j V_j - V_j||, ||e_j W_j||
  double bound_M = 1.0;               // sup over scanned unions of ||E(sigma)||
  bool bound_exhaustive = true;       // union lattice and pair grid fully scanned
};

namespace detail {

inline CMatrix union_idempotent(const SpectralMeasureTable& table,
                                const std::vector<bool>& mask) {
  CMatrix e = CMatrix::Zero(table.n, table.n);
  for (std::size_t j = 0; j < table.atoms.size(); ++j)
    if (mask[j]) e += table.atoms[j].e;
  return e;
}

}  // namespace detail

// The idempotent-valued measure supported on the atoms of t's Brown measure,
// additive by construction: E(sigma) = sum of the atom idempotents in sigma.
inline SpectralMeasureTable build_spectral_measure(const CMatrix& t,
                                                   std::uint64_t seed = 1,
                                                   const ToleranceConfig& tol = {}) {
  SpectralContext ctx = make_context(t, tol);
  const std::size_t k = ctx.measure.atoms.size();
  SpectralMeasureTable table;
  table.n = t.rows();
  // The exhaustive lattice walk below enumerates word-sized subset masks.
  const bool exhaustive = k <= tol.max_exhaustive_atoms && k < 63;

  std::vector<Subspace> ranges(k), kernels(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<bool> mask(k, false);
    mask[j] = true;
    ranges[j] = hs_from_atom_mask(ctx, mask, tol).space;
    mask.flip();
    kernels[j] = hs_from_atom_mask(ctx, mask, tol).space;
  }
  for (std::size_t j = 0; j < k; ++j) {
    ObliqueIdempotent oi = oblique_idempotent(ranges[j], kernels[j], tol);
    SpectralMeasureAtom atom;
    atom.location = ctx.measure.atoms[j].location;
    atom.multiplicity = ctx.measure.atoms[j].multiplicity;
    atom.e = oi.e;
    atom.norm_e = oi.norm_e;
    table.atoms.push_back(std::move(atom));
    double rr = std::max(
        op_norm(CMatrix(oi.e * ranges[j].basis - ranges[j].basis)),
        op_norm(CMatrix(oi.e * kernels[j].basis)));
    table.range_residual = std::max(table.range_residual, rr);
    table.commutation_residual =
        std::max(table.commutation_residual, op_norm(CMatrix(oi.e * t - t * oi.e)));
  }

  CMatrix sum = CMatrix::Zero(table.n, table.n);
  for (const auto& a : table.atoms) sum += a.e;
  table.additivity_residual = op_norm(CMatrix(sum - cidentity(table.n)));
  auto pair_residual = [&](std::size_t i, std::size_t j) {
    CMatrix prod = table.atoms[i].e * table.atoms[j].e;
    if (i == j) prod -= table.atoms[i].e;
    table.mult_residual = std::max(table.mult_residual, op_norm(prod));
  };
  if (exhaustive) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) pair_residual(i, j);
  } else {
    // The full pair grid is quadratic in the atom count; past the exhaustive
    // limit check every idempotency pair plus seeded cross terms, the same
    // compromise the union bound below makes.
    Rng pick(derive_seed(seed, 0xA127));
    for (std::size_t i = 0; i < k; ++i) {
      pair_residual(i, i);
      for (int d = 0; d < 6; ++d) {
        const std::size_t j = std::size_t(pick.raw() % std::uint64_t(k));
        if (j != i) pair_residual(i, j);
      }
    }
  }

  table.bound_M = 1.0;  // E(everything) = 1
  if (k >= 2) {
    std::vector<std::vector<bool>> masks;
    if (exhaustive) {
      const std::uint64_t full = (std::uint64_t(1) << k) - 1;
      for (std::uint64_t word = 1; word < full; ++word) {
        std::vector<bool> mask(k, false);
        for (std::size_t j = 0; j < k; ++j) mask[j] = (word >> j) & 1;
        masks.push_back(std::move(mask));
      }
    } else {
      table.bound_exhaustive = false;
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<bool> m(k, false);
        m[j] = true;
        masks.push_back(m);
        m.flip();
        masks.push_back(std::move(m));
      }
      Rng rng(derive_seed(seed, 0xB09D));
      for (std::size_t i = 0; i < tol.sampled_unions; ++i) {
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
        masks.push_back(std::move(mask));
      }
    }
    for (const auto& mask : masks)
      table.bound_M =
          std::max(table.bound_M, op_norm(detail::union_idempotent(table, mask)));
  }
  return table;
}

struct MeasureSimilarity {
  CMatrix a, a_inv;
  double cond_a = 1.0;
  double selfadjoint_residual = 0.0;  // max_j ||(a e_j a^-1)* - a e_j a^-1||
};

// Metric-change operator a = (sum_j e_j* e_j)^(1/2); conjugation by a turns
// every measure idempotent into an orthogonal projection.
inline MeasureSimilarity similarity_from_measure(const SpectralMeasureTable& table,
                                                 const ToleranceConfig& tol = {}) {
  if (table.atoms.empty())
    throw DomainError("similarity_from_measure: empty table");
  CMatrix gram = CMatrix::Zero(table.n, table.n);
  for (const auto& atom : table.atoms) gram += atom.e.adjoint() * atom.e;
  HermEig eig = herm_eig(gram);
  const double top = eig.lambda(eig.lambda.size() - 1);
  if (!(top > 0) || eig.lambda(0) <= tol.rank_rel * tol.rank_rel * top)
    throw DegenerateMeasure("similarity_from_measure: metric operator is singular");
  RVector sq = eig.lambda.cwiseSqrt();
  MeasureSimilarity sim;
  sim.a = eig.vectors * sq.asDiagonal() * eig.vectors.adjoint();
  sim.a_inv = eig.vectors * sq.cwiseInverse().asDiagonal() * eig.vectors.adjoint();
  sim.cond_a = sq(sq.size() - 1) / sq(0);
  for (const auto& atom : table.atoms) {
    CMatrix h = sim.a * atom.e * sim.a_inv;
    sim.selfadjoint_residual =
        std::max(sim.selfadjoint_residual, op_norm(CMatrix(h - h.adjoint())));
  }
  return sim;
}

struct SplitResult {
  CMatrix s, q;
  double commutator = 0.0;      // ||s q - q s||
  double radius_q = 0.0;        // spectral radius of q
  double reconstruction = 0.0;  // ||t - (s + q)||
};

// t = s + q with s = sum_j lambda_j e_j (scalar part) and q quasinilpotent,
// [s, q] = 0; the measure-weighted form of the semisimple/nilpotent split.
inline SplitResult scalar_nilpotent_split(const CMatrix& t,
                                          const SpectralMeasureTable& table,
                                          const ToleranceConfig& tol = {}) {
  SplitResult out;
  out.s = CMatrix::Zero(table.n, table.n);
  for (const auto& atom : table.atoms) out.s += atom.location * atom.e;
  out.q = t - out.s;
  out.commutator = op_norm(CMatrix(out.s * out.q - out.q * out.s));
  out.radius_q = spectral_radius(out.q, tol);
  out.reconstruction = op_norm(CMatrix(t - (out.s + out.q)));
  return out;
}

inline SplitResult scalar_nilpotent_split(const CMatrix& t,
                                          const ToleranceConfig& tol = {}) {
  return scalar_nilpotent_split(t, build_spectral_measure(t, 1, tol), tol);
}

struct DecompositionResult {
  CMatrix s, q;        // t = s + q, [s,q] = 0, q quasinilpotent
  CMatrix a, a_inv;    // metric change
  CMatrix n, q_prime;  // a t a^-1 = n + q', n normal
  double commutator = 0.0;      // ||s q - q s||
  double radius_q = 0.0;
  double normality = 0.0;       // ||n n* - n* n||
  double reconstruction = 0.0;  // ||t - a^-1 (n + q') a||
  double cond_a = 1.0;
  double bound_M = 1.0;
  double selfadjoint_residual = 0.0;
};

inline DecompositionResult normal_form(const CMatrix& t, std::uint64_t seed = 1,
                                       const ToleranceConfig& tol = {}) {
  SpectralMeasureTable table = build_spectral_measure(t, seed, tol);
  MeasureSimilarity sim = similarity_from_measure(table, tol);
  SplitResult split = scalar_nilpotent_split(t, table, tol);
  DecompositionResult out;
  out.s = split.s;
  out.q = split.q;
  out.a = sim.a;
  out.a_inv = sim.a_inv;
  out.n = sim.a * split.s * sim.a_inv;
  out.q_prime = sim.a * split.q * sim.a_inv;
  out.commutator = split.commutator;
  out.radius_q = split.radius_q;
  out.normality = op_norm(CMatrix(out.n * out.n.adjoint() - out.n.adjoint() * out.n));
  out.reconstruction =
      op_norm(CMatrix(t - sim.a_inv * (out.n + out.q_prime) * sim.a));
  out.cond_a = sim.cond_a;
  out.bound_M = table.bound_M;
  out.selfadjoint_residual = sim.selfadjoint_residual;
  return out;
}

struct SpectralityReport {
  double kappa_hat = M_PI / 2;
  bool nza_flag = true;
  double bound_M = 1.0;
  double cond_a = 1.0;
  double lemma_bound = 1.0;  // norm bound implied by kappa_hat
  bool bound_consistent = true;
  double atom_range_angle = 0.0;  // max gap between range e_j and P(t,{atom_j})
  bool decomposable = true;       // every atom-subset compression passes
  UnzaReport scan;
};

inline SpectralityReport spectrality_report(const CMatrix& t,
                                            std::uint64_t seed = 1,
                                            const ToleranceConfig& tol = {}) {
  SpectralContext ctx = make_context(t, tol);
  SpectralityReport rep;
  std::vector<Region> family =
      atom_subset_family(ctx.measure, tol.sampled_unions, seed, tol);
  rep.scan = unza_scan(t, family, tol);
  rep.kappa_hat = rep.scan.kappa_hat;
  rep.nza_flag = rep.scan.nza_flag;

  SpectralMeasureTable table = build_spectral_measure(t, seed, tol);
  rep.bound_M = table.bound_M;
  MeasureSimilarity sim = similarity_from_measure(table, tol);
  rep.cond_a = sim.cond_a;
  if (rep.scan.argmin >= 0) {
    rep.lemma_bound = wermer_bound(rep.kappa_hat);
    rep.bound_consistent =
        rep.bound_M <= rep.lemma_bound * (1.0 + tol.idem_bound_slack);
  }
  for (std::size_t j = 0; j < table.atoms.size(); ++j) {
    std::vector<bool> mask(table.atoms.size(), false);
    mask[j] = true;
    Subspace pj = hs_from_atom_mask(ctx, mask, tol).space;
    Subspace ej = Subspace::from_columns(table.atoms[j].e, tol);
    if (ej.dim() != pj.dim()) {
      rep.atom_range_angle = M_PI / 2;
      continue;
    }
    if (pj.dim() > 0)
      rep.atom_range_angle =
          std::max(rep.atom_range_angle, subspace_gap_angle(ej, pj));
  }
  for (const auto& atom : ctx.measure.atoms) {
    Region b = Region::points({atom.location}, tol.point_match_tol);
    DecomposabilityReport dr = decomposability_check(t, b, tol);
    rep.decomposable = rep.decomposable && dr.pass;
  }
  return rep;
}

}  // namespace hslab
