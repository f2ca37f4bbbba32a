#pragma once

#include <cstddef>

namespace hslab {

// Every numeric threshold used by the library, threaded explicitly through the
// operations. Scale-relative fields are multiplied by the indicated scale at
// the point of use.
struct ToleranceConfig {
  // Singular values below rank_rel * sigma_max count as zero; every subspace
  // dimension in the library derives from this one constant.
  double rank_rel = 1e-10;

  // Factorization health: ||u r u* - m|| <= schur_residual_rel * (1+||m||) * n.
  double schur_residual_rel = 1e-10;
  double unitary_residual_rel = 1e-12;
  double swap_sep_min = 1e-12;

  double herm_rel = 1e-10;        // Hermitian-input check, relative to ||h||
  double psd_clamp_rel = 1e-12;   // eigenvalues above -psd_clamp_rel*||h|| clamp to 0

  // Eigenvalue clustering into atoms: cluster_tol = cluster_rel * (1 + ||t||_op).
  double cluster_rel = 1e-7;
  double point_match_tol = 1e-7;  // PointSet membership radius
  double boundary_guard_rel = 1e-2;  // ambiguity band around PointSet boundary

  double invariance_rel = 1e-8;   // ||(1-p) t p|| <= invariance_rel * ||t||

  // Power-limit route.
  double power_gap_min = 5e-3;    // NoSpectralGap band: |log(lambda/r)| < power_gap_min
  double power_feas_eps = 1e-14;  // double-precision noise model for t^n
  double power_feas_frac = 0.75;  // noise floor must stay below r * power_feas_frac
  double cross_method_angle = 1e-4;

  double join_meet_angle = 1e-7;
  double similarity_angle_factor = 1e-6;  // * cond(a)
  double pushforward_angle = 1e-6;
  double commute_rel = 1e-8;
  double quasinil_tol = 1e-8;

  double growth_rel_slack = 0.25;  // disk-side growth estimate <= r*(1+slack)
  double growth_rel_gap = 0.05;    // outside vectors must exceed r*(1+gap)
  int growth_n_max = 64;

  double angle_zero_tol = 1e-10;

  double idem_residual = 1e-9;      // ||e^2-e|| <= idem_residual * (1+||e||^2)
  double idem_bound_slack = 1e-9;   // relative slack on the norm-vs-angle bound
  double measure_residual = 1e-8;   // additivity/multiplicativity/commutation
  double selfadjoint_residual = 1e-7;
  double split_rel = 1e-7;          // decomposition residuals, scaled by ||t|| powers

  std::size_t max_exhaustive_atoms = 12;
  std::size_t sampled_unions = 512;

  double series_tail_frac = 0.02;   // certified geometric tail of the zeta series
  std::size_t series_k_cap = std::size_t(1) << 20;
};

}  // namespace hslab
