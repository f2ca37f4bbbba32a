#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "hslab/brown.hpp"
#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/parallel.hpp"
#include "hslab/region.hpp"
#include "hslab/rng.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

// k x k upper bidiagonal block: diagonal (-1, ..., -1, 0), superdiagonal 1.
inline CMatrix example_tk(int k) {
  if (k < 2) throw DomainError("example_tk: k must be >= 2");
  CMatrix t = CMatrix::Zero(k, k);
  for (int i = 0; i < k - 1; ++i) {
    t(i, i) = Complex(-1, 0);
    t(i, i + 1) = Complex(1, 0);
  }
  return t;
}

inline CVector example_tk_kernel_vector(int k) {
  return CVector::Ones(k);  // spans ker(t_k)
}

inline CVector example_tk_generalized_vector(int k) {
  CVector w = CVector::Ones(k);  // lies in ker((t_k + 1)^k)
  w(k - 1) = Complex(0, 0);
  return w;
}

// ||(t - z)^{-1}||_op = 1 / sigma_min(t - z); infinite when z is spectral.
inline double resolvent_norm(const CMatrix& t, Complex z) {
  CMatrix shifted = t - z * cidentity(t.rows());
  RVector sv = svd_values(shifted);
  double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

// Direct sum of [[0, 1], [0, 1/n]] blocks, n = 1..n_blocks.
inline CMatrix example_diag2(int n_blocks) {
  if (n_blocks < 1) throw DomainError("example_diag2: n_blocks must be >= 1");
  CMatrix t = CMatrix::Zero(2 * n_blocks, 2 * n_blocks);
  for (int n = 1; n <= n_blocks; ++n) {
    int i = 2 * (n - 1);
    t(i, i + 1) = Complex(1, 0);
    t(i + 1, i + 1) = Complex(1.0 / n, 0);
  }
  return t;
}

// Sampling laws for the diagonal of a DT matrix model.
struct UniformAnnulusLaw {
  double r1, r2;
};
struct PointMassLaw {
  Complex z;
};
struct UniformDiskLaw {
  double r;
};
using DiagonalLaw = std::variant<UniformAnnulusLaw, PointMassLaw, UniformDiskLaw>;

inline Complex sample_diagonal(const DiagonalLaw& law, Rng& rng) {
  if (const auto* a = std::get_if<UniformAnnulusLaw>(&law)) {
    // |z|^2 uniform on [r1^2, r2^2] makes z uniform on the annulus
    double r2 = rng.uniform(a->r1 * a->r1, a->r2 * a->r2);
    double theta = 2.0 * M_PI * rng.uniform();
    return std::sqrt(r2) * Complex(std::cos(theta), std::sin(theta));
  }
  if (const auto* p = std::get_if<PointMassLaw>(&law)) return p->z;
  const auto& d = std::get<UniformDiskLaw>(law);
  double r2 = rng.uniform(0.0, d.r * d.r);
  double theta = 2.0 * M_PI * rng.uniform();
  return std::sqrt(r2) * Complex(std::cos(theta), std::sin(theta));
}

inline std::string law_to_string(const DiagonalLaw& law) {
  if (const auto* a = std::get_if<UniformAnnulusLaw>(&law))
    return "uannulus(" + detail::fmt_num(a->r1) + "," + detail::fmt_num(a->r2) + ")";
  if (const auto* p = std::get_if<PointMassLaw>(&law))
    return "point(" + detail::fmt_num(p->z.real()) + "," +
           detail::fmt_num(p->z.imag()) + ")";
  const auto& d = std::get<UniformDiskLaw>(law);
  return "udisk(" + detail::fmt_num(d.r) + ")";
}

// i.i.d. complex Gaussian entries, E|z_ij|^2 = 1/n.
inline CMatrix ginibre(int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("ginibre: n must be >= 1");
  Rng rng(seed);
  CMatrix z(n, n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = rng.cgaussian() * scale;
  return z;
}

// Upper triangular DT model: diagonal i.i.d. from the law, strictly upper
// entries i.i.d. complex Gaussian with variance c^2/n.
inline CMatrix dt_sample(const DiagonalLaw& law, double c, int n,
                         std::uint64_t seed) {
  if (n < 1) throw DomainError("dt_sample: n must be >= 1");
  if (!(c >= 0)) throw DomainError("dt_sample: c must be >= 0");
  Rng rng(seed);
  CMatrix z = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) z(i, i) = sample_diagonal(law, rng);
  const double scale = c / std::sqrt(double(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) z(i, j) = rng.cgaussian() * scale;
  return z;
}

// Circular free Poisson with parameter c >= 1: DT(uniform annulus
// sqrt(c-1)..sqrt(c), 1). ||Z||_2 -> sqrt(c), ||Z^-1||_2 -> 1/sqrt(c-1).
inline CMatrix circular_free_poisson(double c, int n, std::uint64_t seed) {
  if (!(c >= 1)) throw DomainError("circular_free_poisson: c must be >= 1");
  return dt_sample(UniformAnnulusLaw{std::sqrt(c - 1.0), std::sqrt(c)}, 1.0, n,
                   seed);
}

struct RdiagCheck {
  double norm_pow = 0.0;   // ||z^k||_2
  double pow_norm = 0.0;   // ||z||_2^k
  double rel_dev = 0.0;
};

// Power-norm identity of R-diagonal limits, at one Ginibre sample.
inline RdiagCheck rdiag_norm_check(int n, int k, std::uint64_t seed) {
  if (k < 1) throw DomainError("rdiag_norm_check: k must be >= 1");
  CMatrix z = ginibre(n, seed);
  CMatrix p = z;
  for (int j = 1; j < k; ++j) p = p * z;
  RdiagCheck out;
  out.norm_pow = tr2_norm(p);
  out.pow_norm = std::pow(tr2_norm(z), k);
  out.rel_dev = std::abs(out.norm_pow - out.pow_norm) / out.pow_norm;
  return out;
}

inline double free_poisson_edge_low(double c) {
  return std::pow(std::sqrt(c) - 1.0, 2);
}
inline double free_poisson_edge_high(double c) {
  return std::pow(std::sqrt(c) + 1.0, 2);
}

// Density of the free Poisson law with rate c >= 1 (no atom at 0).
inline double free_poisson_density(double c, double t) {
  if (!(c >= 1)) throw DomainError("free_poisson_density: c must be >= 1");
  const double a = free_poisson_edge_low(c), b = free_poisson_edge_high(c);
  if (t <= a || t >= b) return 0.0;
  return std::sqrt((b - t) * (t - a)) / (2.0 * M_PI * t);
}

struct AnnulusBands {
  Region e1 = Region::empty_set();
  Region e2 = Region::empty_set();
  double e1_lo = 0, e1_hi = 0, e2_lo = 0, e2_hi = 0;  // squared-radius bands
};

// The two thin annular bands used by the two-projection experiment:
// E1 at squared radius [c-d1-1/N, c-d1], E2 at [c-d2, c-d2+1/N].
inline AnnulusBands annulus_partition(double c, int N, double delta1,
                                      double delta2) {
  if (N < 1) throw DomainError("annulus_partition: N must be >= 1");
  if (!(delta2 > 0) || !(delta1 > delta2) || !(delta1 < 1))
    throw DomainError("annulus_partition: need 0 < delta2 < delta1 < 1");
  if (!(delta1 + 1.0 / N <= 1.0) || !(delta2 >= 1.0 / N))
    throw DomainError("annulus_partition: bands leave the support annulus");
  AnnulusBands bands;
  bands.e1_lo = c - delta1 - 1.0 / N;
  bands.e1_hi = c - delta1;
  bands.e2_lo = c - delta2;
  bands.e2_hi = c - delta2 + 1.0 / N;
  bands.e1 = Region::annulus(std::sqrt(bands.e1_lo), std::sqrt(bands.e1_hi));
  bands.e2 = Region::annulus(std::sqrt(bands.e2_lo), std::sqrt(bands.e2_hi));
  return bands;
}

struct Thm52Config {
  double c = 2.0;
  int N = 10;
  double delta1 = 0.5;
  double delta2 = 0.4;
  int matrix_dim = 256;
  int trials = 20;
  std::uint64_t seed = 1;
  bool trace = false;
};

struct Thm52Predictions {
  double a1_sq = 0.0;      // ||a1||_2^2 = c - delta1
  double a2inv_sq = 0.0;   // ||a2^-1||_2^2 = 1/(c - delta2)
  double zeta_sq = 0.0;    // ||zeta||^2 = 1/(N(delta1 - delta2))
  double cos_theta = 0.0;  // ||zeta|| / sqrt(1 + ||zeta||^2)
};

inline Thm52Predictions thm52_predictions(const Thm52Config& cfg) {
  Thm52Predictions p;
  p.a1_sq = cfg.c - cfg.delta1;
  p.a2inv_sq = 1.0 / (cfg.c - cfg.delta2);
  p.zeta_sq = 1.0 / (cfg.N * (cfg.delta1 - cfg.delta2));
  p.cos_theta = std::sqrt(p.zeta_sq) / std::sqrt(1.0 + p.zeta_sq);
  return p;
}

struct Thm52Trial {
  int index = 0;
  double a1_sq = 0.0;
  double a2inv_sq = 0.0;
  double zeta_sq = 0.0;
  double cos_theta = 0.0;
  std::size_t k_terms = 0;
  double tail_bound = 0.0;  // certified geometric tail relative to the sum
  bool discarded = false;
};

struct Thm52TraceRow {
  int n = 0;
  double norm_vn = 0.0;
  double root = 0.0;  // ||v_n||^(1/n)
};

struct Thm52Report {
  Thm52Config cfg;
  Thm52Predictions pred;
  std::vector<Thm52Trial> trials;
  double est_a1_sq = 0.0, est_a2inv_sq = 0.0, est_zeta_sq = 0.0,
         est_cos_theta = 0.0;
  int discarded = 0;
  AnnulusBands bands;
  std::vector<Thm52TraceRow> trace_rows;  // only in trace mode, trial 0
  CMatrix zeta_witness;                   // only in trace mode, trial 0
};

namespace detail {

// Truncated series sum_{k=0}^{count-1} a1^k b a2^{-k-1}, assembled by
// term-count doubling: S_{2c} = S_c + a1^c S_c a2^{-c}.
inline CMatrix zeta_series(const CMatrix& a1, const CMatrix& b,
                           const CMatrix& a2inv, std::size_t count) {
  CMatrix s = b * a2inv;
  ScaledPower p1{a1, 0.0}, p2{a2inv, 0.0};
  p1.normalize();
  p2.normalize();
  std::size_t have = 1;
  while (have < count) {
    double f = std::exp(p1.log_scale + p2.log_scale);
    s += f * (p1.m * (s * p2.m));
    p1.m = p1.m * p1.m;
    p1.log_scale *= 2;
    p1.normalize();
    p2.m = p2.m * p2.m;
    p2.log_scale *= 2;
    p2.normalize();
    have *= 2;
  }
  return s;
}

}  // namespace detail

// Matrix-scale two-projection experiment: sqrt(N) a1 and sqrt(N) a2 are
// circular free Poisson with parameters N(c-delta1) and N(c-delta2)+1, b12 is
// circular with ||b12||_2^2 = 1/N, zeta solves the geometric series.
inline Thm52Report thm52_experiment(const Thm52Config& cfg,
                                    const ToleranceConfig& tol = {}) {
  if (cfg.matrix_dim < 32)
    throw DomainError("thm52_experiment: matrix_dim must be >= 32");
  if (cfg.trials < 1) throw DomainError("thm52_experiment: trials must be >= 1");
  if (!(cfg.delta1 > cfg.delta2) || !(cfg.delta2 > 0))
    throw DomainError("thm52_experiment: need delta1 > delta2 > 0");
  const double c1 = cfg.N * (cfg.c - cfg.delta1);
  const double c2 = cfg.N * (cfg.c - cfg.delta2) + 1.0;
  if (!(c1 >= 1.0))
    throw DomainError("thm52_experiment: N(c - delta1) must be >= 1");

  Thm52Report rep;
  rep.cfg = cfg;
  rep.pred = thm52_predictions(cfg);
  rep.bands = annulus_partition(cfg.c, cfg.N, cfg.delta1, cfg.delta2);
  rep.trials.resize(std::size_t(cfg.trials));

  const int m = cfg.matrix_dim;
  const double inv_sqrt_n = 1.0 / std::sqrt(double(cfg.N));

  parallel_for(std::size_t(cfg.trials), [&](std::size_t ti) {
    Thm52Trial trial;
    trial.index = int(ti);
    const std::uint64_t ts = derive_seed(cfg.seed, ti);
    CMatrix a1 = circular_free_poisson(c1, m, derive_seed(ts, 1)) * inv_sqrt_n;
    CMatrix a2 = circular_free_poisson(c2, m, derive_seed(ts, 2)) * inv_sqrt_n;
    CMatrix b = ginibre(m, derive_seed(ts, 3)) * inv_sqrt_n;

    RVector sv = svd_values(a2);
    if (sv(sv.size() - 1) <= 1e-8 * sv(0)) {
      trial.discarded = true;
      rep.trials[ti] = trial;
      return;
    }
    CMatrix a2inv = a2.partialPivLu().inverse();
    trial.a1_sq = std::pow(tr2_norm(a1), 2);
    trial.a2inv_sq = std::pow(tr2_norm(a2inv), 2);

    double rho = trial.a1_sq * trial.a2inv_sq;
    std::size_t count = tol.series_k_cap;
    if (rho < 1.0 - 1e-9) {
      double tf = tol.series_tail_frac;
      double need = std::log(tf / (1.0 + tf)) / std::log(rho);
      count = 8;
      while (double(count) < need && count < tol.series_k_cap) count *= 2;
    }
    CMatrix zeta = detail::zeta_series(a1, b, a2inv, count);
    if (!zeta.allFinite()) {
      trial.discarded = true;
      rep.trials[ti] = trial;
      return;
    }
    trial.k_terms = count;
    trial.tail_bound = rho < 1.0
                           ? std::pow(rho, double(count)) /
                                 std::max(1.0 - std::pow(rho, double(count)), 1e-300)
                           : std::numeric_limits<double>::infinity();
    trial.zeta_sq = std::pow(tr2_norm(zeta), 2);
    // witness vectors x = (zeta, 1^), y = (zeta, 0): <x,y> = ||zeta||^2
    double xy = trial.zeta_sq;
    double xx = trial.zeta_sq + 1.0, yy = trial.zeta_sq;
    trial.cos_theta = xy / std::sqrt(xx * yy);
    if (cfg.trace && ti == 0) {
      rep.zeta_witness = zeta;
      CMatrix u = cidentity(m);
      for (int nn = 1; nn <= 24; ++nn) {
        u = u * a2inv;
        Thm52TraceRow row;
        row.n = nn;
        double eta_sq = std::pow(tr2_norm(u), 2);
        double xi_sq = std::pow(tr2_norm(CMatrix(b * u * a2inv)), 2);
        row.norm_vn = std::sqrt(eta_sq + xi_sq);
        row.root = std::pow(row.norm_vn, 1.0 / nn);
        rep.trace_rows.push_back(row);
      }
    }
    rep.trials[ti] = trial;
  });

  int kept = 0;
  for (const auto& trial : rep.trials) {
    if (trial.discarded) {
      ++rep.discarded;
      continue;
    }
    ++kept;
    rep.est_a1_sq += trial.a1_sq;
    rep.est_a2inv_sq += trial.a2inv_sq;
    rep.est_zeta_sq += trial.zeta_sq;
    rep.est_cos_theta += trial.cos_theta;
  }
  if (kept == 0) throw DomainError("thm52_experiment: every trial discarded");
  rep.est_a1_sq /= kept;
  rep.est_a2inv_sq /= kept;
  rep.est_zeta_sq /= kept;
  rep.est_cos_theta /= kept;
  return rep;
}

}  // namespace hslab
