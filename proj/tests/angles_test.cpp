#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "hslab/hslab.hpp"
#include "oracles.hpp"

using hslab::CMatrix;
using hslab::Complex;
using hslab::CVector;
using hslab::Region;
using hslab::Subspace;

namespace {

Subspace span_of(const CVector& v) { return Subspace{hslab::orthonormalize(v)}; }

}  // namespace

TEST_CASE("principal angle between the ones-span and the truncated span") {
  // V = span(1,...,1), W = span(1,...,1,0) in C^k: cos(alpha) = sqrt(1 - 1/k).
  for (int k : {2, 3, 4, 16, 64}) {
    CVector v = CVector::Ones(k);
    CVector w = CVector::Ones(k);
    w(k - 1) = 0.0;
    auto rep = hslab::principal_angle(span_of(v), span_of(w));
    const double expected = std::acos(std::sqrt(1.0 - 1.0 / double(k)));
    CHECK(std::abs(rep.alpha - expected) < 1e-10);
    CHECK(rep.cos_alpha == Catch::Approx(std::sqrt(1.0 - 1.0 / double(k)))
                               .margin(1e-12));
    // Witness pair attains the cosine and is unit length.
    CHECK(std::abs(rep.witness_v.norm() - 1.0) < 1e-12);
    CHECK(std::abs(rep.witness_w.norm() - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(rep.witness_v.dot(rep.witness_w)) - rep.cos_alpha) <
          1e-10);
  }
}

TEST_CASE("principal angle edge cases: orthogonal, identical, errors") {
  CVector e1 = CVector::Zero(3), e2 = CVector::Zero(3);
  e1(0) = 1.0;
  e2(1) = 1.0;
  auto orth = hslab::principal_angle(span_of(e1), span_of(e2));
  CHECK(orth.alpha == Catch::Approx(M_PI / 2).margin(1e-12));
  CHECK(orth.cos_alpha == 0.0);

  auto same = hslab::principal_angle(span_of(e1), span_of(e1));
  CHECK(same.alpha < 1e-12);
  CHECK(same.cos_alpha == Catch::Approx(1.0).margin(1e-14));

  CVector long_v = CVector::Ones(4);
  CHECK_THROWS_AS(hslab::principal_angle(span_of(e1), span_of(long_v)),
                  hslab::DomainError);
  Subspace zero{CMatrix::Zero(3, 0)};
  CHECK_THROWS_AS(hslab::principal_angle(span_of(e1), zero),
                  hslab::DomainError);
}

TEST_CASE("the angle between the two atom spaces of t_k matches the formula") {
  for (int k : {4, 16}) {
    CMatrix t = hslab::example_tk(k);
    auto ctx = hslab::make_context(t);
    REQUIRE(ctx.measure.atoms.size() == 2);
    auto p0 = hslab::hs_algebraic(ctx, Region::points({{0, 0}}, 1e-7));
    auto pm = hslab::hs_algebraic(ctx, Region::points({{-1, 0}}, 1e-7));
    REQUIRE(p0.space.dim() == 1);
    REQUIRE(pm.space.dim() == k - 1);
    auto rep = hslab::principal_angle(p0.space, pm.space);
    CHECK(std::abs(rep.alpha - std::acos(std::sqrt(1.0 - 1.0 / double(k)))) <
          1e-10);

    // The documented witnesses: ones(k) spans ker t, dropping the last entry
    // lands in the generalized space of -1.
    CHECK(std::abs((t * hslab::example_tk_kernel_vector(k)).norm()) < 1e-14);
    CMatrix shifted = t + hslab::cidentity(k);
    CVector w = hslab::example_tk_generalized_vector(k);
    for (int i = 0; i < k; ++i) w = shifted * w;
    CHECK(w.norm() < 1e-12);
  }
}

TEST_CASE("wermer bound equals the reciprocal sine of the angle") {
  for (double alpha : {0.01, 0.1, 0.5, 1.0, M_PI / 2}) {
    CHECK(hslab::wermer_bound(alpha) ==
          Catch::Approx(1.0 / std::sin(alpha)).epsilon(1e-12));
  }
  // eps = 1 - cos(alpha) recovers f(eps) = 1/sqrt(eps(2-eps)) directly.
  const double alpha = 0.37;
  const double eps = 1.0 - std::cos(alpha);
  CHECK(hslab::wermer_bound(alpha) ==
        Catch::Approx(1.0 / std::sqrt(eps * (2.0 - eps))).epsilon(1e-12));
  CHECK_THROWS_AS(hslab::wermer_bound(0.0), hslab::DomainError);
  CHECK_THROWS_AS(hslab::wermer_bound(2.0), hslab::DomainError);
}

TEST_CASE("oblique idempotent on a hand 2x2 pair") {
  const double theta = 0.3;
  CVector v(2), w(2);
  v << 1.0, 0.0;
  w << std::cos(theta), std::sin(theta);
  auto oi = hslab::oblique_idempotent(span_of(v), span_of(w));
  // e = [[1, -cot(theta)], [0, 0]]
  CHECK(std::abs(oi.e(0, 0) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(oi.e(0, 1) + Complex(1.0 / std::tan(theta), 0)) < 1e-12);
  CHECK(std::abs(oi.e(1, 0)) < 1e-14);
  CHECK(std::abs(oi.e(1, 1)) < 1e-14);
  CHECK(oi.norm_e == Catch::Approx(1.0 / std::sin(theta)).epsilon(1e-10));
  CHECK(oi.idem_residual < 1e-12);
  CHECK((oi.e * v - v).norm() < 1e-12);
  CHECK((oi.e * w).norm() < 1e-12);
  CHECK(oi.range_dim == 1);
  CHECK(oi.kernel_dim == 1);
}

TEST_CASE("oblique idempotent refuses non-complementary pairs") {
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  CHECK_THROWS_AS(hslab::oblique_idempotent(span_of(e1), span_of(e1)),
                  hslab::SumNotDirect);
  CVector f1 = CVector::Zero(3), f2 = CVector::Zero(3);
  f1(0) = 1.0;
  f2(1) = 1.0;
  CHECK_THROWS_AS(hslab::oblique_idempotent(span_of(f1), span_of(f2)),
                  hslab::SumNotDirect);
}

TEST_CASE("idempotent norm meets the angle bound on random complementary pairs") {
  hslab::Rng rng(1203);
  int built = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + int(rng.uniform() * 7.0);  // split 8 = k + (8 - k)
    CMatrix v(8, k), w(8, 8 - k);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < k; ++j) v(i, j) = rng.cgaussian();
      for (int j = 0; j < 8 - k; ++j) w(i, j) = rng.cgaussian();
    }
    Subspace sv{hslab::orthonormalize(v)}, sw{hslab::orthonormalize(w)};
    if (sv.dim() != k || sw.dim() != 8 - k) continue;
    auto oi = hslab::oblique_idempotent(sv, sw);
    auto rep = hslab::principal_angle(sv, sw);
    CHECK(oi.norm_e <= hslab::wermer_bound(rep.alpha) * (1.0 + 1e-9));
    // The bound is attained: ||e|| = 1/sin(alpha) for complementary pairs.
    CHECK(oi.norm_e * std::sin(rep.alpha) == Catch::Approx(1.0).epsilon(1e-7));
    // Symmetry of the angle, exact.
    CHECK(hslab::principal_angle(sw, sv).alpha == rep.alpha);
    ++built;
  }
  CHECK(built >= 195);
}

TEST_CASE("idempotent norm for the t_k atom splitting attains 1/sin(kappa)") {
  const int k = 16;
  CMatrix t = hslab::example_tk(k);
  auto ctx = hslab::make_context(t);
  auto p0 = hslab::hs_algebraic(ctx, Region::points({{0, 0}}, 1e-7));
  auto pm = hslab::hs_algebraic(ctx, Region::points({{-1, 0}}, 1e-7));
  auto oi = hslab::oblique_idempotent(p0.space, pm.space);
  // cos(kappa) = sqrt(15/16), so sin(kappa) = 1/4 and the norm is exactly 4.
  CHECK(oi.norm_e == Catch::Approx(4.0).epsilon(1e-9));
  CHECK(oi.idem_residual < 1e-10);
  const double kappa = std::acos(std::sqrt(15.0 / 16.0));
  CHECK(hslab::wermer_bound(kappa) == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("unza scan over the block model collapses like 1/n_blocks") {
  std::vector<double> kappas;
  for (int nb : {2, 4, 8}) {
    CMatrix t = hslab::example_diag2(nb);
    std::vector<Region> family = {Region::points({{0, 0}}, 1e-7)};
    auto rep = hslab::unza_scan(t, family);
    REQUIRE(rep.rows.size() == 1);
    CHECK_FALSE(rep.rows[0].skipped);
    CHECK(rep.rows[0].dim_b == nb);
    CHECK(rep.rows[0].dim_bc == nb);
    const double expected =
        std::acos(1.0 / std::sqrt(1.0 + 1.0 / double(nb * nb)));
    CHECK(std::abs(rep.kappa_hat - expected) < 1e-9);
    CHECK(rep.argmin == 0);
    CHECK(rep.nza_flag);
    // Witnesses live in the two spaces and attain the cosine.
    CHECK(std::abs(std::abs(rep.witness_v.dot(rep.witness_w)) -
                   std::cos(rep.kappa_hat)) < 1e-10);
    kappas.push_back(rep.kappa_hat);
  }
  CHECK(kappas[1] < kappas[0]);
  CHECK(kappas[2] < kappas[1]);
}

TEST_CASE("unza scan on a conjugated normal matrix obeys the condition bound") {
  CMatrix d = CMatrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) d(i, i) = Complex(double(i) - 2.0, 0.3 * i);
  hslab::Rng rng(907);
  CMatrix g(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g(i, j) = rng.cgaussian();
  CMatrix a = hslab::cidentity(5) + 0.35 * g;
  hslab::RVector sv = hslab::svd_values(a);
  REQUIRE(sv(sv.size() - 1) > 0.1);
  const double norm_sq_prod = sv(0) * sv(0) / (sv(sv.size() - 1) * sv(sv.size() - 1));

  CMatrix t = a * d * a.inverse();
  auto family = hslab::atom_subset_family(hslab::brown_measure(t));
  auto rep = hslab::unza_scan(t, family);
  REQUIRE(rep.argmin >= 0);
  for (const auto& row : rep.rows) {
    if (row.skipped) continue;
    CHECK(1.0 - row.cos_alpha >= 1.0 / norm_sq_prod - 1e-10);
  }
}

TEST_CASE("unza scan marks trivial splits as skipped") {
  CMatrix t = CMatrix::Zero(3, 3);
  t(0, 0) = 1.0;
  t(1, 1) = 1.0;
  t(2, 2) = 1.0;  // single atom: {1} vs complement is a trivial split
  std::vector<Region> family = {Region::points({{1, 0}}, 1e-7),
                                Region::points({{5, 0}}, 1e-7)};
  auto rep = hslab::unza_scan(t, family);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].skipped);  // complement is empty
  CHECK(rep.rows[1].skipped);  // region itself is empty
  CHECK(rep.argmin == -1);
}

TEST_CASE("atom subset family: exhaustive and randomized branches") {
  // Two atoms: exactly the two proper nonempty subsets.
  auto ctx2 = hslab::make_context(hslab::example_tk(8));
  auto fam2 = hslab::atom_subset_family(ctx2.measure);
  CHECK(fam2.size() == 2);

  // Four atoms: 2^4 - 2 = 14 proper nonempty subsets.
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = Complex(0, 1);
  d(3, 3) = -3.0;
  auto ctx4 = hslab::make_context(d);
  REQUIRE(ctx4.measure.atoms.size() == 4);
  CHECK(hslab::atom_subset_family(ctx4.measure).size() == 14);

  // Above the exhaustive cap: singletons plus the requested random subsets.
  hslab::ToleranceConfig tol;
  tol.max_exhaustive_atoms = 3;
  CHECK(hslab::atom_subset_family(ctx4.measure, 10, 7, tol).size() == 4 + 10);

  // Fewer than two atoms: nothing to scan.
  auto ctx1 = hslab::make_context(CMatrix::Zero(2, 2));
  CHECK(hslab::atom_subset_family(ctx1.measure).empty());
}

TEST_CASE("disjoint closed angle is the right angle for a normal matrix") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = 2.0;
  d(2, 2) = -3.0;
  auto rep = hslab::disjoint_closed_angle(d, Region::disk({0.5, 0}, 0.1),
                                          Region::disk({2.0, 0}, 0.1));
  CHECK(rep.dim_1 == 1);
  CHECK(rep.dim_2 == 1);
  CHECK(rep.angle.alpha == Catch::Approx(M_PI / 2).margin(1e-10));

  CHECK_THROWS_AS(
      hslab::disjoint_closed_angle(d, Region::disk({0.5, 0}, 0.1),
                                   Region::disk({0.5, 0}, 0.2)),
      hslab::DomainError);
}

TEST_CASE("disjoint closed angle is acute for the slanted block model") {
  CMatrix t = hslab::example_diag2(3);
  auto rep = hslab::disjoint_closed_angle(t, Region::points({{0, 0}}, 1e-7),
                                          Region::points({{1.0 / 3.0, 0}}, 1e-7));
  CHECK(rep.dim_1 == 3);
  CHECK(rep.dim_2 == 1);
  const double expected = std::acos(1.0 / std::sqrt(1.0 + 1.0 / 9.0));
  CHECK(std::abs(rep.angle.alpha - expected) < 1e-9);
  CHECK(rep.angle.alpha > 0.1);  // positive, but far from orthogonal
}
