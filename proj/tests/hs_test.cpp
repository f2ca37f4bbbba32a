#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ensemble.hpp"
#include "hslab/hslab.hpp"
#include "oracles.hpp"

using hslab::CMatrix;
using hslab::Complex;
using hslab::Region;

namespace {

Region point(Complex z) { return Region::points({z}, 1e-7); }

CMatrix seeded(int n, std::uint64_t seed) {
  hslab::Rng rng(seed);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.cgaussian();
  return m;
}

double angle_to_vector(const hslab::Subspace& s, const hslab::CVector& v) {
  hslab::Subspace w{hslab::orthonormalize(v)};
  return hslab::principal_angle(s, w).alpha;
}

}  // namespace

TEST_CASE("algebraic projection on diag(0,1) selects the right axis") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(1, 1) = 1.0;
  auto p = hslab::hs_algebraic(t, point({0, 0}));
  REQUIRE(p.space.dim() == 1);
  CHECK(std::abs(p.space.basis(0, 0)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(p.space.basis(1, 0)) < 1e-12);
  CHECK(p.trace == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("algebraic projection on the 2x2 kernel-vs-slant block") {
  // [[0,1],[0,1/n]]: the {0} space is e1, the {1/n} space is (1, 1/n)/norm.
  const int n = 5;
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 1) = 1.0;
  t(1, 1) = 1.0 / double(n);

  auto p0 = hslab::hs_algebraic(t, point({0, 0}));
  REQUIRE(p0.space.dim() == 1);
  hslab::CVector e1(2);
  e1 << 1.0, 0.0;
  CHECK(angle_to_vector(p0.space, e1) < 1e-12);

  auto p1 = hslab::hs_algebraic(t, point({1.0 / double(n), 0}));
  REQUIRE(p1.space.dim() == 1);
  hslab::CVector slant(2);
  slant << 1.0, 1.0 / double(n);
  CHECK(angle_to_vector(p1.space, slant) < 1e-12);
}

TEST_CASE("algebraic projection equals the kernel-power oracle span") {
  // 8x8 with three eigenvalues inside the region; compare against the union
  // of generalized eigenspaces ker((t - lambda)^m) from the elimination
  // oracle.
  auto tm = ensemble::make_test_matrix(8, 1234);
  // Pick the first two atoms; their multiplicities sum to k.
  Region b = Region::points({tm.eigenvalues[0], tm.eigenvalues[1]}, 1e-7);
  auto p = hslab::hs_algebraic(tm.t, b);
  const int expected_dim = tm.multiplicities[0] + tm.multiplicities[1];
  REQUIRE(p.space.dim() == expected_dim);

  CMatrix span(8, expected_dim);
  int col = 0;
  for (int a = 0; a < 2; ++a) {
    CMatrix shifted = tm.t - tm.eigenvalues[std::size_t(a)] * hslab::cidentity(8);
    CMatrix power = shifted;
    for (int e = 1; e < tm.multiplicities[std::size_t(a)]; ++e) power = power * shifted;
    oracle::Mat k = oracle::kernel(power, 1e-8);
    REQUIRE(k.cols() == tm.multiplicities[std::size_t(a)]);
    for (Eigen::Index j = 0; j < k.cols(); ++j) span.col(col++) = k.col(j);
  }
  hslab::Subspace oracle_space{hslab::orthonormalize(span)};
  REQUIRE(oracle_space.dim() == expected_dim);
  CHECK(hslab::subspace_gap_angle(p.space, oracle_space) < 1e-7);
}

TEST_CASE("invariance residual and trace identity on the seeded ensemble") {
  auto ens = ensemble::build_ensemble(25, 77);
  for (const auto& tm : ens) {
    auto ctx = hslab::make_context(tm.t);
    const double tn = hslab::op_norm(tm.t);
    REQUIRE(ctx.measure.atoms.size() == tm.eigenvalues.size());
    for (std::size_t a = 0; a < tm.eigenvalues.size(); ++a) {
      auto p = hslab::hs_algebraic(ctx, point(tm.eigenvalues[a]));
      // Trace identity: dim/n = region mass, an exact rational equality.
      CHECK(p.trace == Catch::Approx(hslab::region_mass(ctx.measure, p.region))
                           .margin(1e-15));
      // The matching multiplicity (atoms are distinct grid points).
      bool found = false;
      for (std::size_t b = 0; b < tm.eigenvalues.size(); ++b)
        if (std::abs(tm.eigenvalues[b] - tm.eigenvalues[a]) < 1e-9)
          found = p.space.dim() == tm.multiplicities[b];
      CHECK(found);
      CHECK(p.invariance_residual <= 1e-8 * tn);
    }
  }
}

TEST_CASE("monotonicity: smaller regions give contained subspaces") {
  auto tm = ensemble::make_test_matrix(9, 4321);
  auto ctx = hslab::make_context(tm.t);
  Region small = point(tm.eigenvalues[0]);
  Region big = Region::points({tm.eigenvalues[0], tm.eigenvalues[1]}, 1e-7);
  auto ps = hslab::hs_algebraic(ctx, small);
  auto pb = hslab::hs_algebraic(ctx, big);
  CHECK(ps.space.dim() <= pb.space.dim());
  CHECK(hslab::containment_residual(ps.space, pb.space) < 1e-9);
  auto pall = hslab::hs_algebraic(ctx, Region::all());
  CHECK(pall.space.dim() == 9);
  CHECK(hslab::containment_residual(pb.space, pall.space) < 1e-12);
}

TEST_CASE("join and meet match direct union and intersection regions") {
  auto tm = ensemble::make_test_matrix(8, 999);
  auto ctx = hslab::make_context(tm.t);
  // Two overlapping disks around the first two atoms; both contain atom 0.
  Region d1 = Region::disk(tm.eigenvalues[0], 0.05);
  Region d2 = Region::union_of(Region::disk(tm.eigenvalues[0], 0.05),
                               Region::disk(tm.eigenvalues[1], 0.05));
  auto p1 = hslab::hs_algebraic(ctx, d1);
  auto p2 = hslab::hs_algebraic(ctx, d2);

  auto joined = hslab::hs_join({p1, p2});
  auto met = hslab::hs_meet({p1, p2});
  auto direct_union = hslab::hs_algebraic(ctx, Region::union_of(d1, d2));
  auto direct_inter = hslab::hs_algebraic(ctx, Region::intersection(d1, d2));

  REQUIRE(joined.space.dim() == direct_union.space.dim());
  CHECK(hslab::subspace_gap_angle(joined.space, direct_union.space) < 1e-7);
  REQUIRE(met.space.dim() == direct_inter.space.dim());
  CHECK(hslab::subspace_gap_angle(met.space, direct_inter.space) < 1e-7);

  // Join over all atoms is the full space; meet of disjoint regions is zero.
  std::vector<hslab::HSProjection> singles;
  for (Complex ev : tm.eigenvalues)
    singles.push_back(hslab::hs_algebraic(ctx, point(ev)));
  CHECK(hslab::hs_join(singles).space.dim() == 8);
  auto pa = hslab::hs_algebraic(ctx, point(tm.eigenvalues[0]));
  auto pb = hslab::hs_algebraic(ctx, point(tm.eigenvalues[1]));
  CHECK(hslab::hs_meet({pa, pb}).space.dim() == 0);
}

TEST_CASE("power-limit projection on hand inputs") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 0) = 0.5;
  t(1, 1) = 2.0;
  auto p = hslab::hs_power_limit(t, 1.0, 64);
  REQUIRE(p.space.dim() == 1);
  CHECK(std::abs(p.space.basis(0, 0)) == Catch::Approx(1.0).margin(1e-10));
  CHECK(p.method == "power_limit");

  // Nilpotent: every eigenvalue is 0 <= r, the projection is everything.
  CMatrix j3 = CMatrix::Zero(3, 3);
  j3(0, 1) = 1.0;
  j3(1, 2) = 1.0;
  auto pj = hslab::hs_power_limit(j3, 0.1, 64);
  CHECK(pj.space.dim() == 3);
  CHECK(pj.trace == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("power-limit route agrees with the algebraic route across a gap") {
  auto gap = ensemble::build_radial_gap_ensemble(8, 5);
  for (const auto& tm : gap) {
    auto alg = hslab::hs_algebraic(tm.t, Region::annulus(0.0, 1.0, true));
    auto pow = hslab::hs_power_limit(tm.t, 1.0, 256);
    REQUIRE(pow.space.dim() == alg.space.dim());
    CHECK(hslab::subspace_gap_angle(alg.space, pow.space) < 1e-4);
    CHECK(pow.invariance_residual < 1e-4 * (1.0 + hslab::op_norm(tm.t)));
  }
}

TEST_CASE("power-limit refuses an eigenvalue modulus sitting on r") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 0) = 1.0;
  t(1, 1) = 2.0;
  CHECK_THROWS_AS(hslab::hs_power_limit(t, 1.0, 64), hslab::NoSpectralGap);
}

TEST_CASE("growth validation classifies disk and co-disk vectors") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 0) = 0.5;
  t(1, 1) = 2.0;

  auto p_disk = hslab::hs_algebraic(t, Region::annulus(0.0, 1.0, true));
  auto rep = hslab::growth_validate(t, p_disk, 4, 3);
  CHECK(rep.disk_side);
  CHECK(rep.all_pass);
  bool saw_in = false, saw_out = false;
  for (const auto& row : rep.rows) {
    if (row.in_range) {
      saw_in = true;
      CHECK(row.estimate == Catch::Approx(0.5).epsilon(1e-6));
    } else {
      saw_out = true;
      CHECK(row.estimate > 1.0);
    }
  }
  CHECK((saw_in && saw_out));

  auto p_codisk = hslab::hs_algebraic(
      t, Region::annulus(1.0, std::numeric_limits<double>::infinity(), true));
  p_codisk.region = Region::annulus(1.0, std::numeric_limits<double>::infinity(), true);
  auto rep2 = hslab::growth_validate(t, p_codisk, 4, 3);
  CHECK_FALSE(rep2.disk_side);
  CHECK(rep2.all_pass);
  for (const auto& row : rep2.rows) {
    CHECK(row.estimate == Catch::Approx(0.5).epsilon(1e-6));  // ||eta_n||^{1/n} -> 1/2
    CHECK(row.recovery < 1e-8);
  }

  CHECK_THROWS_AS(
      hslab::growth_validate(t, hslab::hs_algebraic(t, point({0.5, 0})), 2, 3),
      hslab::DomainError);
}

TEST_CASE("growth classification is consistent on a seeded matrix") {
  auto gap = ensemble::build_radial_gap_ensemble(3, 17);
  for (const auto& tm : gap) {
    auto p = hslab::hs_algebraic(tm.t, Region::annulus(0.0, 1.0, true));
    auto rep = hslab::growth_validate(tm.t, p, 6, 23);
    CHECK(rep.all_pass);
  }
}

TEST_CASE("similarity law: identity, unitary, and conditioned conjugators") {
  auto tm = ensemble::make_test_matrix(7, 31);
  Region b = point(tm.eigenvalues[0]);

  auto rep_id = hslab::hs_similarity(tm.t, hslab::cidentity(7), b);
  CHECK(rep_id.cond_a == Catch::Approx(1.0).margin(1e-10));
  // arccos of a near-1 sigma floors the reported angle near sqrt(eps).
  CHECK(rep_id.angle < 1e-7);
  CHECK(rep_id.pass);

  hslab::Rng rng(88);
  CMatrix u = ensemble::random_unitary(7, rng);
  auto rep_u = hslab::hs_similarity(tm.t, u, b);
  CHECK(rep_u.cond_a == Catch::Approx(1.0).margin(1e-10));
  CHECK(rep_u.angle < 1e-9);
  CHECK(rep_u.pass);

  // Conjugator with condition number near 10.
  CMatrix u1 = ensemble::random_unitary(7, rng);
  CMatrix u2 = ensemble::random_unitary(7, rng);
  hslab::RVector sig(7);
  for (int i = 0; i < 7; ++i) sig(i) = 0.316 + (3.16 - 0.316) * double(i) / 6.0;
  CMatrix a = u1 * sig.asDiagonal().toDenseMatrix().cast<Complex>() * u2.adjoint();
  auto rep_c = hslab::hs_similarity(tm.t, a, b);
  CHECK(rep_c.cond_a == Catch::Approx(10.0).epsilon(1e-6));
  CHECK(rep_c.pass);

  CHECK_THROWS_AS(hslab::hs_similarity(tm.t, CMatrix::Zero(7, 7), b),
                  hslab::DomainError);
}

TEST_CASE("joint product reduces to single projections in degenerate cases") {
  auto tm = ensemble::make_test_matrix(6, 55);
  Region b = point(tm.eigenvalues[0]);

  auto joint_same = hslab::hs_joint_product(tm.t, tm.t, b, b);
  auto single = hslab::hs_algebraic(tm.t, b);
  REQUIRE(joint_same.space.dim() == single.space.dim());
  CHECK(hslab::subspace_gap_angle(joint_same.space, single.space) < 1e-7);

  auto joint_all = hslab::hs_joint_product(tm.t, tm.t, b, Region::all());
  REQUIRE(joint_all.space.dim() == single.space.dim());
  CHECK(hslab::subspace_gap_angle(joint_all.space, single.space) < 1e-7);
}

TEST_CASE("joint product counts joint eigenvalues of a commuting pair") {
  // s = m, t = m^2 - m for an upper-triangular m: they commute, and the joint
  // spectrum pairs (m_ii, m_ii^2 - m_ii) are known from the diagonal.
  CMatrix m = CMatrix::Zero(5, 5);
  const double diag_vals[5] = {0.2, 0.5, 0.9, 1.4, 2.0};
  hslab::Rng rng(66);
  for (int i = 0; i < 5; ++i) {
    m(i, i) = diag_vals[i];
    for (int j = i + 1; j < 5; ++j) m(i, j) = 0.3 * rng.cgaussian();
  }
  CMatrix s = m;
  CMatrix t = m * m - m;
  Region b1 = Region::disk({0, 0}, 1.0);    // |m_ii| <= 1: {0.2, 0.5, 0.9}
  Region b2 = Region::disk({0, 0}, 0.26);   // |m_ii^2 - m_ii| <= 0.26
  int expected = 0;
  for (double v : diag_vals)
    if (b1.contains({v, 0}) && b2.contains({v * v - v, 0})) ++expected;
  REQUIRE(expected > 0);
  auto joint = hslab::hs_joint_product(s, t, b1, b2);
  CHECK(joint.space.dim() == expected);
  CHECK(joint.method == "joint");

  CMatrix nc = seeded(5, 505);
  CHECK_THROWS_AS(hslab::hs_joint_product(s, nc, b1, b2), hslab::DomainError);
}

TEST_CASE("pushforward law on constructed commuting nilpotent pairs") {
  auto tm = ensemble::make_test_matrix(8, 2718);
  Region b = point(tm.eigenvalues[0]);
  auto rep = hslab::hs_pushforward_check(tm.s_part, tm.q_part, b);
  CHECK(rep.dim_sum == rep.dim_base);
  CHECK(rep.angle < 1e-6);
  CHECK(rep.pass);

  // q = 0 gives angle exactly zero.
  auto rep0 = hslab::hs_pushforward_check(
      tm.s_part, CMatrix::Zero(8, 8), b);
  CHECK(rep0.angle < 1e-14);
  CHECK(rep0.pass);

  // s = lambda I with any nilpotent: the {lambda} projection is everything.
  CMatrix s = Complex(0.4, -0.2) * hslab::cidentity(4);
  CMatrix q = CMatrix::Zero(4, 4);
  q(0, 1) = 0.7;
  q(2, 3) = -0.3;
  auto repl = hslab::hs_pushforward_check(s, q, point({0.4, -0.2}));
  CHECK(repl.dim_sum == 4);
  CHECK(repl.pass);

  // Preconditions: commuting failure and non-nilpotent q both refuse.
  CMatrix bad_q = seeded(8, 806);
  CHECK_THROWS_AS(hslab::hs_pushforward_check(tm.s_part, bad_q, b),
                  hslab::DomainError);
  CHECK_THROWS_AS(
      hslab::hs_pushforward_check(s, hslab::cidentity(4), point({0.4, -0.2})),
      hslab::DomainError);
}

TEST_CASE("decomposability: compression spectra stay in the closed region") {
  auto tm = ensemble::make_test_matrix(8, 414);
  Region b = Region::disk(tm.eigenvalues[0], 0.1);
  auto rep = hslab::decomposability_check(tm.t, b);
  CHECK(rep.pass_direct);
  CHECK(rep.pass_complement);
  CHECK(rep.pass);
  for (Complex z : rep.spectrum_direct)
    CHECK(std::abs(z - tm.eigenvalues[0]) < 0.1 + 1e-6);
}

TEST_CASE("boundary atoms are reported when a cluster touches the frontier") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 0) = 1.0;
  t(1, 1) = 2.0;
  auto p = hslab::hs_algebraic(t, Region::disk({0, 0}, 1.0));
  REQUIRE(p.boundary_atoms.size() == 1);
  CHECK(std::abs(p.boundary_atoms[0] - Complex(1, 0)) < 1e-9);
  CHECK(p.space.dim() == 1);  // closed disk contains the atom at 1
}
