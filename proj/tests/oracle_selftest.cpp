#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"

using oracle::Complex;
using oracle::Mat;

namespace {

// Deterministic filler independent of the library's RNG.
Mat random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(u(gen), u(gen));
  return m;
}

// Build monic coefficients from prescribed roots by convolution.
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{Complex(1.0, 0.0)};
  for (Complex r : roots) {
    std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= r * c[j];
    }
    c = std::move(next);
  }
  return c;
}

}  // namespace

TEST_CASE("jacobi eigenvalues match hand-computed 2x2 Hermitian spectrum") {
  Mat a(2, 2);
  a << Complex(2, 0), Complex(1, -1), Complex(1, 1), Complex(3, 0);
  // trace 5, det 6 - |1-i|^2 = 4, so the spectrum is {1, 4}.
  auto ev = oracle::hermitian_eigenvalues(a);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(ev[1] == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("jacobi eigenvalues recover a rank-two spectral sum") {
  // A = 2 uu* + 5 vv* with u, v orthonormal => spectrum {0, 2, 5}.
  Eigen::Vector3cd u, v;
  u << Complex(1, 0), Complex(0, 1), Complex(0, 0);
  v << Complex(1, 0), Complex(0, -1), Complex(0, 0);
  u /= std::sqrt(2.0);
  v /= std::sqrt(2.0);
  Mat a = 2.0 * u * u.adjoint() + 5.0 * v * v.adjoint();
  auto ev = oracle::hermitian_eigenvalues(a);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(ev[1] == Catch::Approx(2.0).margin(1e-12));
  CHECK(ev[2] == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("characteristic polynomial of a triangular matrix is exact") {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = Complex(1, 0);
  a(1, 1) = Complex(0, 2);
  a(2, 2) = Complex(-1, 0);
  a(0, 1) = Complex(3, 1);
  a(1, 2) = Complex(-2, 0.5);
  // (x-1)(x-2i)(x+1) = x^3 - 2i x^2 - x + 2i
  auto c = oracle::char_poly(a);
  REQUIRE(c.size() == 4);
  CHECK(std::abs(c[3] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(c[2] - Complex(0, -2)) < 1e-12);
  CHECK(std::abs(c[1] - Complex(-1, 0)) < 1e-12);
  CHECK(std::abs(c[0] - Complex(0, 2)) < 1e-12);
}

TEST_CASE("characteristic polynomial of a companion-style 2x2") {
  Mat a(2, 2);
  a << Complex(0, 0), Complex(1, 0), Complex(-2, 0), Complex(3, 0);
  auto c = oracle::char_poly(a);  // x^2 - 3x + 2
  REQUIRE(c.size() == 3);
  CHECK(std::abs(c[1] - Complex(-3, 0)) < 1e-13);
  CHECK(std::abs(c[0] - Complex(2, 0)) < 1e-13);
  auto roots = oracle::poly_roots(c);
  CHECK(oracle::spectrum_distance(roots, {Complex(1, 0), Complex(2, 0)}) < 1e-10);
}

TEST_CASE("durand-kerner recovers prescribed simple roots") {
  std::vector<Complex> roots{Complex(0.5, 0), Complex(-1.5, 0), Complex(0, 2),
                             Complex(0, -2), Complex(3, 0.25)};
  auto c = poly_from_roots(roots);
  auto found = oracle::poly_roots(c);
  CHECK(oracle::spectrum_distance(found, roots) < 1e-9);
}

TEST_CASE("eigenvalue oracle is consistent with the Jacobi oracle on Hermitian input") {
  Mat b = random_matrix(6, 6, 20240401u);
  Mat h = (b + b.adjoint()) / 2.0;
  auto jac = oracle::hermitian_eigenvalues(h);
  auto dk = oracle::eigenvalues(h);
  std::vector<Complex> jac_c;
  for (double x : jac) jac_c.emplace_back(x, 0.0);
  CHECK(oracle::spectrum_distance(dk, jac_c) < 1e-8);
}

TEST_CASE("elimination rank and kernel on hand cases") {
  Mat a(2, 2);
  a << Complex(1, 0), Complex(2, 0), Complex(2, 0), Complex(4, 0);
  CHECK(oracle::rank(a) == 1);
  Mat k = oracle::kernel(a);
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(k(0, 0) / k(1, 0) + 2.0) < 1e-12);
  CHECK((a * k).norm() < 1e-12 * k.norm());

  Mat id = Mat::Identity(4, 4);
  CHECK(oracle::rank(id) == 4);
  CHECK(oracle::kernel(id).cols() == 0);

  Mat z = Mat::Zero(3, 5);
  CHECK(oracle::rank(z) == 0);
  CHECK(oracle::kernel(z).cols() == 5);
}

TEST_CASE("elimination rank and kernel on seeded low-rank products") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Mat x = random_matrix(7, 3, seed);
    Mat y = random_matrix(3, 7, seed + 100);
    Mat a = x * y;
    CHECK(oracle::rank(a) == 3);
    Mat k = oracle::kernel(a);
    REQUIRE(k.cols() == 4);
    CHECK((a * k).norm() < 1e-10 * a.norm() * k.norm());
  }
}

TEST_CASE("annulus radial cdf closed form") {
  CHECK(oracle::annulus_radial_cdf(1.0, 2.0, 1.0) == 0.0);
  CHECK(oracle::annulus_radial_cdf(1.0, 2.0, 2.0) == 1.0);
  CHECK(oracle::annulus_radial_cdf(1.0, 2.0, std::sqrt(2.5)) ==
        Catch::Approx(0.5).margin(1e-14));
  double prev = -1.0;
  for (double r = 0.9; r <= 2.15; r += 0.05) {
    double f = oracle::annulus_radial_cdf(1.0, 2.0, r);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("free poisson cdf: edges, normalization, monotonicity, mean") {
  const double c = 2.0;
  const double a = oracle::free_poisson_low_edge(c);
  const double b = oracle::free_poisson_high_edge(c);
  CHECK(a == Catch::Approx(3.0 - 2.0 * std::sqrt(2.0)).margin(1e-14));
  CHECK(b == Catch::Approx(3.0 + 2.0 * std::sqrt(2.0)).margin(1e-14));
  CHECK(oracle::free_poisson_cdf(c, a) == 0.0);
  CHECK(oracle::free_poisson_cdf(c, b) == 1.0);
  // Just inside the top edge the mass deficit is O(eps^{3/2}).
  CHECK(oracle::free_poisson_cdf(c, b - 1e-9 * (b - a)) ==
        Catch::Approx(1.0).margin(1e-6));

  double prev = 0.0;
  const int grid = 400;
  double mean = 0.0;
  double f_prev = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double t = a + (b - a) * double(i) / double(grid);
    const double f = oracle::free_poisson_cdf(c, t);
    CHECK(f >= prev - 1e-12);
    mean += (t - 0.5 * (b - a) / double(grid)) * (f - f_prev);
    f_prev = f;
    prev = f;
  }
  // The mean of this law equals c (hand identity: (b-a)^2/16 with b-a = 4 sqrt(c)).
  CHECK(mean == Catch::Approx(c).margin(5e-3));
}

TEST_CASE("kolmogorov distance against the uniform cdf") {
  const std::size_t n = 50;
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back((double(i) + 0.5) / double(n));
  auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(oracle::ks_distance(xs, uniform_cdf) ==
        Catch::Approx(0.5 / double(n)).margin(1e-12));
  for (auto& x : xs) x = std::min(1.0, x + 0.2);
  CHECK(oracle::ks_distance(xs, uniform_cdf) > 0.15);
}
