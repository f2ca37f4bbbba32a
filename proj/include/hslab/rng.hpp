#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace hslab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable per-trial / per-stream seed derivation from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// mt19937_64 is fully specified by the standard; uniforms and gaussians are
// built from its raw output directly so that a fixed seed reproduces the same
// bytes on every run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // uniform on [0, 1)
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  // uniform on (0, 1]
  double uniform_pos() { return double((eng_() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard real gaussian, Box-Muller
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform_pos();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * M_PI * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // standard complex gaussian: E|z|^2 = 1
  std::complex<double> cgaussian() {
    double re = gaussian();
    double im = gaussian();
    return std::complex<double>(re, im) / std::sqrt(2.0);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hslab
