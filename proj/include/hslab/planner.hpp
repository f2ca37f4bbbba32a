#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hslab/errors.hpp"

namespace hslab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline double to_double(const Rational& r) {
  return r.numerator().convert_to<double>() /
         r.denominator().convert_to<double>();
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << "/" << r.denominator();
  return os.str();
}

struct PlanStep {
  int k = 0;
  BigInt n;           // block count N_k
  Rational delta1;    // inner target gap bound
  Rational delta2;
  Rational gap;       // N_k (delta1 - delta2), drives the angle upward
  double delta1_d = 0, delta2_d = 0, gap_d = 0;
};

namespace detail {

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
  // both positive in this planner
  return num / den;
}

inline BigInt floor_rat(const Rational& r) {
  return detail::floor_div(r.numerator(), r.denominator());
}

}  // namespace detail

// Exact-rational schedule (N_k, delta1^k, delta2^k) with, for every step,
//   1/N_k < delta2^k < delta1^k < delta2^{k-1} - 1/N_{k-1} - 1/N_k
//   2/N_k < delta2^{k-1} - 1/N_{k-1}
// and N_k (delta1^k - delta2^k) strictly decreasing (< 1/(k-1) for k >= 2).
// Step 1 is pinned to (N, d1, d2) = (3, 5/9, 4/9).
inline std::vector<PlanStep> delta_sequence_planner(int steps) {
  if (steps < 1) throw DomainError("delta_sequence_planner: steps must be >= 1");
  std::vector<PlanStep> plan;
  plan.reserve(std::size_t(steps));

  PlanStep first;
  first.k = 1;
  first.n = 3;
  first.delta1 = Rational(5, 9);
  first.delta2 = Rational(4, 9);
  first.gap = Rational(first.n) * (first.delta1 - first.delta2);
  plan.push_back(first);

  for (int k = 2; k <= steps; ++k) {
    const PlanStep& prev = plan.back();
    const Rational room = prev.delta2 - Rational(1, prev.n);
    if (room <= Rational(0))
      throw DomainError("delta_sequence_planner: no room below step " +
                        std::to_string(k - 1));
    // 2/N < room with margin: N = floor(4/room) + 1
    PlanStep step;
    step.k = k;
    step.n = detail::floor_rat(Rational(4) / room) + 1;
    const Rational lo = Rational(1, step.n);
    const Rational hi = room - lo;
    step.delta1 = lo + Rational(3, 4) * (hi - lo);
    Rational target = Rational(1, k);  // enforce gap < 1/(k-1) strictly
    const Rational shrunk = prev.gap * Rational(3, 4);
    if (shrunk < target) target = shrunk;
    step.delta2 = step.delta1 - target / Rational(step.n);
    step.gap = Rational(step.n) * (step.delta1 - step.delta2);
    plan.push_back(step);
  }

  for (std::size_t i = 0; i < plan.size(); ++i) {
    PlanStep& s = plan[i];
    const Rational inv_n(1, s.n);
    if (!(inv_n < s.delta2 && s.delta2 < s.delta1))
      throw DomainError("delta_sequence_planner: ordering violated at step " +
                        std::to_string(s.k));
    if (i > 0) {
      const PlanStep& p = plan[i - 1];
      const Rational ceiling = p.delta2 - Rational(1, p.n) - inv_n;
      if (!(s.delta1 < ceiling))
        throw DomainError("delta_sequence_planner: nesting violated at step " +
                          std::to_string(s.k));
      if (!(Rational(2, s.n) < p.delta2 - Rational(1, p.n)))
        throw DomainError("delta_sequence_planner: width margin violated at step " +
                          std::to_string(s.k));
      if (!(s.gap < p.gap))
        throw DomainError("delta_sequence_planner: gap not decreasing at step " +
                          std::to_string(s.k));
      if (!(s.gap < Rational(1, s.k - 1)))
        throw DomainError("delta_sequence_planner: gap bound violated at step " +
                          std::to_string(s.k));
    }
    s.delta1_d = to_double(s.delta1);
    s.delta2_d = to_double(s.delta2);
    s.gap_d = to_double(s.gap);
  }
  return plan;
}

}  // namespace hslab
