#include "snsrs/chernoff.hpp"

#include <cmath>
#include <stdexcept>

namespace snsrs {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

constexpr int kMaxIter = 200;

// Bisection for a monotone decreasing f on [lo, hi] with f(lo) >= target
// >= f(hi); returns t with f(t) = target to machine precision.
template <class F>
double bisect_decreasing(F f, double lo, double hi, double target) {
  for (int i = 0; i < kMaxIter; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Interval chernoff_expected_bounds(double X, double epsilon,
                                  BoundLedger* ledger) {
  if (X < 0.0) throw std::domain_error("chernoff_expected_bounds: X < 0");
  if (!(epsilon > 0.0)) {
    throw std::domain_error("chernoff_expected_bounds: epsilon <= 0");
  }
  if (ledger) ledger->charge(epsilon);
  if (epsilon >= 1.0) return {X, X};  // vacuous bound

  const double target = std::log(epsilon / 2.0);  // < 0
  const double L = -target;

  // Upper bound X/(1-delta2) = X + t where
  //   h(t) = -t + X*log1p(t/X) = target.
  double t_up;
  if (X == 0.0) {
    t_up = L;
  } else {
    auto h = [X](double t) { return -t + X * std::log1p(t / X); };
    double hi = L + std::sqrt(L * L + 2.0 * L * X) + 1.0;
    t_up = bisect_decreasing(h, 0.0, hi, target);
  }

  // Lower bound X/(1+delta1) = X - t: substituting delta1 = t/(X-t) into
  // the exponent gives
  //   g(t) = t + X*log1p(-t/X) = target, t in [0, X).
  double t_lo = X;
  if (X > 0.0) {
    auto g = [X](double t) { return t + X * std::log1p(-t / X); };
    t_lo = bisect_decreasing(g, 0.0, X, target);
  }

  return {X - t_lo, X + t_up};
}

Interval chernoff_real_bounds(double Y, double epsilon, BoundLedger* ledger) {
  if (Y < 0.0) throw std::domain_error("chernoff_real_bounds: Y < 0");
  if (!(epsilon > 0.0)) {
    throw std::domain_error("chernoff_real_bounds: epsilon <= 0");
  }
  if (ledger) ledger->charge(epsilon);
  if (epsilon >= 1.0) return {Y, Y};
  if (Y == 0.0) return {0.0, 0.0};  // equations degenerate at Y = 0

  const double target = std::log(epsilon / 2.0);
  const double L = -target;

  // Upper bound (1+delta1')Y = Y + t where
  //   f(t) = t - (Y+t)*log1p(t/Y) = target.
  auto f = [Y](double t) { return t - (Y + t) * std::log1p(t / Y); };
  double hi = L + std::sqrt(L * L + 8.0 * L * Y) + 1.0;
  double t_up = bisect_decreasing(f, 0.0, hi, target);

  // Lower bound (1-delta2')Y = Y - t where
  //   q(t) = -t - (Y-t)*log1p(-t/Y) = target, t in [0, Y].
  // q(Y) = -Y, so for Y < ln(2/epsilon) the equation has no root and
  // delta2' clamps to 1 (lower bound 0).
  double t_lo = Y;
  if (Y > L) {
    auto q = [Y](double t) { return -t - (Y - t) * std::log1p(-t / Y); };
    t_lo = bisect_decreasing(q, 0.0, Y, target);
  }

  return {Y - t_lo, Y + t_up};
}

}  // namespace snsrs
