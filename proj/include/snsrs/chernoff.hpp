#pragma once

#include <cstdint>

namespace snsrs {

// Binary Shannon entropy H(x) = -x log2 x - (1-x) log2 (1-x), H(0)=H(1)=0.
// Throws std::domain_error outside [0,1].
double binary_entropy(double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Tracks how much failure probability a pipeline run has spent: each bound
// invocation costs its epsilon once.
struct BoundLedger {
  int invocations = 0;
  double spent = 0.0;
  void charge(double epsilon) {
    ++invocations;
    spent += epsilon;
  }
};

// Chernoff bounds on the expected value of a sum X of Bernoulli samples,
// each side failing with probability epsilon/2:
//   lo = X/(1+delta1), hi = X/(1-delta2),
// where delta1, delta2 solve
//   (e^{d1}/(1+d1)^{1+d1})^{X/(1+d1)} = epsilon/2,
//   (e^{-d2}/(1-d2)^{1-d2})^{X/(1-d2)} = epsilon/2.
// hi(0) = ln(2/epsilon), the Poisson-tail limit. epsilon >= 1 means a vacuous
// bound and returns (X, X).
Interval chernoff_expected_bounds(double X, double epsilon,
                                  BoundLedger* ledger = nullptr);

// Chernoff bounds on the real value of a sum whose expected value is Y:
//   hi = (1+delta1')Y, lo = (1-delta2')Y,
// with delta2' clamped to <= 1 (lo = 0) when Y < ln(2/epsilon).
// Y = 0 degenerates to (0, 0). epsilon >= 1 returns (Y, Y).
Interval chernoff_real_bounds(double Y, double epsilon,
                              BoundLedger* ledger = nullptr);

}  // namespace snsrs
