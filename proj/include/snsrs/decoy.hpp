#pragma once

#include <vector>

#include "snsrs/chernoff.hpp"
#include "snsrs/mc.hpp"
#include "snsrs/params.hpp"

namespace snsrs {

// Finite-key 4-intensity decoy-state analysis: lower bound on the untagged
// bit count n1 and upper bound on the untagged phase-flip error rate e1ph.
struct DecoyResult {
  double n1 = 0.0;
  double e1ph = 0.0;
  double n1_mean_L = 0.0;    // lower bound on <n1>
  double e1ph_mean_U = 0.0;  // upper bound on <e1ph>
  bool clamped_n1 = false;
  bool clamped_e1ph = false;
  bool no_untagged = false;  // n1 = 0: zero extractable key

  // phi-bounded sums, kept for audit.
  double phiL_nvx_sum = 0.0;
  double phiU_nvy_sum = 0.0;
  double phiU_nvv_sum = 0.0;
  double phiU_wtx_sum = 0.0;
  double phiL_nvv_sum = 0.0;
};

// Per-mode counting rates feeding the single-photon estimator.
struct ClassRates {
  std::vector<double> vx, xv, vy, yv, vv;
};

// Asymptotic single-photon counting rate estimate per mode:
//   <s1(r_j)> = [S+ - S- - 2(mu_y^2-mu_x^2) S_vv] / (2 mu_x mu_y (mu_y-mu_x))
// with S+ = mu_y^2 e^{mu_x} (S_vx + S_xv), S- = mu_x^2 e^{mu_y} (S_vy + S_yv).
// Negative results clamp to 0 and set *clamped.
std::vector<double> s1_mean(const ClassRates& rates,
                            const ProtocolParams& params,
                            bool* clamped = nullptr);

// Finite-key lower bound on the untagged-bit count. Applies phi^L/phi^U to
// the mode-summed counts (joint statistical-fluctuation constraints on the
// sums), then maps the expected-value bound to a real-value bound.
// Requires uniform mode probabilities. epsilon >= 1 bypasses fluctuations.
DecoyResult n1_lower(const ObservedCounts& observed,
                     const ProtocolParams& params,
                     const SecurityParams& security,
                     BoundLedger* ledger = nullptr);

// Adds the phase-flip error bound to a n1_lower result:
//   <e1ph>^U from the slice error counts W_TX and the vacuum counts n_vv,
//   then e1ph = phihat^U(n1 * <e1ph>^U) / n1, clamped to [0, 0.5].
void e1ph_upper(const ObservedCounts& observed, const ProtocolParams& params,
                const SecurityParams& security, DecoyResult& result,
                BoundLedger* ledger = nullptr);

// Full decoy analysis (n1 then e1ph).
DecoyResult analyze(const ObservedCounts& observed,
                    const ProtocolParams& params,
                    const SecurityParams& security,
                    BoundLedger* ledger = nullptr);

}  // namespace snsrs
