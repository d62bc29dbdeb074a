#pragma once

#include <array>
#include <vector>

#include "snsrs/params.hpp"

namespace snsrs {

// Closed-form expected counting statistics per window class and mode under
// the linear loss model with redundant-space post-selection.
//
// Detector layout: 2m threshold detectors (left/right of the beamsplitter,
// one pair per mode). A detector illuminated with mean photon number I
// clicks with probability 1-(1-d)e^{-I}. An event is accepted when exactly
// one of the 2m detectors clicks and its mode matches every non-vacuum
// sender's mode. Misalignment enters through the interference visibility
// only: y' = (1-2*E_d) * 2*eta*sqrt(mu_l*mu_r).
struct ExpectedStats {
  int m = 1;
  double N_vv = 0.0;  // windows with both sides vacuum
  // Indexed [class][mode j].
  std::array<std::vector<double>, kNumClasses> windows;  // N_lr(r_j)
  std::array<std::vector<double>, kNumClasses> rate;     // S_lr(r_j)
  std::vector<double> n_delta;  // N_Delta(r_j), xx slice instances
  std::vector<double> t_delta;  // T_Delta(r_j), slice error counting rate
  std::vector<double> w_tx;     // expected error counts W_TX(r_j)

  // Expected number of accepted events in class c announced with mode j.
  double expected_accepted(WindowClass c, int j) const {
    return rate[c.index()][j] * windows[c.index()][j];
  }
};

// Window-count bookkeeping alone (no channel physics):
//   N_vv        = N p_v^2
//   N_lv(r_j)   = N p_l p_v P_{r_j}          (one-sided, and symmetric)
//   N_lr(r_j)   = N p_l p_r P_{r_j}^2        (two-sided, both chose r_j)
//   N_Delta(r_j)= (Delta/pi) p_x^2 N P_{r_j}^2
ExpectedStats window_counts(const ProtocolParams& params);

// Full expected statistics: window counts plus all counting rates S_lr(r_j),
// the slice error rate T_Delta(r_j), and expected W_TX(r_j).
ExpectedStats counting_rates(const ProtocolParams& params,
                             const ChannelParams& channel);

// Slice error counting rate for xx windows: the average over the announced
// phase slice of the probability that the destructive-interference detector
// of the senders' mode is the only clicking detector.
std::vector<double> phase_slice_error_rate(const ProtocolParams& params,
                                           const ChannelParams& channel);

namespace detail {
// Adaptive Simpson quadrature of f over [a,b], relative tolerance rel_tol.
double integrate(double (*f)(double, const void*), const void* ctx, double a,
                 double b, double rel_tol);
}  // namespace detail

}  // namespace snsrs
