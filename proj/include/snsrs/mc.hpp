#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "snsrs/analytic.hpp"
#include "snsrs/params.hpp"

namespace snsrs {

// Event-level tallies from a simulated run of the protocol.
// Tallies are stored as doubles; they are exact integers up to 2^53.
struct ObservedCounts {
  int m = 1;
  double n_trials = 0.0;
  std::uint64_t seed = 0;
  std::string rng_name = "mt19937_64";

  double n_vv_windows = 0.0;  // N_vv
  // Indexed [class][mode]. windows follows the N_lr(r_j) convention:
  // both-chose-r_j for two-sided classes, sender-chose-r_j for one-sided.
  std::array<std::vector<double>, kNumClasses> windows;
  // heralded/accepted are tallied by Charlie's announced mode.
  std::array<std::vector<double>, kNumClasses> heralded;
  std::array<std::vector<double>, kNumClasses> accepted;
  std::vector<double> n_delta;  // xx same-mode windows inside the phase slice
  std::vector<double> w_tx;     // error accepted events in the slice

  double accepted_sum(WindowClass c) const;
};

// Simulates n_trials time windows of the protocol: intensity/mode/phase
// choices, per-detector Bernoulli clicks with probability 1-(1-d)e^{-I},
// one-detector heralding, and mode rejection. Deterministic for a fixed
// seed; trials are sharded with sub-seeds derived from (seed, shard) and
// merged in shard order, so the result is independent of thread count.
ObservedCounts simulate(const ProtocolParams& params,
                        const ChannelParams& channel, std::uint64_t n_trials,
                        std::uint64_t seed, int n_threads = 0);

struct CompareBin {
  std::string name;
  double windows = 0.0;
  double expected = 0.0;  // expected accepted count
  double observed = 0.0;
  double z = 0.0;
};

struct CompareReport {
  std::vector<CompareBin> flagged;  // bins with |z| > threshold
  std::vector<CompareBin> bins;     // every bin checked
  bool agree() const { return flagged.empty(); }
};

// Per-bin z-scores of observed accepted counts against analytic rates,
// using the realized window counts as binomial denominators. Bins with an
// expected count below 25 use the exact Poisson tail probability converted
// to an equivalent Gaussian z, so the threshold keeps its meaning in the
// low-count regime. Expected rate 0 with observed count 0 gives z = 0.
CompareReport compare(const ObservedCounts& observed,
                      const ExpectedStats& expected, double sigma_threshold);

// Expected tallies (real-valued) from analytic statistics, used to run the
// finite-key analysis on expectation values.
ObservedCounts expected_counts(const ExpectedStats& stats,
                               const ProtocolParams& params);

// Standard normal quantile of 1-p for p in (0, 1], via bisection on erfc.
double upper_tail_z(double p);

}  // namespace snsrs
