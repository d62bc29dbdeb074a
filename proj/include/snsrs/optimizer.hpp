#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "snsrs/keyrate.hpp"
#include "snsrs/params.hpp"

namespace snsrs {

// Box bounds for the seven free protocol variables; p_z is 1-p_v-p_x-p_y.
struct OptimizerBounds {
  double p_v_lo = 0.01, p_v_hi = 0.99;
  double p_x_lo = 1e-4, p_x_hi = 0.5;
  double p_y_lo = 1e-4, p_y_hi = 0.5;
  double mu_x_lo = 1e-4, mu_x_hi = 1.0;
  double mu_y_hi = 1.5;  // lower limit is mu_x
  double mu_z_lo = 1e-3, mu_z_hi = 2.0;
  double lambda_lo = 1e-4, lambda_hi = 1.0;
};

struct OptimizerConfig {
  int budget = 20000;  // objective evaluations per point
  int restarts = 5;
  std::uint64_t seed = 1;
  OptimizerBounds bounds;
};

struct TracePoint {
  int evaluation = 0;
  ProtocolParams params;
  double rate = 0.0;
};

struct OptResult {
  ProtocolParams best;
  double rate = 0.0;
  int evaluations = 0;
  std::vector<TracePoint> trace;  // one entry per improvement
  bool hit_bound = false;
};

using Objective = std::function<double(const ProtocolParams&)>;

// Derivative-free maximization: coordinate descent with golden-section line
// search per variable, seeded random restarts, then a Nelder-Mead polish.
// Deterministic for a fixed seed. The optional init point joins the restart
// pool (warm start).
OptResult optimize(const Objective& objective, int m, double N,
                   double lambda_hint, const OptimizerConfig& config,
                   const std::optional<ProtocolParams>& init = {});

// Convenience: maximizes the finite-key (or asymptotic) secret key rate of
// the full analytic pipeline at one channel point.
OptResult optimize_rate(const ChannelParams& channel,
                        const SecurityParams& security, int m, double N,
                        bool asymptotic, const OptimizerConfig& config,
                        const std::optional<ProtocolParams>& init = {});

struct ScanRow {
  KeyRateResult result;
  int m = 0;
};

// Optimized key rate per (distance, m) point; distances must be ascending.
// With warm_start each distance starts from the previous optimum.
std::vector<ScanRow> scan(const std::vector<double>& distances,
                          const std::vector<int>& m_values,
                          const ChannelParams& channel,
                          const SecurityParams& security, double N,
                          bool asymptotic, const OptimizerConfig& config,
                          bool warm_start);

}  // namespace snsrs
