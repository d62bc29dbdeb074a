#pragma once

#include <string>

#include "snsrs/analytic.hpp"
#include "snsrs/decoy.hpp"
#include "snsrs/mc.hpp"
#include "snsrs/params.hpp"

namespace snsrs {

struct CodeBits {
  double n_V = 0.0;  // accepted events in vv windows
  double n_C = 0.0;  // accepted events in vz and zv windows
  double n_D = 0.0;  // accepted events in zz windows
  double n_t = 0.0;  // n_V + n_C + n_D
  double E_t = 0.0;  // (n_V + n_D) / n_t, 0 when n_t = 0
};

// Code-bit accounting from expected counting rates:
//   n_V = N p_v^2 sum_j S_vv(r_j)
//   n_C = N p_z p_v sum_j P_j [S_vz(r_j) + S_zv(r_j)]
//   n_D = N p_z^2 sum_j P_j^2 S_zz(r_j)
CodeBits code_bits(const ExpectedStats& stats, const ProtocolParams& params);

// Same accounting from an event-level tally (direct recount).
CodeBits code_bits(const ObservedCounts& observed);

// Secret key length:
//   N_f = n1 [1 - H(e1ph)] - f n_t H(E_t)
//         - log2(2/eps_cor) - 2 log2(1/(sqrt(2) eps_PA eps_hat)),
// clamped at 0.
double key_length(double n1, double e1ph, double n_t, double E_t,
                  const SecurityParams& security);

// Repeaterless bound -log2(1 - eta_tot) with eta_tot = 10^(-alpha L / 10);
// with use_detector_efficiency the channel transmittance is multiplied by
// eta0 (the relative bound).
double plob_bound(const ChannelParams& channel, bool use_detector_efficiency);

struct KeyRateResult {
  double distance_km = 0.0;
  ProtocolParams params;
  double n1 = 0.0;
  double e1ph = 0.0;
  double n_t = 0.0;
  double E_t = 0.0;
  double N_f = 0.0;
  double rate = 0.0;
  // Key length before the clamp at zero; negative values preserve the
  // objective's slope for the optimizer.
  double N_f_raw = 0.0;
  double plob1 = 0.0;  // relative bound (with eta0)
  double plob2 = 0.0;  // absolute bound
  CodeBits diagnostics;
  bool asymptotic = false;
  std::string flags;  // semicolon-joined diagnostic flags
  double epsilon_spent = 0.0;
  int bound_invocations = 0;
};

// Full pipeline on analytic expectations: counting rates, decoy analysis
// (finite-key Chernoff bounds, or expectations when asymptotic), code-bit
// accounting, key length. Asymptotic mode drops the constant finite-size
// terms of the key length.
KeyRateResult evaluate(const ProtocolParams& params,
                       const ChannelParams& channel,
                       const SecurityParams& security, bool asymptotic);

std::string keyrate_csv_header();
std::string keyrate_csv_row(const KeyRateResult& result, int m);

}  // namespace snsrs
