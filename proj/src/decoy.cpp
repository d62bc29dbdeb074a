#include "snsrs/decoy.hpp"

#include <cmath>
#include <stdexcept>

namespace snsrs {

std::vector<double> s1_mean(const ClassRates& rates,
                            const ProtocolParams& params, bool* clamped) {
  if (!(params.mu_x < params.mu_y)) {
    throw std::invalid_argument("s1_mean: requires mu_x < mu_y");
  }
  const double mux = params.mu_x, muy = params.mu_y;
  const double denom = 2.0 * mux * muy * (muy - mux);
  if (clamped) *clamped = false;
  std::vector<double> out(rates.vv.size());
  for (size_t j = 0; j < out.size(); ++j) {
    double s_plus = muy * muy * std::exp(mux) * (rates.vx[j] + rates.xv[j]);
    double s_minus = mux * mux * std::exp(muy) * (rates.vy[j] + rates.yv[j]);
    double s1 =
        (s_plus - s_minus - 2.0 * (muy * muy - mux * mux) * rates.vv[j]) /
        denom;
    if (s1 < 0.0) {
      s1 = 0.0;
      if (clamped) *clamped = true;
    }
    out[j] = s1;
  }
  return out;
}

namespace {

double mode_sum(const ObservedCounts& counts, WindowClass c) {
  double s = 0.0;
  for (double v : counts.accepted[c.index()]) s += v;
  return s;
}

}  // namespace

DecoyResult n1_lower(const ObservedCounts& observed,
                     const ProtocolParams& params,
                     const SecurityParams& security, BoundLedger* ledger) {
  if (!params.uniform_modes()) {
    throw std::invalid_argument(
        "n1_lower: finite-key analysis requires uniform mode probabilities");
  }
  const double N = params.N;
  const double mux = params.mu_x, muy = params.mu_y, muz = params.mu_z;
  const double pv = params.p_v, px = params.p_x, py = params.p_y,
               pz = params.p_z;
  const int m = params.m;
  const double eps = security.xi;

  DecoyResult r;
  double sum_vx = mode_sum(observed, {Pulse::v, Pulse::x}) +
                  mode_sum(observed, {Pulse::x, Pulse::v});
  double sum_vy = mode_sum(observed, {Pulse::v, Pulse::y}) +
                  mode_sum(observed, {Pulse::y, Pulse::v});
  double sum_vv = mode_sum(observed, {Pulse::v, Pulse::v});

  r.phiL_nvx_sum = chernoff_expected_bounds(sum_vx, eps, ledger).lo;
  r.phiU_nvy_sum = chernoff_expected_bounds(sum_vy, eps, ledger).hi;
  r.phiU_nvv_sum = chernoff_expected_bounds(sum_vv, eps, ledger).hi;

  const double prefactor =
      N * 2.0 * pv * pz * muz * std::exp(-muz) /
      (2.0 * mux * muy * (muy - mux));
  double term_x = std::exp(mux) * muy * muy / (N * pv * px) * r.phiL_nvx_sum;
  double term_y = std::exp(muy) * mux * mux / (N * pv * py) * r.phiU_nvy_sum;
  double term_v =
      2.0 * (muy * muy - mux * mux) / m / (N * pv * pv) * r.phiU_nvv_sum;

  r.n1_mean_L = prefactor * (term_x - term_y - term_v);
  if (r.n1_mean_L < 0.0) {
    r.n1_mean_L = 0.0;
    r.clamped_n1 = true;
  }
  r.n1 = chernoff_real_bounds(r.n1_mean_L, eps, ledger).lo;
  if (r.n1 <= 0.0) {
    r.n1 = 0.0;
    r.no_untagged = true;
  }
  return r;
}

void e1ph_upper(const ObservedCounts& observed, const ProtocolParams& params,
                const SecurityParams& security, DecoyResult& r,
                BoundLedger* ledger) {
  if (r.no_untagged || r.n1_mean_L <= 0.0) {
    r.no_untagged = true;
    r.e1ph = 0.0;
    return;
  }
  const double mux = params.mu_x, muz = params.mu_z;
  const double pv = params.p_v, px = params.p_x, pz = params.p_z;
  const int m = params.m;
  const double eps = security.xi;
  const double delta = params.delta();

  double sum_wtx = 0.0, sum_nvv = 0.0;
  for (double v : observed.w_tx) sum_wtx += v;
  sum_nvv = mode_sum(observed, {Pulse::v, Pulse::v});

  r.phiU_wtx_sum = chernoff_expected_bounds(sum_wtx, eps, ledger).hi;
  r.phiL_nvv_sum = chernoff_expected_bounds(sum_nvv, eps, ledger).lo;

  double term_w = pv * pz * muz * std::exp(-muz) * M_PI * m /
                  (px * px * mux * std::exp(-2.0 * mux) * delta *
                   r.n1_mean_L) *
                  r.phiU_wtx_sum;
  double term_v = pz * muz * std::exp(-muz) /
                  (2.0 * pv * mux * r.n1_mean_L * m) * r.phiL_nvv_sum;

  r.e1ph_mean_U = term_w - term_v;
  if (r.e1ph_mean_U < 0.0) {
    r.e1ph_mean_U = 0.0;
    r.clamped_e1ph = true;
  }
  double e1ph =
      chernoff_real_bounds(r.n1 * r.e1ph_mean_U, eps, ledger).hi / r.n1;
  if (e1ph > 0.5) {
    e1ph = 0.5;
    r.clamped_e1ph = true;
  }
  r.e1ph = e1ph;
}

DecoyResult analyze(const ObservedCounts& observed,
                    const ProtocolParams& params,
                    const SecurityParams& security, BoundLedger* ledger) {
  DecoyResult r = n1_lower(observed, params, security, ledger);
  e1ph_upper(observed, params, security, r, ledger);
  return r;
}

}  // namespace snsrs
