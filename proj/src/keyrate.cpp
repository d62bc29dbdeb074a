#include "snsrs/keyrate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace snsrs {

CodeBits code_bits(const ExpectedStats& stats, const ProtocolParams& params) {
  CodeBits cb;
  const double N = params.N;
  const int vv = WindowClass{Pulse::v, Pulse::v}.index();
  const int vz = WindowClass{Pulse::v, Pulse::z}.index();
  const int zv = WindowClass{Pulse::z, Pulse::v}.index();
  const int zz = WindowClass{Pulse::z, Pulse::z}.index();
  for (int j = 0; j < stats.m; ++j) {
    double Pj = params.mode_prob(j);
    cb.n_V += N * params.p_v * params.p_v * stats.rate[vv][j];
    cb.n_C += N * params.p_z * params.p_v * Pj *
              (stats.rate[vz][j] + stats.rate[zv][j]);
    cb.n_D += N * params.p_z * params.p_z * Pj * Pj * stats.rate[zz][j];
  }
  cb.n_t = cb.n_V + cb.n_C + cb.n_D;
  cb.E_t = cb.n_t > 0.0 ? (cb.n_V + cb.n_D) / cb.n_t : 0.0;
  return cb;
}

CodeBits code_bits(const ObservedCounts& observed) {
  CodeBits cb;
  cb.n_V = observed.accepted_sum({Pulse::v, Pulse::v});
  cb.n_C = observed.accepted_sum({Pulse::v, Pulse::z}) +
           observed.accepted_sum({Pulse::z, Pulse::v});
  cb.n_D = observed.accepted_sum({Pulse::z, Pulse::z});
  cb.n_t = cb.n_V + cb.n_C + cb.n_D;
  cb.E_t = cb.n_t > 0.0 ? (cb.n_V + cb.n_D) / cb.n_t : 0.0;
  return cb;
}

double key_length(double n1, double e1ph, double n_t, double E_t,
                  const SecurityParams& security) {
  double nf = n1 * (1.0 - binary_entropy(e1ph)) -
              security.f_ec * n_t * binary_entropy(E_t) -
              std::log2(2.0 / security.eps_cor) -
              2.0 * std::log2(1.0 /
                              (std::sqrt(2.0) * security.eps_pa *
                               security.eps_hat));
  return nf > 0.0 ? nf : 0.0;
}

double plob_bound(const ChannelParams& channel, bool use_detector_efficiency) {
  double eta_tot =
      std::pow(10.0, -channel.alpha_db_km * channel.L_km / 10.0);
  if (use_detector_efficiency) eta_tot *= channel.eta0;
  return -std::log2(1.0 - eta_tot);
}

KeyRateResult evaluate(const ProtocolParams& params,
                       const ChannelParams& channel,
                       const SecurityParams& security, bool asymptotic) {
  KeyRateResult r;
  r.distance_km = channel.L_km;
  r.params = params;
  r.asymptotic = asymptotic;

  ExpectedStats stats = counting_rates(params, channel);
  ObservedCounts counts = expected_counts(stats, params);

  SecurityParams sec = security;
  if (asymptotic) sec.xi = 1.0;  // vacuous bounds: expectations pass through

  BoundLedger ledger;
  DecoyResult decoy = analyze(counts, params, sec, &ledger);
  CodeBits cb = code_bits(stats, params);

  r.n1 = decoy.n1;
  r.e1ph = decoy.e1ph;
  r.n_t = cb.n_t;
  r.E_t = cb.E_t;
  r.diagnostics = cb;
  if (asymptotic) {
    r.N_f_raw = r.n1 * (1.0 - binary_entropy(r.e1ph)) -
                security.f_ec * cb.n_t * binary_entropy(cb.E_t);
  } else {
    r.N_f_raw = r.n1 * (1.0 - binary_entropy(r.e1ph)) -
                security.f_ec * cb.n_t * binary_entropy(cb.E_t) -
                std::log2(2.0 / security.eps_cor) -
                2.0 * std::log2(1.0 / (std::sqrt(2.0) * security.eps_pa *
                                       security.eps_hat));
  }
  r.N_f = r.N_f_raw > 0.0 ? r.N_f_raw : 0.0;
  r.rate = r.N_f / params.N;
  r.plob1 = plob_bound(channel, true);
  r.plob2 = plob_bound(channel, false);
  r.epsilon_spent = ledger.spent;
  r.bound_invocations = ledger.invocations;

  std::ostringstream flags;
  auto add_flag = [&](const char* f) {
    if (flags.tellp() > 0) flags << ";";
    flags << f;
  };
  if (decoy.clamped_n1) add_flag("n1_clamped");
  if (decoy.clamped_e1ph) add_flag("e1ph_clamped");
  if (decoy.no_untagged) add_flag("no_untagged");
  r.flags = flags.str();
  return r;
}

std::string keyrate_csv_header() {
  return "distance_km,m,p_v,p_x,p_y,p_z,mu_x,mu_y,mu_z,lambda,N,"
         "n1,e1ph,n_t,E_t,N_f,rate,plob1,plob2,flags";
}

std::string keyrate_csv_row(const KeyRateResult& result, int m) {
  char buf[640];
  const auto& p = result.params;
  std::snprintf(buf, sizeof(buf),
                "%.9e,%d,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,"
                "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%s",
                result.distance_km, m, p.p_v, p.p_x, p.p_y, p.p_z, p.mu_x,
                p.mu_y, p.mu_z, p.lambda_slice, p.N, result.n1, result.e1ph,
                result.n_t, result.E_t, result.N_f, result.rate, result.plob1,
                result.plob2, result.flags.c_str());
  return buf;
}

}  // namespace snsrs
