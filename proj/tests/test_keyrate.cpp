#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snsrs/keyrate.hpp"
#include "sns_baseline.hpp"

using namespace snsrs;

namespace {

ProtocolParams base_params() {
  ProtocolParams p;
  p.p_v = 0.5;
  p.p_x = 0.1;
  p.p_y = 0.1;
  p.p_z = 0.3;
  p.mu_x = 0.1;
  p.mu_y = 0.3;
  p.mu_z = 0.45;
  p.m = 2;
  p.lambda_slice = 0.05;
  p.N = 1e8;
  return p;
}

ChannelParams base_channel(double L) {
  ChannelParams ch;
  ch.L_km = L;
  ch.alpha_db_km = 0.2;
  ch.eta0 = 0.5;
  ch.dark = 1e-8;
  ch.e_mis = 0.03;
  return ch;
}

int idx(Pulse l, Pulse r) { return WindowClass{l, r}.index(); }

}  // namespace

TEST_CASE("key length constants and clamping") {
  SecurityParams sec;  // all epsilons 1e-10, f = 1.1
  // n1 bits, no errors: N_f = n1 - log2(2/1e-10) - 2 log2(1/(sqrt2 * 1e-20)).
  // Frozen 17-digit constants: 34.219280948873624 and 131.87712379549449.
  double constants = 34.219280948873624 + 131.87712379549449;
  CHECK(key_length(1e6, 0.0, 0.0, 0.0, sec) ==
        doctest::Approx(1e6 - constants).epsilon(1e-14));
  CHECK(key_length(0.0, 0.0, 0.0, 0.0, sec) == 0.0);
  CHECK(key_length(100.0, 0.0, 0.0, 0.0, sec) == 0.0);  // below the constants
  // error correction cost: f * n_t * H(E_t)
  double with_ec = key_length(1e6, 0.0, 1e5, 0.03, sec);
  CHECK(with_ec == doctest::Approx(1e6 - constants -
                                   1.1 * 1e5 * binary_entropy(0.03))
                       .epsilon(1e-13));
}

TEST_CASE("key length monotonicity") {
  SecurityParams sec;
  double base = key_length(1e6, 0.05, 1e5, 0.02, sec);
  CHECK(key_length(2e6, 0.05, 1e5, 0.02, sec) > base);
  CHECK(key_length(1e6, 0.10, 1e5, 0.02, sec) < base);
  CHECK(key_length(1e6, 0.05, 1e5, 0.04, sec) < base);
  CHECK(key_length(1e6, 0.05, 2e5, 0.02, sec) < base);
}

TEST_CASE("PLOB bound reference values") {
  ChannelParams ch = base_channel(250.0);
  // Frozen 16-digit references for -log2(1 - 10^(-alpha L / 10)).
  CHECK(plob_bound(ch, false) ==
        doctest::Approx(1.442702254412258e-5).epsilon(1e-12));
  ch.L_km = 300.0;
  CHECK(plob_bound(ch, false) ==
        doctest::Approx(1.442695762236965e-6).epsilon(1e-12));
  ch.L_km = 350.0;
  CHECK(plob_bound(ch, false) ==
        doctest::Approx(1.442695113023720e-7).epsilon(1e-12));
  // Relative bound folds in the detector efficiency.
  ch.L_km = 250.0;
  double eta_tot = 0.5 * std::pow(10.0, -0.2 * 250.0 / 10.0);
  CHECK(plob_bound(ch, true) ==
        doctest::Approx(-std::log2(1.0 - eta_tot)).epsilon(1e-14));
  // eta_tot = 1/2 at zero loss with eta0 = 1/2: capacity 1 bit.
  ch.L_km = 0.0;
  CHECK(plob_bound(ch, true) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("code-bit accounting matches the closed-form QBER expression") {
  // With uniform modes the aggregate QBER is
  //   E_t = (2m d(1-d)^{2m-1} p_v^2 + p_z^2 S_zz / m)
  //         / (same + p_v p_z (S_vz + S_zv))
  // for every m; with d = 0 the vacuum term drops (identity to 1e-12).
  ProtocolParams p = base_params();
  for (double dark : {0.0, 1e-8, 1e-6}) {
    ChannelParams ch = base_channel(170.0);
    ch.dark = dark;
    for (int m : {1, 2, 3, 6, 20}) {
      CAPTURE(dark);
      CAPTURE(m);
      p.m = m;
      ExpectedStats stats = counting_rates(p, ch);
      CodeBits cb = code_bits(stats, p);

      double svv = stats.rate[idx(Pulse::v, Pulse::v)][0];
      double svz = stats.rate[idx(Pulse::v, Pulse::z)][0];
      double szv = stats.rate[idx(Pulse::z, Pulse::v)][0];
      double szz = stats.rate[idx(Pulse::z, Pulse::z)][0];
      double num = m * svv * p.p_v * p.p_v + p.p_z * p.p_z * szz / m;
      double den = num + p.p_v * p.p_z * (svz + szv);
      CHECK(cb.E_t == doctest::Approx(num / den).epsilon(1e-12));
      CHECK(cb.n_t == doctest::Approx(p.N * den).epsilon(1e-12));
    }
  }
}

TEST_CASE("QBER compresses by 1/m when code bits are vz/zv dominated") {
  ProtocolParams p = base_params();
  // Small p_z keeps the vz/zv dominance sharp: the ratio approaches 1/2
  // from above with an O(p_z s_zz / (m p_v s_vz)) correction.
  p.p_v = 0.9;
  p.p_x = 0.04;
  p.p_y = 0.04;
  p.p_z = 0.02;
  p.mu_z = 0.05;
  ChannelParams ch = base_channel(0.0);
  ch.eta0 = 0.1;
  ch.dark = 0.0;

  double prev = -1.0;
  for (int m : {2, 4, 8, 16}) {
    p.m = m;
    ExpectedStats stats = counting_rates(p, ch);
    double et = code_bits(stats, p).E_t;
    if (prev > 0.0) {
      CHECK(et / prev == doctest::Approx(0.5).epsilon(0.01));
    }
    prev = et;
  }
}

TEST_CASE("QBER with no vacuum counts reduces to the two-term ratio") {
  // Zero out S_vv by hand; at m = 1 the accounting must equal
  // p_z S_zz / (p_z S_zz + p_v (S_vz + S_zv)) algebraically.
  ProtocolParams p = base_params();
  p.m = 1;
  ExpectedStats stats = counting_rates(p, base_channel(170.0));
  stats.rate[idx(Pulse::v, Pulse::v)][0] = 0.0;
  CodeBits cb = code_bits(stats, p);
  double svz = stats.rate[idx(Pulse::v, Pulse::z)][0];
  double szv = stats.rate[idx(Pulse::z, Pulse::v)][0];
  double szz = stats.rate[idx(Pulse::z, Pulse::z)][0];
  double expect = p.p_z * szz / (p.p_z * szz + p.p_v * (svz + szv));
  CHECK(cb.E_t == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("code-bit recount from an event-level tally") {
  ProtocolParams p = base_params();
  ChannelParams ch = base_channel(50.0);
  ObservedCounts counts = simulate(p, ch, 500000, 9);
  CodeBits cb = code_bits(counts);
  double nv = 0.0, nc = 0.0, nd = 0.0;
  for (int j = 0; j < p.m; ++j) {
    nv += counts.accepted[idx(Pulse::v, Pulse::v)][j];
    nc += counts.accepted[idx(Pulse::v, Pulse::z)][j] +
          counts.accepted[idx(Pulse::z, Pulse::v)][j];
    nd += counts.accepted[idx(Pulse::z, Pulse::z)][j];
  }
  CHECK(cb.n_V == nv);
  CHECK(cb.n_C == nc);
  CHECK(cb.n_D == nd);
  CHECK(cb.n_t == nv + nc + nd);
  CHECK(cb.E_t == doctest::Approx((nv + nd) / (nv + nc + nd)).epsilon(1e-15));
}

TEST_CASE("full pipeline at a working point") {
  ProtocolParams p = base_params();
  ChannelParams ch = base_channel(170.0);
  SecurityParams sec;
  KeyRateResult r = evaluate(p, ch, sec, false);
  CHECK(r.n1 > 0.0);
  CHECK(r.e1ph > 0.0);
  CHECK(r.e1ph < 0.5);
  CHECK(r.n_t > 0.0);
  CHECK(r.flags.empty());
  CHECK(r.epsilon_spent == doctest::Approx(7.0 * sec.xi).epsilon(1e-12));
  CHECK(r.bound_invocations == 7);
  CHECK(r.rate == r.N_f / p.N);
  CHECK(r.plob2 > r.plob1);

  SUBCASE("asymptotic mode is at least as optimistic") {
    KeyRateResult ra = evaluate(p, ch, sec, true);
    CHECK(ra.N_f >= r.N_f);
    CHECK(ra.n1 >= r.n1);
    CHECK(ra.e1ph <= r.e1ph);
  }

  SUBCASE("deep in the loss region the clamped rate is zero") {
    ch.L_km = 600.0;
    KeyRateResult rz = evaluate(p, ch, sec, false);
    CHECK(rz.N_f == 0.0);
    CHECK(rz.rate == 0.0);
    CHECK(rz.N_f_raw < 0.0);
  }
}

TEST_CASE("m = 1 pipeline equals the scalar send/not-send baseline exactly") {
  ProtocolParams p = base_params();
  p.m = 1;
  SecurityParams sec;
  for (double L : {50.0, 170.0, 300.0}) {
    CAPTURE(L);
    ChannelParams ch = base_channel(L);
    for (bool asymptotic : {false, true}) {
      CAPTURE(asymptotic);
      KeyRateResult general = evaluate(p, ch, sec, asymptotic);
      sns_baseline::Result scalar =
          sns_baseline::evaluate(p, ch, sec, asymptotic);
      // bit-for-bit: the mode machinery must introduce no arithmetic drift
      CHECK(general.n1 == scalar.n1);
      CHECK(general.e1ph == scalar.e1ph);
      CHECK(general.n_t == scalar.n_t);
      CHECK(general.E_t == scalar.E_t);
      CHECK(general.N_f == scalar.N_f);
    }
  }
}

TEST_CASE("CSV row formatting") {
  ProtocolParams p = base_params();
  ChannelParams ch = base_channel(170.0);
  SecurityParams sec;
  KeyRateResult r = evaluate(p, ch, sec, false);
  std::string header = keyrate_csv_header();
  std::string row = keyrate_csv_row(r, p.m);
  CHECK(header.find("distance_km") == 0);
  size_t cols = 1;
  for (char c : header) {
    if (c == ',') ++cols;
  }
  size_t row_cols = 1;
  for (char c : row) {
    if (c == ',') ++row_cols;
  }
  CHECK(cols == row_cols);
  CHECK(row.find("1.700000000e+02") == 0);
}
