#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "snsrs/analytic.hpp"
#include "snsrs/mc.hpp"

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

bool identical(const ObservedCounts& a, const ObservedCounts& b) {
  if (a.m != b.m || a.n_vv_windows != b.n_vv_windows) return false;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    for (int j = 0; j < a.m; ++j) {
      if (a.windows[ci][j] != b.windows[ci][j]) return false;
      if (a.heralded[ci][j] != b.heralded[ci][j]) return false;
      if (a.accepted[ci][j] != b.accepted[ci][j]) return false;
    }
  }
  for (int j = 0; j < a.m; ++j) {
    if (a.n_delta[j] != b.n_delta[j] || a.w_tx[j] != b.w_tx[j]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("simulate rejects zero trials") {
  CHECK_THROWS_AS(simulate(base_params(), base_channel(50.0), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("dead channel produces windows but no clicks") {
  ProtocolParams p = base_params();
  p.mu_x = 0.0;
  p.mu_y = 0.0;
  p.mu_z = 0.0;
  ChannelParams ch = base_channel(50.0);
  ch.dark = 0.0;
  ObservedCounts c = simulate(p, ch, 200000, 7);
  double windows = c.n_vv_windows;
  double clicks = 0.0;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    for (int j = 0; j < p.m; ++j) {
      windows += c.windows[ci][j];
      clicks += c.heralded[ci][j] + c.accepted[ci][j];
    }
  }
  for (int j = 0; j < p.m; ++j) clicks += c.w_tx[j];
  CHECK(clicks == 0.0);
  CHECK(windows > 0.0);
}

TEST_CASE("seed determinism and thread-count independence") {
  ProtocolParams p = base_params();
  ChannelParams ch = base_channel(50.0);
  ObservedCounts a = simulate(p, ch, 300000, 42, 1);
  ObservedCounts b = simulate(p, ch, 300000, 42, 4);
  ObservedCounts c = simulate(p, ch, 300000, 42, 0);
  CHECK(identical(a, b));
  CHECK(identical(a, c));
  ObservedCounts d = simulate(p, ch, 300000, 43, 1);
  CHECK_FALSE(identical(a, d));
  CHECK(a.rng_name == "mt19937_64");
  CHECK(a.seed == 42);
  CHECK(a.n_trials == 300000.0);

  SUBCASE("fewer trials than shards takes the single-shard path") {
    ObservedCounts e = simulate(p, ch, 100, 42, 4);
    ObservedCounts f = simulate(p, ch, 100, 42, 1);
    CHECK(identical(e, f));
  }
}

TEST_CASE("tally sanity: accepted never exceeds heralded or windows") {
  ProtocolParams p = base_params();
  p.m = 3;
  ObservedCounts c = simulate(p, base_channel(30.0), 500000, 11);
  double total_heralded = 0.0, total_accepted = 0.0;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    auto wc = WindowClass::from_index(ci);
    for (int j = 0; j < p.m; ++j) {
      total_heralded += c.heralded[ci][j];
      total_accepted += c.accepted[ci][j];
      bool two_sided_same_mode = wc.l != Pulse::v && wc.r != Pulse::v;
      if (two_sided_same_mode) {
        // accepted events in two-sided classes come from same-mode windows
        CHECK(c.accepted[ci][j] <= c.windows[ci][j]);
      }
    }
  }
  CHECK(total_accepted <= total_heralded);
  CHECK(total_accepted > 0.0);
  double wtx = 0.0, ndelta = 0.0;
  for (int j = 0; j < p.m; ++j) {
    wtx += c.w_tx[j];
    ndelta += c.n_delta[j];
  }
  CHECK(wtx <= ndelta);
}

TEST_CASE("m = 1 send/not-send acceptance matches the closed form") {
  // Only v and z pulses, d = 0: a vz or zv window is accepted iff exactly one
  // of the two detectors clicks, probability 2 pc(I) pn(I), I = eta mu_z / 2.
  ProtocolParams p = base_params();
  p.p_v = 0.5;
  p.p_x = 0.0;
  p.p_y = 0.0;
  p.p_z = 0.5;
  p.m = 1;
  ChannelParams ch = base_channel(0.0);
  ch.eta0 = 0.1;
  ch.dark = 0.0;
  const std::uint64_t n = 2000000;
  ObservedCounts c = simulate(p, ch, n, 5);

  double I = 0.5 * 0.1 * p.mu_z;
  double rate = 2.0 * (1.0 - std::exp(-I)) * std::exp(-I);
  for (int ci : {idx(Pulse::v, Pulse::z), idx(Pulse::z, Pulse::v)}) {
    double windows = c.windows[ci][0];
    CHECK(windows > 0.0);
    double expect = windows * rate;
    double sigma = std::sqrt(windows * rate * (1.0 - rate));
    CHECK(std::abs(c.accepted[ci][0] - expect) <= 5.0 * sigma);
    // with d = 0 and one mode nothing is rejected
    CHECK(c.accepted[ci][0] == c.heralded[ci][0]);
  }
}

TEST_CASE("compare: expectation tallies agree with themselves") {
  ProtocolParams p = base_params();
  ExpectedStats stats = counting_rates(p, base_channel(150.0));
  ObservedCounts counts = expected_counts(stats, p);
  CompareReport report = compare(counts, stats, 4.0);
  CHECK(report.agree());
  CHECK(report.bins.size() == kNumClasses * 2 + 2);  // classes x modes + W_TX
}

TEST_CASE("compare: zero expected and zero observed scores z = 0") {
  ProtocolParams p = base_params();
  p.p_y = 0.0;  // vy/yv/xy/... windows never occur
  p.p_z = 0.4;
  ChannelParams ch = base_channel(50.0);
  ObservedCounts c = simulate(p, ch, 100000, 3);
  ExpectedStats stats = counting_rates(p, ch);
  CompareReport report = compare(c, stats, 4.0);
  for (const auto& bin : report.bins) {
    if (bin.windows == 0.0) CHECK(bin.z == 0.0);
  }
}

TEST_CASE("compare rejects mismatched mode counts") {
  ProtocolParams p2 = base_params();
  ProtocolParams p3 = base_params();
  p3.m = 3;
  ChannelParams ch = base_channel(50.0);
  ObservedCounts c = simulate(p2, ch, 1000, 1);
  ExpectedStats stats = counting_rates(p3, ch);
  CHECK_THROWS_AS(compare(c, stats, 4.0), std::invalid_argument);
}

TEST_CASE("simulated run agrees with the analytic model") {
  ProtocolParams p = base_params();
  ChannelParams ch = base_channel(50.0);
  ObservedCounts c = simulate(p, ch, 2000000, 20260823);
  ExpectedStats stats = counting_rates(p, ch);
  CompareReport report = compare(c, stats, 4.0);
  for (const auto& bin : report.flagged) {
    CAPTURE(bin.name);
    CAPTURE(bin.expected);
    CAPTURE(bin.observed);
    CHECK(std::abs(bin.z) <= 4.0);
  }
  CHECK(report.agree());
}

TEST_CASE("upper_tail_z quantiles") {
  CHECK(upper_tail_z(0.5) == 0.0);
  CHECK(upper_tail_z(0.6) == 0.0);
  // P(Z > 1.959964) = 0.025
  CHECK(upper_tail_z(0.025) == doctest::Approx(1.9599639845).epsilon(1e-8));
  // P(Z > 3) = 1.3498980316301e-3
  CHECK(upper_tail_z(1.3498980316301e-3) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(upper_tail_z(0.0) == 40.0);
}
