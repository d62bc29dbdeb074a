#include "snsrs/mc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace snsrs {

double ObservedCounts::accepted_sum(WindowClass c) const {
  double s = 0.0;
  for (double v : accepted[c.index()]) s += v;
  return s;
}

namespace {

constexpr int kShards = 256;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Uniform {
  std::mt19937_64 gen;
  explicit Uniform(std::uint64_t seed) : gen(seed) {}
  // 53-bit uniform double in [0,1); independent of stdlib distributions.
  double next() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
};

void init_tallies(ObservedCounts& c, int m) {
  c.m = m;
  for (int i = 0; i < kNumClasses; ++i) {
    c.windows[i].assign(m, 0.0);
    c.heralded[i].assign(m, 0.0);
    c.accepted[i].assign(m, 0.0);
  }
  c.n_delta.assign(m, 0.0);
  c.w_tx.assign(m, 0.0);
}

void merge_tallies(ObservedCounts& into, const ObservedCounts& from) {
  into.n_vv_windows += from.n_vv_windows;
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = 0; j < into.m; ++j) {
      into.windows[i][j] += from.windows[i][j];
      into.heralded[i][j] += from.heralded[i][j];
      into.accepted[i][j] += from.accepted[i][j];
    }
  }
  for (int j = 0; j < into.m; ++j) {
    into.n_delta[j] += from.n_delta[j];
    into.w_tx[j] += from.w_tx[j];
  }
}

struct PartyChoice {
  Pulse pulse = Pulse::v;
  int mode = -1;
  double phase = 0.0;
};

void run_shard(const ProtocolParams& params, const ChannelParams& channel,
               std::uint64_t trials, std::uint64_t seed, ObservedCounts& out) {
  Uniform rng(seed);
  const int m = params.m;
  const double eta = per_arm_transmittance(channel);
  const double d = channel.dark;
  const double vis = 1.0 - 2.0 * channel.e_mis;
  const double p_dark = d;

  std::vector<double> cum_mode(m);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    acc += params.mode_prob(j);
    cum_mode[j] = acc;
  }

  auto sample_party = [&](PartyChoice& pc) {
    double u = rng.next();
    if (u < params.p_v) {
      pc.pulse = Pulse::v;
      pc.mode = -1;
      return;
    } else if (u < params.p_v + params.p_x) {
      pc.pulse = Pulse::x;
    } else if (u < params.p_v + params.p_x + params.p_y) {
      pc.pulse = Pulse::y;
    } else {
      pc.pulse = Pulse::z;
    }
    double um = rng.next();
    pc.mode = m - 1;
    for (int j = 0; j < m; ++j) {
      if (um < cum_mode[j]) {
        pc.mode = j;
        break;
      }
    }
    pc.phase = rng.next() * 2.0 * M_PI;
  };

  // Per-detector mean photon numbers: intensity[side][mode],
  // side 0 = left (destructive at cos(delta) > 0), side 1 = right.
  std::vector<double> intensity(2 * m);

  for (std::uint64_t t = 0; t < trials; ++t) {
    PartyChoice alice, bob;
    sample_party(alice);
    sample_party(bob);
    WindowClass wc{alice.pulse, bob.pulse};
    const int ci = wc.index();

    std::fill(intensity.begin(), intensity.end(), 0.0);
    bool same_mode = alice.mode >= 0 && alice.mode == bob.mode;
    double cos_delta = 0.0;
    if (same_mode) {
      double mul = params.mu(alice.pulse), mur = params.mu(bob.pulse);
      cos_delta = std::cos(alice.phase - bob.phase);
      double x = eta * (mul + mur);
      double yp = vis * 2.0 * eta * std::sqrt(mul * mur);
      intensity[2 * alice.mode + 0] = 0.5 * (x - yp * cos_delta);
      intensity[2 * alice.mode + 1] = 0.5 * (x + yp * cos_delta);
    } else {
      if (alice.mode >= 0) {
        double half = 0.5 * eta * params.mu(alice.pulse);
        intensity[2 * alice.mode + 0] += half;
        intensity[2 * alice.mode + 1] += half;
      }
      if (bob.mode >= 0) {
        double half = 0.5 * eta * params.mu(bob.pulse);
        intensity[2 * bob.mode + 0] += half;
        intensity[2 * bob.mode + 1] += half;
      }
    }

    // Window-count tallies (denominators of the counting rates).
    if (alice.pulse == Pulse::v && bob.pulse == Pulse::v) {
      out.n_vv_windows += 1.0;
    } else if (alice.pulse == Pulse::v) {
      out.windows[ci][bob.mode] += 1.0;
    } else if (bob.pulse == Pulse::v) {
      out.windows[ci][alice.mode] += 1.0;
    } else if (same_mode) {
      out.windows[ci][alice.mode] += 1.0;
    }

    bool in_slice = false;
    if (alice.pulse == Pulse::x && bob.pulse == Pulse::x && same_mode) {
      in_slice = 1.0 - std::abs(cos_delta) <= params.lambda_slice;
      if (in_slice) out.n_delta[alice.mode] += 1.0;
    }

    // Per-detector Bernoulli clicks.
    int clicks = 0, click_side = -1, click_mode = -1;
    for (int j = 0; j < m && clicks < 2; ++j) {
      for (int side = 0; side < 2; ++side) {
        double I = intensity[2 * j + side];
        double p = I > 0.0 ? 1.0 - (1.0 - d) * std::exp(-I) : p_dark;
        if (rng.next() < p) {
          if (++clicks >= 2) break;
          click_side = side;
          click_mode = j;
        }
      }
    }
    if (clicks != 1) continue;

    out.heralded[ci][click_mode] += 1.0;
    bool rejected = (alice.mode >= 0 && alice.mode != click_mode) ||
                    (bob.mode >= 0 && bob.mode != click_mode);
    if (rejected) continue;
    out.accepted[ci][click_mode] += 1.0;

    if (in_slice) {
      // Error: the click landed on the destructive-interference side.
      bool error = cos_delta >= 0.0 ? click_side == 0 : click_side == 1;
      if (error) out.w_tx[click_mode] += 1.0;
    }
  }
}

}  // namespace

ObservedCounts simulate(const ProtocolParams& params,
                        const ChannelParams& channel, std::uint64_t n_trials,
                        std::uint64_t seed, int n_threads) {
  if (n_trials == 0) throw std::invalid_argument("simulate: n_trials = 0");
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }

  ObservedCounts total;
  init_tallies(total, params.m);
  total.n_trials = static_cast<double>(n_trials);
  total.seed = seed;

  const int shards = n_trials < kShards ? 1 : kShards;
  std::vector<ObservedCounts> partial(shards);
  for (auto& p : partial) init_tallies(p, params.m);

  std::vector<std::uint64_t> shard_trials(shards, n_trials / shards);
  shard_trials.back() += n_trials % shards;

  auto worker = [&](int first, int step) {
    for (int s = first; s < shards; s += step) {
      run_shard(params, channel, shard_trials[s],
                splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s))),
                partial[s]);
    }
  };
  if (n_threads == 1 || shards == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker, i, n_threads);
    for (auto& th : pool) th.join();
  }
  for (const auto& p : partial) merge_tallies(total, p);
  return total;
}

double upper_tail_z(double p) {
  if (p >= 0.5) return 0.0;
  if (p <= 0.0) return 40.0;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double poisson_equiv_z(double mean, double observed) {
  if (mean == 0.0 && observed == 0.0) return 0.0;
  if (mean == 0.0) return 40.0;
  long k = std::lround(observed);
  // One-sided tail probability of Poisson(mean) at the observed count.
  auto cdf = [mean](long kk) {
    double term = std::exp(-mean), sum = term;
    for (long i = 1; i <= kk; ++i) {
      term *= mean / static_cast<double>(i);
      sum += term;
    }
    return std::min(sum, 1.0);
  };
  double z;
  if (observed >= mean) {
    double tail = 1.0 - (k >= 1 ? cdf(k - 1) : 0.0);  // P(X >= k)
    z = upper_tail_z(tail);
  } else {
    double tail = cdf(k);  // P(X <= k)
    z = -upper_tail_z(tail);
  }
  return z;
}

}  // namespace

CompareReport compare(const ObservedCounts& observed,
                      const ExpectedStats& expected, double sigma_threshold) {
  if (observed.m != expected.m) {
    throw std::invalid_argument("compare: mode count mismatch");
  }
  CompareReport report;
  auto add_bin = [&](std::string name, double n, double p, double obs) {
    CompareBin bin;
    bin.name = std::move(name);
    bin.windows = n;
    bin.expected = n * p;
    bin.observed = obs;
    if (bin.expected == 0.0 && obs == 0.0) {
      bin.z = 0.0;
    } else if (bin.expected >= 25.0) {
      double var = n * p * (1.0 - p);
      bin.z = (obs - bin.expected) / std::sqrt(var);
    } else {
      bin.z = poisson_equiv_z(bin.expected, obs);
    }
    if (std::abs(bin.z) > sigma_threshold) report.flagged.push_back(bin);
    report.bins.push_back(std::move(bin));
  };

  for (int ci = 0; ci < kNumClasses; ++ci) {
    auto c = WindowClass::from_index(ci);
    for (int j = 0; j < observed.m; ++j) {
      double n = (c.l == Pulse::v && c.r == Pulse::v) ? observed.n_vv_windows
                                                      : observed.windows[ci][j];
      add_bin(c.name() + "(r" + std::to_string(j + 1) + ")", n,
              expected.rate[ci][j], observed.accepted[ci][j]);
    }
  }
  for (int j = 0; j < observed.m; ++j) {
    add_bin("W_TX(r" + std::to_string(j + 1) + ")", observed.n_delta[j],
            expected.t_delta[j], observed.w_tx[j]);
  }
  return report;
}

ObservedCounts expected_counts(const ExpectedStats& stats,
                               const ProtocolParams& params) {
  ObservedCounts counts;
  init_tallies(counts, stats.m);
  counts.n_trials = params.N;
  counts.rng_name = "analytic-expectation";
  counts.n_vv_windows = stats.N_vv;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    for (int j = 0; j < stats.m; ++j) {
      counts.windows[ci][j] = stats.windows[ci][j];
      counts.accepted[ci][j] = stats.rate[ci][j] * stats.windows[ci][j];
      counts.heralded[ci][j] = counts.accepted[ci][j];
    }
  }
  counts.n_delta = stats.n_delta;
  counts.w_tx = stats.w_tx;
  return counts;
}

}  // namespace snsrs
