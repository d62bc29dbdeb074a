#include "snsrs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace snsrs {

namespace {

constexpr int kNumVars = 7;
constexpr double kMinPz = 1e-4;
constexpr double kMuGap = 1e-6;
constexpr double kGolden = 0.6180339887498949;

using Vec = std::array<double, kNumVars>;
// Variable order: p_v, p_x, p_y, mu_x, mu_y, mu_z, lambda.

ProtocolParams to_params(const Vec& x, int m, double N) {
  ProtocolParams p;
  p.p_v = x[0];
  p.p_x = x[1];
  p.p_y = x[2];
  p.p_z = 1.0 - x[0] - x[1] - x[2];
  p.mu_x = x[3];
  p.mu_y = x[4];
  p.mu_z = x[5];
  p.lambda_slice = x[6];
  p.m = m;
  p.N = N;
  return p;
}

Vec from_params(const ProtocolParams& p) {
  return {p.p_v, p.p_x, p.p_y, p.mu_x, p.mu_y, p.mu_z, p.lambda_slice};
}

bool feasible(const Vec& x, const OptimizerBounds& b) {
  double pz = 1.0 - x[0] - x[1] - x[2];
  return x[0] >= b.p_v_lo && x[0] <= b.p_v_hi && x[1] >= b.p_x_lo &&
         x[1] <= b.p_x_hi && x[2] >= b.p_y_lo && x[2] <= b.p_y_hi &&
         pz >= kMinPz && x[3] >= b.mu_x_lo && x[3] <= b.mu_x_hi &&
         x[4] > x[3] && x[4] <= b.mu_y_hi && x[5] >= b.mu_z_lo &&
         x[5] <= b.mu_z_hi && x[6] >= b.lambda_lo && x[6] <= b.lambda_hi;
}

// Feasible interval for coordinate i with the other coordinates fixed.
std::pair<double, double> coord_interval(const Vec& x, int i,
                                         const OptimizerBounds& b) {
  switch (i) {
    case 0:
      return {b.p_v_lo, std::min(b.p_v_hi, 1.0 - x[1] - x[2] - kMinPz)};
    case 1:
      return {b.p_x_lo, std::min(b.p_x_hi, 1.0 - x[0] - x[2] - kMinPz)};
    case 2:
      return {b.p_y_lo, std::min(b.p_y_hi, 1.0 - x[0] - x[1] - kMinPz)};
    case 3:
      return {b.mu_x_lo, std::min(b.mu_x_hi, x[4] - kMuGap)};
    case 4:
      return {x[3] + kMuGap, b.mu_y_hi};
    case 5:
      return {b.mu_z_lo, b.mu_z_hi};
    case 6:
      return {b.lambda_lo, b.lambda_hi};
  }
  return {0.0, 0.0};
}

struct Search {
  const Objective& objective;
  int m;
  double N;
  const OptimizerConfig& config;
  int evals = 0;
  double best_rate = -1.0;
  Vec best_x{};
  std::vector<TracePoint>* trace;

  double eval(const Vec& x) {
    if (!feasible(x, config.bounds)) return -1.0;
    ++evals;
    double r = objective(to_params(x, m, N));
    if (r > best_rate) {
      best_rate = r;
      best_x = x;
      if (trace) trace->push_back({evals, to_params(x, m, N), r});
    }
    return r;
  }
  bool exhausted() const { return evals >= config.budget; }
};

// Coarse grid plus golden-section refinement along one coordinate.
void line_search(Search& s, Vec& x, int i) {
  auto [lo, hi] = coord_interval(x, i, s.config.bounds);
  if (!(hi > lo)) return;
  constexpr int kGrid = 8;
  double best_v = x[i], best_r = s.eval(x);
  for (int g = 0; g <= kGrid && !s.exhausted(); ++g) {
    Vec trial = x;
    trial[i] = lo + (hi - lo) * g / kGrid;
    double r = s.eval(trial);
    if (r > best_r) {
      best_r = r;
      best_v = trial[i];
    }
  }
  double span = (hi - lo) / kGrid;
  double a = std::max(lo, best_v - span), b = std::min(hi, best_v + span);
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  Vec xc = x, xd = x;
  xc[i] = c;
  xd[i] = d;
  double fc = s.eval(xc), fd = s.eval(xd);
  for (int it = 0; it < 24 && !s.exhausted(); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      xc[i] = c;
      fc = s.eval(xc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      xd[i] = d;
      fd = s.eval(xd);
    }
    if (b - a < 1e-7 * std::max(1.0, std::abs(b))) break;
  }
  double vm = fc > fd ? c : d;
  double fm = std::max(fc, fd);
  if (fm >= best_r) {
    x[i] = vm;
  } else {
    x[i] = best_v;
  }
}

void coordinate_descent(Search& s, Vec x, int sweep_budget) {
  int start = s.evals;
  double prev = s.eval(x);
  while (!s.exhausted() && s.evals - start < sweep_budget) {
    for (int i = 0; i < kNumVars && !s.exhausted(); ++i) line_search(s, x, i);
    double now = s.eval(x);
    if (now <= prev * (1.0 + 1e-10) && now <= prev + 1e-16) break;
    prev = now;
  }
}

void nelder_mead(Search& s, const Vec& x0, int polish_budget) {
  int start = s.evals;
  std::vector<std::pair<double, Vec>> simplex;
  simplex.reserve(kNumVars + 1);
  simplex.push_back({s.eval(x0), x0});
  for (int i = 0; i < kNumVars; ++i) {
    Vec v = x0;
    auto [lo, hi] = coord_interval(x0, i, s.config.bounds);
    double step = 0.05 * (hi - lo);
    v[i] = v[i] + step <= hi ? v[i] + step : v[i] - step;
    v[i] = std::clamp(v[i], lo, hi);
    simplex.push_back({s.eval(v), v});
  }
  auto worse = [](const auto& a, const auto& b) { return a.first > b.first; };
  while (!s.exhausted() && s.evals - start < polish_budget) {
    std::sort(simplex.begin(), simplex.end(), worse);
    Vec centroid{};
    for (int k = 0; k < kNumVars; ++k) {
      for (int i = 0; i < kNumVars; ++i) centroid[i] += simplex[k].second[i];
    }
    for (double& c : centroid) c /= kNumVars;
    auto& worst = simplex.back();
    Vec refl;
    for (int i = 0; i < kNumVars; ++i) {
      refl[i] = centroid[i] + (centroid[i] - worst.second[i]);
    }
    double fr = s.eval(refl);
    if (fr > simplex.front().first) {
      Vec exp_pt;
      for (int i = 0; i < kNumVars; ++i) {
        exp_pt[i] = centroid[i] + 2.0 * (centroid[i] - worst.second[i]);
      }
      double fe = s.eval(exp_pt);
      worst = fe > fr ? std::pair{fe, exp_pt} : std::pair{fr, refl};
    } else if (fr > simplex[kNumVars - 1].first) {
      worst = {fr, refl};
    } else {
      Vec contr;
      for (int i = 0; i < kNumVars; ++i) {
        contr[i] = centroid[i] + 0.5 * (worst.second[i] - centroid[i]);
      }
      double fco = s.eval(contr);
      if (fco > worst.first) {
        worst = {fco, contr};
      } else {
        for (int k = 1; k <= kNumVars; ++k) {
          for (int i = 0; i < kNumVars; ++i) {
            simplex[k].second[i] =
                0.5 * (simplex[k].second[i] + simplex[0].second[i]);
          }
          simplex[k].first = s.eval(simplex[k].second);
          if (s.exhausted()) break;
        }
      }
    }
    double spread = simplex.front().first - simplex.back().first;
    if (std::abs(spread) < 1e-14 * std::max(1e-30, simplex.front().first)) {
      break;
    }
  }
}

Vec random_start(std::mt19937_64& gen, const OptimizerBounds& b,
                 double lambda_hint) {
  auto uni = [&](double lo, double hi) {
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  Vec x{};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    x[0] = uni(b.p_v_lo, std::min(b.p_v_hi, 0.9));
    double rest = 1.0 - x[0] - kMinPz;
    x[1] = uni(b.p_x_lo, std::min(b.p_x_hi, 0.8 * rest));
    x[2] = uni(b.p_y_lo, std::min(b.p_y_hi, 0.8 * (rest - x[1])));
    x[3] = uni(b.mu_x_lo, std::min(b.mu_x_hi, 0.3));
    x[4] = uni(x[3] + kMuGap, std::min(b.mu_y_hi, 0.8));
    x[5] = uni(b.mu_z_lo, std::min(b.mu_z_hi, 1.0));
    x[6] = uni(b.lambda_lo, std::min(b.lambda_hi, 4.0 * lambda_hint));
    if (feasible(x, b)) return x;
  }
  throw std::runtime_error("optimize: no feasible starting point found");
}

bool near(double v, double bound, double scale) {
  return std::abs(v - bound) <= 1e-6 * std::max(scale, std::abs(bound));
}

}  // namespace

OptResult optimize(const Objective& objective, int m, double N,
                   double lambda_hint, const OptimizerConfig& config,
                   const std::optional<ProtocolParams>& init) {
  if (config.budget < 1) {
    throw std::invalid_argument("optimize: budget must be >= 1");
  }
  OptimizerBounds b = config.bounds;
  if (!(b.p_v_lo < b.p_v_hi && b.p_x_lo < b.p_x_hi && b.mu_x_lo < b.mu_y_hi &&
        b.mu_z_lo < b.mu_z_hi && b.lambda_lo <= b.lambda_hi)) {
    throw std::invalid_argument("optimize: infeasible bounds");
  }

  OptResult result;
  Search s{objective, m, N, config};
  s.trace = &result.trace;

  std::mt19937_64 gen(config.seed);
  std::vector<Vec> starts;
  if (init) {
    Vec x0 = from_params(*init);
    if (feasible(x0, b)) starts.push_back(x0);
  }

  // Exploration phase: score a seeded random sample and keep the best
  // points as restart seeds. The key-rate objective is zero (or uniformly
  // negative) over most of the box, so descent needs decent footholds.
  int n_samples = std::clamp(config.budget / 5, config.restarts, 4000);
  std::vector<std::pair<double, Vec>> sampled;
  sampled.reserve(n_samples);
  for (int i = 0; i < n_samples && !s.exhausted(); ++i) {
    Vec x = random_start(gen, b, lambda_hint);
    sampled.push_back({s.eval(x), x});
  }
  std::sort(sampled.begin(), sampled.end(),
            [](const auto& a, const auto& c) { return a.first > c.first; });
  for (int i = 0; i < config.restarts && i < static_cast<int>(sampled.size());
       ++i) {
    starts.push_back(sampled[i].second);
  }
  if (starts.empty()) starts.push_back(random_start(gen, b, lambda_hint));

  int descent_budget = std::max(1, config.budget * 7 / 10);
  int per_start = std::max(1, descent_budget / static_cast<int>(starts.size()));
  for (const auto& x0 : starts) {
    if (s.exhausted()) break;
    coordinate_descent(s, x0, per_start);
  }
  if (!s.exhausted() && s.best_rate >= 0.0) {
    nelder_mead(s, s.best_x, config.budget - s.evals);
  }

  // A soft bound that binds gets widened once and the search resumes there.
  const Vec& bx = s.best_x;
  OptimizerBounds widened = b;
  bool widen = false;
  if (near(bx[3], b.mu_x_hi, 1.0) && b.mu_x_hi < 2.0) {
    widened.mu_x_hi = std::min(2.0, b.mu_x_hi * 1.5);
    widen = true;
  }
  if (near(bx[4], b.mu_y_hi, 1.0) && b.mu_y_hi < 3.0) {
    widened.mu_y_hi = std::min(3.0, b.mu_y_hi * 1.5);
    widen = true;
  }
  if (near(bx[5], b.mu_z_hi, 1.0) && b.mu_z_hi < 3.0) {
    widened.mu_z_hi = std::min(3.0, b.mu_z_hi * 1.5);
    widen = true;
  }
  Vec final_x = s.best_x;
  double final_rate = s.best_rate;
  int final_evals = s.evals;
  if (widen) {
    result.hit_bound = true;
    OptimizerConfig wconf = config;
    wconf.bounds = widened;
    wconf.budget = config.budget + config.budget / 2;
    Search s2{objective, m, N, wconf};
    s2.trace = &result.trace;
    s2.evals = s.evals;
    s2.best_rate = s.best_rate;
    s2.best_x = s.best_x;
    coordinate_descent(s2, s.best_x, wconf.budget - s2.evals);
    final_x = s2.best_x;
    final_rate = s2.best_rate;
    final_evals = s2.evals;
  }

  result.best = to_params(final_x, m, N);
  result.rate = final_rate;
  result.evaluations = final_evals;
  return result;
}

OptResult optimize_rate(const ChannelParams& channel,
                        const SecurityParams& security, int m, double N,
                        bool asymptotic, const OptimizerConfig& config,
                        const std::optional<ProtocolParams>& init) {
  // The raw (unclamped) key length keeps a slope where the secret key rate
  // is zero, which lets descent climb out of the dead region.
  Objective objective = [&](const ProtocolParams& p) {
    return evaluate(p, channel, security, asymptotic).N_f_raw / p.N;
  };
  // At long distance the optimal slice narrows; scale the random-start hint
  // with the channel loss.
  double lambda_hint =
      std::clamp(20.0 * per_arm_transmittance(channel), 1e-3, 0.25);
  OptResult result = optimize(objective, m, N, lambda_hint, config, init);
  result.rate = evaluate(result.best, channel, security, asymptotic).rate;
  return result;
}

std::vector<ScanRow> scan(const std::vector<double>& distances,
                          const std::vector<int>& m_values,
                          const ChannelParams& channel,
                          const SecurityParams& security, double N,
                          bool asymptotic, const OptimizerConfig& config,
                          bool warm_start) {
  if (!std::is_sorted(distances.begin(), distances.end())) {
    throw std::invalid_argument("scan: distances must be ascending");
  }
  std::vector<ScanRow> rows;
  for (int m : m_values) {
    std::optional<ProtocolParams> prev;
    for (double L : distances) {
      ChannelParams ch = channel;
      ch.L_km = L;
      OptResult opt = optimize_rate(ch, security, m, N, asymptotic, config,
                                    warm_start ? prev : std::nullopt);
      KeyRateResult kr = evaluate(opt.best, ch, security, asymptotic);
      rows.push_back({kr, m});
      if (warm_start) prev = opt.best;
    }
  }
  return rows;
}

}  // namespace snsrs
