#include "snsrs/analytic.hpp"

#include <cmath>

namespace snsrs {

namespace detail {

namespace {

double simpson(double (*f)(double, const void*), const void* ctx, double a,
               double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double (*f)(double, const void*), const void* ctx, double a,
                double fa, double b, double fb, double m, double fm,
                double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm, ctx), frm = f(rm, ctx);
  double left = simpson(f, ctx, a, fa, m, fm, lm, flm);
  double right = simpson(f, ctx, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, ctx, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, ctx, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(double (*f)(double, const void*), const void* ctx, double a,
                 double b, double rel_tol) {
  if (a == b) return 0.0;
  double fa = f(a, ctx), fb = f(b, ctx);
  double m = 0.5 * (a + b), fm = f(m, ctx);
  double whole = simpson(f, ctx, a, fa, b, fb, m, fm);
  double scale = std::max(std::abs(whole), 1e-300);
  return adaptive(f, ctx, a, fa, b, fb, m, fm, whole, rel_tol * scale, 48);
}

}  // namespace detail

namespace {

struct ClickModel {
  double dark;
  double no_click_rest;  // (1-d)^(2(m-1)): other modes' detectors stay silent

  double p_click(double I) const {
    return 1.0 - (1.0 - dark) * std::exp(-I);
  }
  double p_no_click(double I) const { return (1.0 - dark) * std::exp(-I); }
};

struct SliceCtx {
  ClickModel model;
  double x;       // eta*(mu_l + mu_r)
  double yprime;  // (1-2*E_d) * 2*eta*sqrt(mu_l*mu_r)
};

// Error event at relative phase delta inside the slice: only the
// destructive-interference detector clicks.
double slice_error_integrand(double delta, const void* ctx) {
  const auto& c = *static_cast<const SliceCtx*>(ctx);
  double interference = c.yprime * std::abs(std::cos(delta));
  double I_err = 0.5 * (c.x - interference);
  double I_ok = 0.5 * (c.x + interference);
  return c.model.p_click(I_err) * c.model.p_no_click(I_ok);
}

// Phase-averaged accepted rate for a same-mode two-sided class:
//   mean over delta of [pc(I+)pn(I-) + pc(I-)pn(I+)]
//     = 2(1-d) e^{-x/2} I0(y'/2) - 2(1-d)^2 e^{-x}.
double interference_rate(const ClickModel& model, double x, double yprime) {
  double d = model.dark;
  double avg = 2.0 * (1.0 - d) * std::exp(-0.5 * x) *
                   std::cyl_bessel_i(0.0, 0.5 * yprime) -
               2.0 * (1.0 - d) * (1.0 - d) * std::exp(-x);
  return avg * model.no_click_rest;
}

double one_sided_rate(const ClickModel& model, double I) {
  return 2.0 * model.p_click(I) * model.p_no_click(I) * model.no_click_rest;
}

}  // namespace

ExpectedStats window_counts(const ProtocolParams& params) {
  ExpectedStats stats;
  stats.m = params.m;
  const double N = params.N;
  stats.N_vv = N * params.p_v * params.p_v;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    auto c = WindowClass::from_index(ci);
    stats.windows[ci].assign(params.m, 0.0);
    stats.rate[ci].assign(params.m, 0.0);
    for (int j = 0; j < params.m; ++j) {
      double Pj = params.mode_prob(j);
      double base = N * params.prob(c.l) * params.prob(c.r);
      if (c.l == Pulse::v && c.r == Pulse::v) {
        stats.windows[ci][j] = stats.N_vv;
      } else if (c.l == Pulse::v || c.r == Pulse::v) {
        stats.windows[ci][j] = base * Pj;
      } else {
        stats.windows[ci][j] = base * Pj * Pj;
      }
    }
  }
  const double delta = params.delta();
  stats.n_delta.assign(params.m, 0.0);
  for (int j = 0; j < params.m; ++j) {
    double Pj = params.mode_prob(j);
    stats.n_delta[j] = (delta / M_PI) * params.p_x * params.p_x * N * Pj * Pj;
  }
  stats.t_delta.assign(params.m, 0.0);
  stats.w_tx.assign(params.m, 0.0);
  return stats;
}

std::vector<double> phase_slice_error_rate(const ProtocolParams& params,
                                           const ChannelParams& channel) {
  const double eta = per_arm_transmittance(channel);
  ClickModel model{channel.dark,
                   std::pow(1.0 - channel.dark, 2.0 * (params.m - 1))};
  SliceCtx ctx{model, 2.0 * eta * params.mu_x,
               (1.0 - 2.0 * channel.e_mis) * 2.0 * eta * params.mu_x};
  const double delta = params.delta();
  double t = (2.0 / delta) * detail::integrate(slice_error_integrand, &ctx,
                                               0.0, 0.5 * delta, 1e-10) *
             model.no_click_rest;
  return std::vector<double>(params.m, t);
}

ExpectedStats counting_rates(const ProtocolParams& params,
                             const ChannelParams& channel) {
  ExpectedStats stats = window_counts(params);
  const double eta = per_arm_transmittance(channel);
  const double d = channel.dark;
  ClickModel model{d, std::pow(1.0 - d, 2.0 * (params.m - 1))};

  for (int ci = 0; ci < kNumClasses; ++ci) {
    auto c = WindowClass::from_index(ci);
    double rate;
    if (c.l == Pulse::v && c.r == Pulse::v) {
      // Single dark count in the announced mode, all other detectors silent.
      rate = 2.0 * d * std::pow(1.0 - d, 2.0 * params.m - 1.0);
    } else if (c.l == Pulse::v || c.r == Pulse::v) {
      double mu = params.mu(c.l == Pulse::v ? c.r : c.l);
      rate = one_sided_rate(model, 0.5 * eta * mu);
    } else {
      // Both non-vacuum in the same mode: first-order interference.
      double mul = params.mu(c.l), mur = params.mu(c.r);
      double x = eta * (mul + mur);
      double yprime = (1.0 - 2.0 * channel.e_mis) * 2.0 * eta *
                      std::sqrt(mul * mur);
      rate = interference_rate(model, x, yprime);
    }
    for (int j = 0; j < params.m; ++j) stats.rate[ci][j] = rate;
  }

  stats.t_delta = phase_slice_error_rate(params, channel);
  for (int j = 0; j < params.m; ++j) {
    stats.w_tx[j] = stats.t_delta[j] * stats.n_delta[j];
  }
  return stats;
}

}  // namespace snsrs
