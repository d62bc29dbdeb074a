#include "snsrs/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace snsrs {

bool ProtocolParams::uniform_modes() const {
  if (mode_probs.empty()) return true;
  for (double p : mode_probs) {
    if (std::abs(p - 1.0 / m) > 1e-12) return false;
  }
  return true;
}

double ProtocolParams::delta() const {
  return 2.0 * std::acos(1.0 - lambda_slice);
}

double per_arm_transmittance(const ChannelParams& channel) {
  return channel.eta0 *
         std::pow(10.0, -channel.alpha_db_km * (channel.L_km / 2.0) / 10.0);
}

namespace {

void check_prob(std::vector<std::string>& errs, const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << v << " outside [0,1]";
    errs.push_back(os.str());
  }
}

}  // namespace

ValidationResult validate(Config& config) {
  ValidationResult result;
  auto& errs = result.errors;
  auto& p = config.protocol;
  auto& ch = config.channel;
  auto& sec = config.security;

  check_prob(errs, "p_v", p.p_v);
  check_prob(errs, "p_x", p.p_x);
  check_prob(errs, "p_y", p.p_y);
  check_prob(errs, "p_z", p.p_z);
  double psum = p.p_v + p.p_x + p.p_y + p.p_z;
  if (std::abs(psum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "source probabilities sum to " << psum << ", expected 1";
    errs.push_back(os.str());
  }
  if (p.p_x <= 0.0 || p.p_y <= 0.0) {
    errs.push_back(
        "decoy intensities unused / p_x=0 or p_y=0 breaks the decoy-state "
        "denominator");
  }
  if (!(p.mu_x > 0.0)) errs.push_back("mu_x must be > 0");
  if (!(p.mu_y > p.mu_x)) {
    errs.push_back("mu_y <= mu_x: decoy analysis requires mu_x < mu_y");
  }
  if (!(p.mu_z > 0.0)) errs.push_back("mu_z must be > 0");
  if (p.m < 1) errs.push_back("mode count m must be >= 1");
  if (p.N < 1.0) errs.push_back("total window count N must be >= 1");
  if (!(p.lambda_slice > 0.0 && p.lambda_slice <= 1.0)) {
    errs.push_back("lambda must lie in (0,1]");
  }
  if (!p.mode_probs.empty()) {
    if (static_cast<int>(p.mode_probs.size()) != p.m) {
      std::ostringstream os;
      os << "mode_probs has length " << p.mode_probs.size() << ", expected "
         << p.m;
      errs.push_back(os.str());
    } else {
      double msum =
          std::accumulate(p.mode_probs.begin(), p.mode_probs.end(), 0.0);
      if (std::abs(msum - 1.0) <= 1e-9) {
        for (double& q : p.mode_probs) q /= msum;
      } else {
        std::ostringstream os;
        os << "mode probabilities sum to " << msum;
        errs.push_back(os.str());
      }
      for (double q : p.mode_probs) {
        if (q < 0.0) errs.push_back("mode probabilities must be nonnegative");
      }
    }
  }

  if (!(ch.L_km >= 0.0)) errs.push_back("L_km must be >= 0");
  if (!(ch.eta0 > 0.0 && ch.eta0 <= 1.0)) {
    errs.push_back("eta0 must lie in (0,1]");
  }
  if (!(ch.alpha_db_km >= 0.0)) errs.push_back("alpha_db_km must be >= 0");
  if (!(ch.dark >= 0.0 && ch.dark < 1.0)) {
    errs.push_back("dark count probability must lie in [0,1)");
  }
  if (!(ch.e_mis >= 0.0 && ch.e_mis < 0.5)) {
    errs.push_back("misalignment error must lie in [0,0.5)");
  }

  for (auto [name, v] : {std::pair{"xi", sec.xi}, {"eps_cor", sec.eps_cor},
                         {"eps_pa", sec.eps_pa}, {"eps_hat", sec.eps_hat}}) {
    if (!(v > 0.0 && v < 1.0)) {
      std::ostringstream os;
      os << name << " must lie in (0,1)";
      errs.push_back(os.str());
    }
  }
  if (!(sec.f_ec >= 1.0)) errs.push_back("f_ec must be >= 1");

  return result;
}

}  // namespace snsrs
