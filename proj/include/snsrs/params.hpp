#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace snsrs {

// Pulse intensity choice of one party in one time window.
enum class Pulse : int { v = 0, x = 1, y = 2, z = 3 };

inline constexpr std::array<Pulse, 4> kAllPulses{Pulse::v, Pulse::x, Pulse::y,
                                                 Pulse::z};

inline char pulse_char(Pulse p) {
  switch (p) {
    case Pulse::v: return 'v';
    case Pulse::x: return 'x';
    case Pulse::y: return 'y';
    case Pulse::z: return 'z';
  }
  return '?';
}

// Window class lr: Alice chose intensity l, Bob chose intensity r.
// Symmetric pairs (vz vs zv) are distinct; 16 classes total.
struct WindowClass {
  Pulse l;
  Pulse r;

  int index() const { return static_cast<int>(l) * 4 + static_cast<int>(r); }
  static WindowClass from_index(int i) {
    return {static_cast<Pulse>(i / 4), static_cast<Pulse>(i % 4)};
  }
  std::string name() const { return {pulse_char(l), pulse_char(r)}; }
  bool operator==(const WindowClass&) const = default;
};

inline constexpr int kNumClasses = 16;

// Source-side protocol parameters, identical for Alice and Bob.
struct ProtocolParams {
  double p_v = 0.5;
  double p_x = 0.1;
  double p_y = 0.1;
  double p_z = 0.3;
  double mu_x = 0.1;   // decoy, mu_x < mu_y
  double mu_y = 0.3;   // decoy
  double mu_z = 0.45;  // signal
  int m = 2;           // number of redundant-space modes
  std::vector<double> mode_probs;  // P_{r_j}; empty means uniform 1/m
  double lambda_slice = 0.05;      // phase-slice parameter lambda
  double N = 1e10;                 // total time windows

  double prob(Pulse p) const {
    switch (p) {
      case Pulse::v: return p_v;
      case Pulse::x: return p_x;
      case Pulse::y: return p_y;
      case Pulse::z: return p_z;
    }
    return 0.0;
  }
  double mu(Pulse p) const {
    switch (p) {
      case Pulse::v: return 0.0;
      case Pulse::x: return mu_x;
      case Pulse::y: return mu_y;
      case Pulse::z: return mu_z;
    }
    return 0.0;
  }
  double mode_prob(int j) const {
    return mode_probs.empty() ? 1.0 / m : mode_probs[j];
  }
  bool uniform_modes() const;
  // Slice half-width angle: Delta = 2*arccos(1 - lambda).
  double delta() const;
};

// Symmetric channel; the measurement station sits at the midpoint.
struct ChannelParams {
  double L_km = 0.0;          // total Alice-Bob fiber length
  double alpha_db_km = 0.2;   // fiber attenuation
  double eta0 = 0.5;          // detector efficiency
  double dark = 1e-8;         // dark count probability per detector per window
  double e_mis = 0.03;        // misalignment error
};

struct SecurityParams {
  double xi = 1e-10;       // Chernoff failure probability per bound use
  double eps_cor = 1e-10;  // error-correction failure probability
  double eps_pa = 1e-10;   // privacy-amplification failure probability
  double eps_hat = 1e-10;  // entropy chain-rule coefficient
  double f_ec = 1.1;       // error-correction efficiency factor
};

struct Config {
  ProtocolParams protocol;
  ChannelParams channel;
  SecurityParams security;
};

struct ValidationResult {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Checks all invariants and normalizes mode_probs in place when their sum is
// within 1e-9 of 1. Each violated invariant is reported individually.
ValidationResult validate(Config& config);

// Transmittance of one arm (source to midpoint detectors), including
// detector efficiency: eta = eta0 * 10^(-alpha*(L/2)/10).
double per_arm_transmittance(const ChannelParams& channel);

}  // namespace snsrs
