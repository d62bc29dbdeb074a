// Python bindings for the key-rate engine: parameter structs, the analytic
// model, the event-level simulator, the finite-key analysis, and the
// optimizer.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "snsrs/config.hpp"
#include "snsrs/decoy.hpp"
#include "snsrs/keyrate.hpp"
#include "snsrs/mc.hpp"
#include "snsrs/optimizer.hpp"
#include "snsrs/version.hpp"

namespace py = pybind11;
using namespace snsrs;

namespace {

py::dict counts_to_dict(const ObservedCounts& c) {
  py::dict windows, heralded, accepted;
  for (int ci = 0; ci < kNumClasses; ++ci) {
    auto name = WindowClass::from_index(ci).name();
    windows[py::str(name)] = c.windows[ci];
    heralded[py::str(name)] = c.heralded[ci];
    accepted[py::str(name)] = c.accepted[ci];
  }
  using namespace py::literals;
  return py::dict("m"_a = c.m, "n_trials"_a = c.n_trials, "seed"_a = c.seed,
                  "rng"_a = c.rng_name, "n_vv_windows"_a = c.n_vv_windows,
                  "windows"_a = windows, "heralded"_a = heralded,
                  "accepted"_a = accepted, "n_delta"_a = c.n_delta,
                  "w_tx"_a = c.w_tx);
}

}  // namespace

PYBIND11_MODULE(_snsrs, mod) {
  mod.doc() =
      "Key-rate engine for sending-or-not-sending twin-field QKD with "
      "redundant-space post-selection";
  mod.attr("__version__") = kVersion;

  py::class_<ProtocolParams>(mod, "ProtocolParams")
      .def(py::init<>())
      .def_readwrite("p_v", &ProtocolParams::p_v)
      .def_readwrite("p_x", &ProtocolParams::p_x)
      .def_readwrite("p_y", &ProtocolParams::p_y)
      .def_readwrite("p_z", &ProtocolParams::p_z)
      .def_readwrite("mu_x", &ProtocolParams::mu_x)
      .def_readwrite("mu_y", &ProtocolParams::mu_y)
      .def_readwrite("mu_z", &ProtocolParams::mu_z)
      .def_readwrite("m", &ProtocolParams::m)
      .def_readwrite("mode_probs", &ProtocolParams::mode_probs)
      .def_readwrite("lambda_slice", &ProtocolParams::lambda_slice)
      .def_readwrite("N", &ProtocolParams::N)
      .def("delta", &ProtocolParams::delta);

  py::class_<ChannelParams>(mod, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("L_km", &ChannelParams::L_km)
      .def_readwrite("alpha_db_km", &ChannelParams::alpha_db_km)
      .def_readwrite("eta0", &ChannelParams::eta0)
      .def_readwrite("dark", &ChannelParams::dark)
      .def_readwrite("e_mis", &ChannelParams::e_mis);

  py::class_<SecurityParams>(mod, "SecurityParams")
      .def(py::init<>())
      .def_readwrite("xi", &SecurityParams::xi)
      .def_readwrite("eps_cor", &SecurityParams::eps_cor)
      .def_readwrite("eps_pa", &SecurityParams::eps_pa)
      .def_readwrite("eps_hat", &SecurityParams::eps_hat)
      .def_readwrite("f_ec", &SecurityParams::f_ec);

  py::class_<Config>(mod, "Config")
      .def(py::init<>())
      .def_readwrite("protocol", &Config::protocol)
      .def_readwrite("channel", &Config::channel)
      .def_readwrite("security", &Config::security);

  py::class_<KeyRateResult>(mod, "KeyRateResult")
      .def_readonly("distance_km", &KeyRateResult::distance_km)
      .def_readonly("params", &KeyRateResult::params)
      .def_readonly("n1", &KeyRateResult::n1)
      .def_readonly("e1ph", &KeyRateResult::e1ph)
      .def_readonly("n_t", &KeyRateResult::n_t)
      .def_readonly("E_t", &KeyRateResult::E_t)
      .def_readonly("N_f", &KeyRateResult::N_f)
      .def_readonly("rate", &KeyRateResult::rate)
      .def_readonly("plob1", &KeyRateResult::plob1)
      .def_readonly("plob2", &KeyRateResult::plob2)
      .def_readonly("flags", &KeyRateResult::flags)
      .def_readonly("epsilon_spent", &KeyRateResult::epsilon_spent)
      .def_readonly("asymptotic", &KeyRateResult::asymptotic);

  py::class_<OptResult>(mod, "OptResult")
      .def_readonly("best", &OptResult::best)
      .def_readonly("rate", &OptResult::rate)
      .def_readonly("evaluations", &OptResult::evaluations)
      .def_readonly("hit_bound", &OptResult::hit_bound);

  mod.def("parse_config", &parse_config_string, py::arg("text"),
          "Parse a key = value configuration string");
  mod.def("serialize_config", &serialize_config, py::arg("config"));
  mod.def(
      "validate",
      [](Config& c) {
        auto r = validate(c);
        return r.errors;
      },
      py::arg("config"),
      "Validate a configuration in place; returns the list of violations");
  mod.def("per_arm_transmittance", &per_arm_transmittance, py::arg("channel"));
  mod.def("binary_entropy", &binary_entropy, py::arg("x"));
  mod.def("plob_bound", &plob_bound, py::arg("channel"),
          py::arg("use_detector_efficiency"));

  mod.def(
      "evaluate",
      [](const ProtocolParams& p, const ChannelParams& ch,
         const SecurityParams& sec, bool asymptotic) {
        return evaluate(p, ch, sec, asymptotic);
      },
      py::arg("protocol"), py::arg("channel"), py::arg("security"),
      py::arg("asymptotic") = false,
      "Analytic-model key rate at one parameter point");

  mod.def(
      "simulate",
      [](const ProtocolParams& p, const ChannelParams& ch,
         std::uint64_t n_trials, std::uint64_t seed, int n_threads) {
        return counts_to_dict(simulate(p, ch, n_trials, seed, n_threads));
      },
      py::arg("protocol"), py::arg("channel"), py::arg("n_trials"),
      py::arg("seed"), py::arg("n_threads") = 0,
      "Event-level Monte Carlo tallies (deterministic per seed)");

  mod.def(
      "compare_simulation",
      [](const ProtocolParams& p, const ChannelParams& ch,
         std::uint64_t n_trials, std::uint64_t seed, double sigma) {
        ObservedCounts counts = simulate(p, ch, n_trials, seed);
        ExpectedStats stats = counting_rates(p, ch);
        CompareReport report = compare(counts, stats, sigma);
        py::list flagged;
        for (const auto& bin : report.flagged) {
          using namespace py::literals;
          flagged.append(py::dict("name"_a = bin.name,
                                  "windows"_a = bin.windows,
                                  "expected"_a = bin.expected,
                                  "observed"_a = bin.observed, "z"_a = bin.z));
        }
        return flagged;
      },
      py::arg("protocol"), py::arg("channel"), py::arg("n_trials"),
      py::arg("seed"), py::arg("sigma") = 4.0,
      "Simulate and return the bins deviating from the analytic model");

  mod.def(
      "optimize_rate",
      [](const ChannelParams& ch, const SecurityParams& sec, int m, double N,
         bool asymptotic, int budget, std::uint64_t seed) {
        OptimizerConfig oc;
        oc.budget = budget;
        oc.seed = seed;
        return optimize_rate(ch, sec, m, N, asymptotic, oc);
      },
      py::arg("channel"), py::arg("security"), py::arg("m"), py::arg("N"),
      py::arg("asymptotic") = false, py::arg("budget") = 20000,
      py::arg("seed") = 1,
      "Optimized key rate at one channel point");
}
