// Command-line front end: key-rate evaluation, distance scans, Monte Carlo
// validation, and the built-in rate-comparison table. All numeric output is
// CSV; every CSV file is accompanied by a manifest that allows a
// byte-identical replay.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "snsrs/config.hpp"
#include "snsrs/keyrate.hpp"
#include "snsrs/mc.hpp"
#include "snsrs/optimizer.hpp"
#include "snsrs/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct ManifestInfo {
  std::string command;       // replayable argument list (without argv[0])
  snsrs::Config config;
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64";
  double epsilon_spent = 0.0;
};

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string manifest_text(const ManifestInfo& info) {
  std::ostringstream os;
  os << "command = " << info.command << "\n"
     << "version = " << snsrs::kVersion << "\n"
     << "rng = " << info.rng << "\n"
     << "seed = " << info.seed << "\n"
     << "timestamp = " << timestamp_utc() << "\n";
  char eps[32];
  std::snprintf(eps, sizeof(eps), "%.9e", info.epsilon_spent);
  os << "epsilon_spent = " << eps << "\n";
  std::istringstream cfg(snsrs::serialize_config(info.config));
  std::string line;
  while (std::getline(cfg, line)) {
    if (line.empty() || line[0] == '#') continue;
    os << "config." << line << "\n";
  }
  return os.str();
}

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& csv,
          const ManifestInfo& info) {
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file_atomic(out_path, csv);
    write_file_atomic(out_path + ".manifest", manifest_text(info));
  }
}

snsrs::Config load_validated(const std::string& path) {
  snsrs::Config config = snsrs::load_config(path);
  auto check = snsrs::validate(config);
  if (!check.ok()) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& e : check.errors) os << "\n  " << e;
    throw snsrs::ConfigError(os.str());
  }
  return config;
}

snsrs::Config builtin_row_c() {
  snsrs::Config c;
  c.channel = {0.0, 0.2, 0.5, 1e-9, 0.03};
  c.protocol.N = 1e10;
  c.security = {1e-10, 1e-10, 1e-10, 1e-10, 1.1};
  return c;
}

std::string format_args(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

int run_rate(const std::string& config_path, double distance, int m,
             bool asymptotic, std::uint64_t seed, int budget,
             const std::string& out, const std::string& cmdline) {
  snsrs::Config config = load_validated(config_path);
  config.protocol.m = m;
  config.channel.L_km = distance;

  snsrs::OptimizerConfig oc;
  oc.budget = budget;
  oc.seed = seed;
  snsrs::OptResult opt =
      snsrs::optimize_rate(config.channel, config.security, m,
                           config.protocol.N, asymptotic, oc);
  snsrs::KeyRateResult kr =
      snsrs::evaluate(opt.best, config.channel, config.security, asymptotic);

  std::ostringstream csv;
  csv << snsrs::keyrate_csv_header() << "\n"
      << snsrs::keyrate_csv_row(kr, m) << "\n";
  ManifestInfo info{cmdline, config, seed, "mt19937_64", kr.epsilon_spent};
  emit(out, csv.str(), info);
  return kExitOk;
}

int run_scan(const std::string& config_path, double d_from, double d_to,
             double d_step, const std::vector<int>& m_values, bool asymptotic,
             std::uint64_t seed, int budget, const std::string& out,
             const std::string& cmdline) {
  if (m_values.empty()) throw std::invalid_argument("no modes requested");
  snsrs::Config config = load_validated(config_path);
  std::vector<double> distances;
  for (double L = d_from; L <= d_to + 1e-9; L += d_step) distances.push_back(L);

  snsrs::OptimizerConfig oc;
  oc.budget = budget;
  oc.seed = seed;
  auto rows = snsrs::scan(distances, m_values, config.channel, config.security,
                          config.protocol.N, asymptotic, oc, true);

  std::ostringstream csv;
  csv << snsrs::keyrate_csv_header() << "\n";
  double eps_spent = 0.0;
  for (const auto& row : rows) {
    csv << snsrs::keyrate_csv_row(row.result, row.m) << "\n";
    eps_spent += row.result.epsilon_spent;
  }
  ManifestInfo info{cmdline, config, seed, "mt19937_64", eps_spent};
  emit(out, csv.str(), info);
  return kExitOk;
}

int run_validate(const std::string& config_path, std::uint64_t trials,
                 std::uint64_t seed, double sigma) {
  snsrs::Config config = load_validated(config_path);
  auto stats = snsrs::counting_rates(config.protocol, config.channel);
  auto observed =
      snsrs::simulate(config.protocol, config.channel, trials, seed);
  auto report = snsrs::compare(observed, stats, sigma);

  std::cout << "bins_checked=" << report.bins.size()
            << " flagged=" << report.flagged.size() << " trials=" << trials
            << " seed=" << seed << " rng=" << observed.rng_name << "\n";
  for (const auto& bin : report.flagged) {
    std::printf("%-10s windows=%.0f expected=%.6g observed=%.0f z=%+.3f\n",
                bin.name.c_str(), bin.windows, bin.expected, bin.observed,
                bin.z);
  }
  return report.agree() ? kExitOk : kExitValidation;
}

int run_table2(std::uint64_t seed, int budget, const std::string& out,
               const std::string& cmdline) {
  snsrs::Config config = builtin_row_c();
  const std::vector<double> distances{250.0, 300.0, 350.0};
  const std::vector<int> m_values{1, 2, 6, 20};

  std::ostringstream csv;
  csv << "method,rate_250km,rate_300km,rate_350km,flags\n";
  char line[256];
  std::snprintf(line, sizeof(line), "PLOB-2,%.9e,%.9e,%.9e,",
                snsrs::plob_bound({250.0, 0.2, 0.5, 0, 0}, false),
                snsrs::plob_bound({300.0, 0.2, 0.5, 0, 0}, false),
                snsrs::plob_bound({350.0, 0.2, 0.5, 0, 0}, false));
  csv << line << "\n";

  snsrs::OptimizerConfig oc;
  oc.budget = budget;
  oc.seed = seed;
  double eps_spent = 0.0;
  for (int m : m_values) {
    auto rows = snsrs::scan(distances, {m}, config.channel, config.security,
                            config.protocol.N, false, oc, true);
    std::string name = m == 1 ? "SNS" : "m=" + std::to_string(m);
    std::snprintf(line, sizeof(line), "%s,%.9e,%.9e,%.9e,", name.c_str(),
                  rows[0].result.rate, rows[1].result.rate,
                  rows[2].result.rate);
    csv << line << "\n";
    for (const auto& row : rows) eps_spent += row.result.epsilon_spent;
  }
  // Published AOPP values at the same device parameters, for side-by-side
  // comparison only.
  csv << "AOPP,8.38e-06,1.59e-06,1.43e-07,reference_not_computed\n";

  ManifestInfo info{cmdline, config, seed, "mt19937_64", eps_spent};
  emit(out, csv.str(), info);
  return kExitOk;
}

int dispatch(std::vector<std::string> args);

// Re-executes the command recorded in a manifest; the config snapshot is
// materialized next to the manifest so the rerun sees identical inputs.
int run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw snsrs::ConfigError("cannot open manifest: " + manifest_path);
  std::string line, command, config_text;
  while (std::getline(in, line)) {
    if (line.rfind("command = ", 0) == 0) {
      command = line.substr(10);
    } else if (line.rfind("config.", 0) == 0) {
      config_text += line.substr(7) + "\n";
    }
  }
  if (command.empty()) {
    throw snsrs::ConfigError("manifest has no command line");
  }
  std::string config_path = manifest_path + ".config";
  write_file_atomic(config_path, config_text);

  std::vector<std::string> args;
  std::istringstream cs(command);
  std::string tok;
  bool next_is_config = false;
  while (cs >> tok) {
    if (next_is_config) {
      tok = config_path;
      next_is_config = false;
    } else if (tok == "--config") {
      next_is_config = true;
    }
    args.push_back(tok);
  }
  return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Key-rate engine for sending-or-not-sending twin-field QKD "
               "with redundant-space post-selection"};
  app.require_subcommand(1);

  std::string config_path, out_path, manifest_path;
  double distance = 0.0, d_from = 0.0, d_to = 0.0, d_step = 10.0;
  double sigma = 4.0;
  int m = 2, budget = 20000;
  std::uint64_t seed = 1, trials = 0;
  std::vector<int> m_values;
  bool asymptotic = false;

  auto* rate = app.add_subcommand("rate", "Optimized key rate at one point");
  rate->add_option("--config", config_path)->required();
  rate->add_option("--distance-km", distance)->required();
  rate->add_option("--m", m);
  rate->add_flag("--asymptotic", asymptotic);
  rate->add_option("--seed", seed);
  rate->add_option("--budget", budget);
  rate->add_option("--out", out_path);

  auto* scan_cmd = app.add_subcommand("scan", "Rate-versus-distance table");
  scan_cmd->add_option("--config", config_path)->required();
  scan_cmd->add_option("--from-km", d_from)->required();
  scan_cmd->add_option("--to-km", d_to)->required();
  scan_cmd->add_option("--step-km", d_step);
  scan_cmd->add_option("--m", m_values)->required();
  scan_cmd->add_flag("--asymptotic", asymptotic);
  scan_cmd->add_option("--seed", seed);
  scan_cmd->add_option("--budget", budget);
  scan_cmd->add_option("--out", out_path);

  auto* validate_cmd =
      app.add_subcommand("validate", "Monte Carlo versus analytic model");
  validate_cmd->add_option("--config", config_path)->required();
  validate_cmd->add_option("--trials", trials)->required();
  validate_cmd->add_option("--seed", seed);
  validate_cmd->add_option("--sigma", sigma);

  auto* table2 =
      app.add_subcommand("table2", "Built-in method comparison table");
  table2->add_option("--seed", seed);
  table2->add_option("--budget", budget);
  table2->add_option("--out", out_path)->required();

  auto* replay =
      app.add_subcommand("replay", "Re-run the command from a manifest");
  replay->add_option("manifest", manifest_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);

  std::string cmdline = format_args(args);
  if (rate->parsed()) {
    return run_rate(config_path, distance, m, asymptotic, seed, budget,
                    out_path, cmdline);
  }
  if (scan_cmd->parsed()) {
    return run_scan(config_path, d_from, d_to, d_step, m_values, asymptotic,
                    seed, budget, out_path, cmdline);
  }
  if (validate_cmd->parsed()) {
    if (trials == 0) throw CLI::ValidationError("--trials must be >= 1");
    return run_validate(config_path, trials, seed, sigma);
  }
  if (table2->parsed()) return run_table2(seed, budget, out_path, cmdline);
  if (replay->parsed()) return run_replay(manifest_path);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(std::move(args));
  } catch (const CLI::ParseError& e) {
    CLI::App dummy;
    int code = dummy.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const snsrs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
