#include "snsrs/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace snsrs {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for key '" + key + "': " + value);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Config parse_config(std::istream& in) {
  Config config;
  std::map<std::string, std::function<void(double)>> setters{
      {"p_v", [&](double v) { config.protocol.p_v = v; }},
      {"p_x", [&](double v) { config.protocol.p_x = v; }},
      {"p_y", [&](double v) { config.protocol.p_y = v; }},
      {"p_z", [&](double v) { config.protocol.p_z = v; }},
      {"mu_x", [&](double v) { config.protocol.mu_x = v; }},
      {"mu_y", [&](double v) { config.protocol.mu_y = v; }},
      {"mu_z", [&](double v) { config.protocol.mu_z = v; }},
      {"m", [&](double v) { config.protocol.m = static_cast<int>(v); }},
      {"lambda", [&](double v) { config.protocol.lambda_slice = v; }},
      {"N", [&](double v) { config.protocol.N = v; }},
      {"L_km", [&](double v) { config.channel.L_km = v; }},
      {"alpha_db_km", [&](double v) { config.channel.alpha_db_km = v; }},
      {"eta0", [&](double v) { config.channel.eta0 = v; }},
      {"dark", [&](double v) { config.channel.dark = v; }},
      {"e_mis", [&](double v) { config.channel.e_mis = v; }},
      {"xi", [&](double v) { config.security.xi = v; }},
      {"eps_cor", [&](double v) { config.security.eps_cor = v; }},
      {"eps_pa", [&](double v) { config.security.eps_pa = v; }},
      {"eps_hat", [&](double v) { config.security.eps_hat = v; }},
      {"f_ec", [&](double v) { config.security.f_ec = v; }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
    it->second(parse_double(key, value));
  }
  return config;
}

Config parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

std::string serialize_config(const Config& config) {
  const auto& p = config.protocol;
  const auto& ch = config.channel;
  const auto& s = config.security;
  std::ostringstream os;
  os << "# protocol\n"
     << "p_v = " << format_double(p.p_v) << "\n"
     << "p_x = " << format_double(p.p_x) << "\n"
     << "p_y = " << format_double(p.p_y) << "\n"
     << "p_z = " << format_double(p.p_z) << "\n"
     << "mu_x = " << format_double(p.mu_x) << "\n"
     << "mu_y = " << format_double(p.mu_y) << "\n"
     << "mu_z = " << format_double(p.mu_z) << "\n"
     << "m = " << p.m << "\n"
     << "lambda = " << format_double(p.lambda_slice) << "\n"
     << "N = " << format_double(p.N) << "\n"
     << "# channel\n"
     << "L_km = " << format_double(ch.L_km) << "\n"
     << "alpha_db_km = " << format_double(ch.alpha_db_km) << "\n"
     << "eta0 = " << format_double(ch.eta0) << "\n"
     << "dark = " << format_double(ch.dark) << "\n"
     << "e_mis = " << format_double(ch.e_mis) << "\n"
     << "# security\n"
     << "xi = " << format_double(s.xi) << "\n"
     << "eps_cor = " << format_double(s.eps_cor) << "\n"
     << "eps_pa = " << format_double(s.eps_pa) << "\n"
     << "eps_hat = " << format_double(s.eps_hat) << "\n"
     << "f_ec = " << format_double(s.f_ec) << "\n";
  return os.str();
}

}  // namespace snsrs
