#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "snsrs/params.hpp"

namespace snsrs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value configuration, one `key = value` per line, `#` comments.
// Recognized keys: p_v, p_x, p_y, p_z, mu_x, mu_y, mu_z, m, lambda, N,
// L_km, alpha_db_km, eta0, dark, e_mis, xi, eps_cor, eps_pa, eps_hat, f_ec.
Config parse_config(std::istream& in);
Config parse_config_string(const std::string& text);
Config load_config(const std::string& path);

// Serialization uses max-precision decimal floats so that parse(serialize(c))
// reproduces every value bit-for-bit.
std::string serialize_config(const Config& config);

}  // namespace snsrs
