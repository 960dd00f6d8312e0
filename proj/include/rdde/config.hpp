#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rdde/ergodic.hpp"

namespace rdde {

/// Flat INI-style configuration with sections [noise], [exponents],
/// [field], [run]. Unknown sections or keys are rejected with a message
/// listing them; the ROUGHDELAY_SEED environment variable overrides the
/// configured seed.
struct Config {
  // [noise]
  double r = 1.0;
  int n_coarse = 32;
  int refine = 8;
  std::uint64_t seed = 1;
  bool deterministic = false;
  Convention convention = Convention::Ito;

  // [exponents]
  double alpha = 0.34;
  double beta = 0.49;
  double gamma = 0.495;

  // [field]
  std::string field_name = "linear";
  std::map<std::string, double> field_params;

  // [run]
  int n_steps = 50;
  int k = 1;
  int n_seeds = 1;
  double init = 1.0;
  double upsilon = 0.1;
  double epsilon = 1e-4;
  int probe_depth = 20;
  double stat_T = 20.0;
  double tol = 1e-8;
  int reorth_every = 1;

  System system() const;
};

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace rdde
