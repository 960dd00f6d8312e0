#include "rdde/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "rdde/errors.hpp"

namespace rdde {

System Config::system() const {
  System sys;
  sys.vf = make_field(field_name, field_params);
  sys.r = r;
  sys.n_coarse = n_coarse;
  sys.refine = refine;
  sys.gamma = gamma;
  sys.convention = convention;
  sys.deterministic = deterministic;
  sys.init = Vec::Constant(sys.vf.w, init);
  return sys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>> kFieldParams = {
    {"linear", {"b", "c"}},
    {"pure-delay-linear", {"a"}},
    {"quadratic-at-zero", {"q", "a"}},
    {"sine-product", {"s0", "s1", "s2"}},
    {"ou-additive", {"c", "s0", "s1"}},
};

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + v + "'");
  }
}

int to_int(const std::string& v, const std::string& key) {
  const double x = to_double(v, key);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) {
    throw ConfigError("config: key '" + key + "' must be an integer, got '" + v + "'");
  }
  return i;
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::vector<std::string> unknown;
  std::string section;
  std::map<std::string, double> field_params;
  std::string field_name = cfg.field_name;
  bool field_name_set = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "noise" && section != "exponents" && section != "field" &&
          section != "run") {
        unknown.push_back("[" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section.empty() ? key : section + "." + key;

    if (section == "noise") {
      if (key == "r") cfg.r = to_double(val, qual);
      else if (key == "n_coarse") cfg.n_coarse = to_int(val, qual);
      else if (key == "refine") cfg.refine = to_int(val, qual);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
      else if (key == "deterministic") cfg.deterministic = to_int(val, qual) != 0;
      else if (key == "convention") {
        if (val == "ito") cfg.convention = Convention::Ito;
        else if (val == "stratonovich" || val == "strat") cfg.convention = Convention::Stratonovich;
        else throw ConfigError("config: convention must be 'ito' or 'stratonovich'");
      } else unknown.push_back(qual);
    } else if (section == "exponents") {
      if (key == "alpha") cfg.alpha = to_double(val, qual);
      else if (key == "beta") cfg.beta = to_double(val, qual);
      else if (key == "gamma") cfg.gamma = to_double(val, qual);
      else unknown.push_back(qual);
    } else if (section == "field") {
      if (key == "name") {
        field_name = val;
        field_name_set = true;
      } else {
        field_params[key] = to_double(val, qual);
      }
    } else if (section == "run") {
      if (key == "n_steps") cfg.n_steps = to_int(val, qual);
      else if (key == "k") cfg.k = to_int(val, qual);
      else if (key == "n_seeds") cfg.n_seeds = to_int(val, qual);
      else if (key == "init") cfg.init = to_double(val, qual);
      else if (key == "upsilon") cfg.upsilon = to_double(val, qual);
      else if (key == "epsilon") cfg.epsilon = to_double(val, qual);
      else if (key == "probe_depth") cfg.probe_depth = to_int(val, qual);
      else if (key == "stat_T") cfg.stat_T = to_double(val, qual);
      else if (key == "tol") cfg.tol = to_double(val, qual);
      else if (key == "reorth_every") cfg.reorth_every = to_int(val, qual);
      else unknown.push_back(qual);
    } else {
      unknown.push_back(qual);
    }
  }

  const auto it = kFieldParams.find(field_name);
  if (it == kFieldParams.end()) {
    if (field_name_set) throw ConfigError("config: unknown field '" + field_name + "'");
  } else {
    for (const auto& [k, v] : field_params) {
      (void)v;
      if (!it->second.count(k)) unknown.push_back("field." + k);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "config: unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  cfg.field_name = field_name;
  cfg.field_params = field_params;

  if (const char* env = std::getenv("ROUGHDELAY_SEED")) {
    try {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ConfigError("ROUGHDELAY_SEED is not an unsigned integer");
    }
  }
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace rdde
