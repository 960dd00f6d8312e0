#include "rdde/io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rdde/errors.hpp"

namespace rdde {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'D', 'E', 'L', 'A', 'Y', '1'};

void put_i32(std::ostream& os, std::int32_t v) { os.write(reinterpret_cast<char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<char*>(&v), 8); }

std::int32_t get_i32(std::istream& is) {
  std::int32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

double get_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void save_rough_path(const DelayedRoughPath& rp, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f.write(kMagic, 8);
  put_i32(f, rp.dim);
  put_i32(f, rp.n_intervals);
  put_i32(f, rp.delay_steps);
  put_i32(f, rp.convention == Convention::Ito ? 0 : 1);
  put_f64(f, rp.t0);
  put_f64(f, rp.h);
  put_f64(f, rp.gamma);
  for (const auto& v : rp.raw_increments())
    for (int i = 0; i < rp.dim; ++i) put_f64(f, v[i]);
  for (const auto& a : rp.raw_areas())
    for (int i = 0; i < rp.dim; ++i)
      for (int j = 0; j < rp.dim; ++j) put_f64(f, a(i, j));
  for (const auto& a : rp.raw_delayed_areas())
    for (int i = 0; i < rp.dim; ++i)
      for (int j = 0; j < rp.dim; ++j) put_f64(f, a(i, j));
  if (!f) throw ConfigError("write failed for '" + path + "'");
}

DelayedRoughPath load_rough_path(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  char magic[8];
  f.read(magic, 8);
  if (!f || std::string(magic, 8) != std::string(kMagic, 8)) {
    throw ConfigError("'" + path + "' is not a rough path file");
  }
  DelayedRoughPath rp;
  rp.dim = get_i32(f);
  rp.n_intervals = get_i32(f);
  rp.delay_steps = get_i32(f);
  rp.convention = get_i32(f) == 0 ? Convention::Ito : Convention::Stratonovich;
  rp.t0 = get_f64(f);
  rp.h = get_f64(f);
  rp.gamma = get_f64(f);
  if (rp.dim <= 0 || rp.n_intervals <= 0 || rp.delay_steps < 0) {
    throw ConfigError("'" + path + "' has a corrupt header");
  }
  auto& incr = rp.raw_increments();
  auto& area = rp.raw_areas();
  auto& darea = rp.raw_delayed_areas();
  incr.resize(rp.n_intervals + rp.delay_steps);
  for (auto& v : incr) {
    v.resize(rp.dim);
    for (int i = 0; i < rp.dim; ++i) v[i] = get_f64(f);
  }
  area.resize(rp.n_intervals);
  darea.resize(rp.n_intervals);
  for (auto& a : area) {
    a.resize(rp.dim, rp.dim);
    for (int i = 0; i < rp.dim; ++i)
      for (int j = 0; j < rp.dim; ++j) a(i, j) = get_f64(f);
  }
  for (auto& a : darea) {
    a.resize(rp.dim, rp.dim);
    for (int i = 0; i < rp.dim; ++i)
      for (int j = 0; j < rp.dim; ++j) a(i, j) = get_f64(f);
  }
  if (!f) throw ConfigError("'" + path + "' is truncated");
  return rp;
}

std::string lyapunov_json(const LyapunovReport& rep) {
  nlohmann::ordered_json j;
  j["exponents"] = rep.exponents;
  j["at_floor"] = rep.at_floor;
  j["running"] = rep.running;
  j["seed"] = rep.seed;
  j["k"] = rep.k;
  j["n_steps"] = rep.n_steps;
  j["N"] = rep.N;
  j["floor"] = rep.floor_value;
  j["converged"] = rep.converged;
  j["norm_note"] = "grid-sup segment norms; estimates, not analytic Hoelder norms";
  return j.dump(2) + "\n";
}

std::string probe_json(const ProbeReport& rep) {
  nlohmann::ordered_json j;
  j["rate_fit"] = rep.rate_fit;
  j["sup_exp_nv"] = rep.sup_exp_nv;
  j["upsilon"] = rep.upsilon;
  j["epsilon"] = rep.epsilon;
  j["log_norms"] = rep.log_norms;
  j["stable_proxy_note"] =
      "stable directions are the orthogonal complement of the pullback unstable basis "
      "in the discretized metric";
  return j.dump(2) + "\n";
}

std::string validate_json(double alpha, double beta, double gamma) {
  std::string reason;
  const bool ok = validate_exponents(alpha, beta, gamma, reason);
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["pass"] = ok;
  j["reason"] = reason;
  return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace rdde
