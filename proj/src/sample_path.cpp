#include "rdde/sample_path.hpp"

#include <cmath>
#include <random>

namespace rdde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normals via Box-Muller on explicitly constructed uniforms, so
// that a (seed, grid) pair determines the stream independent of the
// standard library's distribution internals.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(splitmix64(seed)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double rho = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = rho * std::sin(phi);
    have_spare_ = true;
    return rho * std::cos(phi);
  }

 private:
  double uniform() { return (rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

int checked_steps(double length, double step, const char* what) {
  if (step <= 0.0) throw GridMismatchError(std::string(what) + ": step must be positive");
  const double ratio = length / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-12 * std::max(1.0, std::abs(ratio))) {
    throw GridMismatchError(std::string(what) + ": window length " + std::to_string(length) +
                            " is not a multiple of step " + std::to_string(step));
  }
  return static_cast<int>(rounded);
}

int SamplePath::node_of(double t) const {
  const double x = (t - t_start_) / h_f_;
  const double rounded = std::round(x);
  if (std::abs(x - rounded) > 1e-9) {
    throw GridMismatchError("time " + std::to_string(t) + " is not a fine-grid node");
  }
  const int node = static_cast<int>(rounded);
  if (node < 0 || node >= n_nodes()) {
    throw OutOfWindowError("time " + std::to_string(t) + " outside sampled window [" +
                           std::to_string(t_start_) + ", " + std::to_string(t_end_) + "]");
  }
  return node;
}

Vec SamplePath::increment(int i, int j) const {
  Vec out = Vec::Zero(dim_);
  for (int e = i; e < j; ++e) out += incr_[e];
  for (int e = j; e < i; ++e) out -= incr_[e];
  return out;
}

void SamplePath::rebuild_values() {
  const int n = n_increments() + 1;
  values_.assign(n, Vec::Zero(dim_));
  for (int i = 1; i < n; ++i) values_[i] = values_[i - 1] + incr_[i - 1];
  // Rebase at the time-0 node when it exists.
  if (t_start_ <= 1e-12 && t_end_ >= -1e-12) {
    const double x = -t_start_ / h_f_;
    const double rounded = std::round(x);
    if (std::abs(x - rounded) <= 1e-9) {
      const Vec base = values_[static_cast<int>(rounded)];
      for (auto& v : values_) v -= base;
    }
  }
}

SamplePath SamplePath::brownian(int dim, double t_start, double t_end, double h_f,
                                std::uint64_t seed) {
  if (dim <= 0) throw ConfigError("sample_brownian: dim must be positive");
  if (t_end <= t_start) throw GridMismatchError("sample_brownian: empty window");
  const int n = checked_steps(t_end - t_start, h_f, "sample_brownian");

  SamplePath p;
  p.dim_ = dim;
  p.t_start_ = t_start;
  p.t_end_ = t_end;
  p.h_f_ = h_f;
  p.seed_ = seed;
  GaussianStream g(seed);
  const double s = std::sqrt(h_f);
  p.incr_.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec dB(dim);
    for (int k = 0; k < dim; ++k) dB[k] = s * g.next();
    p.incr_[i] = dB;
  }
  p.rebuild_values();
  return p;
}

SamplePath SamplePath::from_function(int dim, double t_start, double t_end, double h_f,
                                     const std::function<Vec(double)>& f) {
  const int n = checked_steps(t_end - t_start, h_f, "from_function");
  SamplePath p;
  p.dim_ = dim;
  p.t_start_ = t_start;
  p.t_end_ = t_end;
  p.h_f_ = h_f;
  p.seed_ = 0;
  p.incr_.resize(n);
  Vec prev = f(t_start);
  for (int i = 0; i < n; ++i) {
    Vec next = f(t_start + (i + 1) * h_f);
    p.incr_[i] = next - prev;
    prev = next;
  }
  p.rebuild_values();
  return p;
}

SamplePath wiener_shift(const SamplePath& path, int n_segments, double r) {
  const int steps_r = checked_steps(r, path.fine_step(), "wiener_shift");
  const double shift = n_segments * r;
  if (n_segments != 0) {
    // The rebase point n*r must be sampled, with one segment of slack so
    // that the shifted path still carries a usable window.
    if (shift < path.t_start() - 1e-12 || shift + r > path.t_end() + 1e-12) {
      throw OutOfWindowError("wiener_shift: shift " + std::to_string(shift) +
                             " exits the sampled window");
    }
  }
  SamplePath out;
  out.dim_ = path.dim_;
  out.h_f_ = path.h_f_;
  out.seed_ = path.seed_;
  out.t_start_ = path.t_start_ - shift;
  out.t_end_ = path.t_end_ - shift;
  out.incr_ = path.incr_;  // shared bit-exactly; only the time labels move
  (void)steps_r;
  out.rebuild_values();
  return out;
}

}  // namespace rdde
