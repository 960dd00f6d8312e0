#include "rdde/rough_path.hpp"

#include <cmath>
#include <string>

#include "rdde/errors.hpp"

namespace rdde {

int DelayedRoughPath::node_of(double t) const {
  const double x = (t - t0) / h;
  const double rounded = std::round(x);
  if (std::abs(x - rounded) > 1e-9) {
    throw GridMismatchError("time " + std::to_string(t) + " is not a coarse-grid node");
  }
  const int node = static_cast<int>(rounded);
  if (node < -delay_steps || node > n_intervals) {
    throw OutOfWindowError("node " + std::to_string(node) + " outside rough path grid");
  }
  return node;
}

Vec DelayedRoughPath::increment(int i, int j) const {
  Vec out = Vec::Zero(dim);
  for (int e = i; e < j; ++e) out += incr_[e + delay_steps];
  for (int e = j; e < i; ++e) out -= incr_[e + delay_steps];
  return out;
}

Mat DelayedRoughPath::levy_area(int i, int j) const {
  // Chen: XX_{i,k+1} = XX_{i,k} + XX_k + X_{i,k} (x) X_k.
  Mat a = Mat::Zero(dim, dim);
  Vec x = Vec::Zero(dim);
  for (int k = i; k < j; ++k) {
    const Vec& dx = incr_[k + delay_steps];
    a += area_[k] + x * dx.transpose();
    x += dx;
  }
  return a;
}

Mat DelayedRoughPath::delayed_levy_area(int i, int j) const {
  // Delayed Chen: the accumulated first factor runs r behind.
  Mat a = Mat::Zero(dim, dim);
  Vec xd = Vec::Zero(dim);
  for (int k = i; k < j; ++k) {
    const Vec& dx = incr_[k + delay_steps];
    a += darea_[k] + xd * dx.transpose();
    xd += incr_[k];  // X_{k-r, k+1-r} lives at extended index k
  }
  return a;
}

namespace {

DelayedRoughPath lift_common(const SamplePath& path, double h, double r, double gamma,
                             bool exact_scalar_area) {
  const int refine = checked_steps(h, path.fine_step(), "lift: coarse step");
  const int delay_steps = checked_steps(r, h, "lift: delay");
  const int fine_per_r = refine * delay_steps;
  const int total_coarse = checked_steps(path.t_end() - path.t_start(), h, "lift: window");
  if (total_coarse <= delay_steps) {
    throw GridMismatchError("lift: window shorter than one delay");
  }
  if (exact_scalar_area && path.dim() != 1) {
    throw ConfigError("lift: exact_scalar_area requires dim = 1");
  }

  DelayedRoughPath rp;
  rp.dim = path.dim();
  rp.h = h;
  rp.t0 = path.t_start() + r;
  rp.n_intervals = total_coarse - delay_steps;
  rp.delay_steps = delay_steps;
  rp.gamma = gamma;
  rp.convention = Convention::Ito;
  rp.fine = std::make_shared<SamplePath>(path);

  auto& incr = rp.raw_increments();
  auto& area = rp.raw_areas();
  auto& darea = rp.raw_delayed_areas();
  incr.resize(total_coarse);
  area.resize(rp.n_intervals);
  darea.resize(rp.n_intervals);

  for (int e = 0; e < total_coarse; ++e) {
    Vec dx = Vec::Zero(rp.dim);
    for (int u = 0; u < refine; ++u) dx += path.increment_at(e * refine + u);
    incr[e] = dx;
  }

  for (int j = 0; j < rp.n_intervals; ++j) {
    const int f0 = (j + delay_steps) * refine;  // fine interval at t_j
    Mat a = Mat::Zero(rp.dim, rp.dim);
    Mat ad = Mat::Zero(rp.dim, rp.dim);
    Vec x = Vec::Zero(rp.dim);
    Vec xd = Vec::Zero(rp.dim);
    for (int u = 0; u < refine; ++u) {
      const Vec& dB = path.increment_at(f0 + u);
      a += x * dB.transpose();
      ad += xd * dB.transpose();
      x += dB;
      xd += path.increment_at(f0 + u - fine_per_r);
    }
    if (exact_scalar_area) {
      a(0, 0) = 0.5 * (incr[j + delay_steps][0] * incr[j + delay_steps][0] - h);
    }
    area[j] = a;
    darea[j] = ad;
  }
  return rp;
}

}  // namespace

DelayedRoughPath lift_ito(const SamplePath& path, double h, double r, double gamma,
                          bool exact_scalar_area) {
  return lift_common(path, h, r, gamma, exact_scalar_area);
}

DelayedRoughPath lift_stratonovich(const SamplePath& path, double h, double r, double gamma,
                                   bool exact_scalar_area) {
  DelayedRoughPath rp = lift_common(path, h, r, gamma, exact_scalar_area);
  const Mat corr = 0.5 * rp.h * Mat::Identity(rp.dim, rp.dim);
  for (auto& a : rp.raw_areas()) a += corr;
  rp.convention = Convention::Stratonovich;
  return rp;
}

double HoelderComponents::total() const {
  return path + path_delayed + std::sqrt(area) + std::sqrt(delayed_area);
}

HoelderComponents hoelder_components(const DelayedRoughPath& rp, int a, int b) {
  HoelderComponents out;
  if (b <= a) return out;
  if (a < 0 || b > rp.n_intervals) throw OutOfWindowError("hoelder_components: [a,b] off grid");
  const double g = rp.gamma;
  for (int i = a; i < b; ++i) {
    Vec x = Vec::Zero(rp.dim);
    Vec xd = Vec::Zero(rp.dim);
    Mat ar = Mat::Zero(rp.dim, rp.dim);
    Mat ard = Mat::Zero(rp.dim, rp.dim);
    for (int j = i; j < b; ++j) {
      const Vec& dx = rp.adj_increment(j);
      ar += rp.adj_area(j) + x * dx.transpose();
      ard += rp.adj_delayed_area(j) + xd * dx.transpose();
      x += dx;
      xd += rp.increment(j - rp.delay_steps, j + 1 - rp.delay_steps);
      const double dt = (j + 1 - i) * rp.h;
      out.path = std::max(out.path, x.norm() / std::pow(dt, g));
      out.path_delayed = std::max(out.path_delayed, xd.norm() / std::pow(dt, g));
      out.area = std::max(out.area, ar.norm() / std::pow(dt, 2 * g));
      out.delayed_area = std::max(out.delayed_area, ard.norm() / std::pow(dt, 2 * g));
    }
  }
  return out;
}

double hoelder_norm(const DelayedRoughPath& rp, int a, int b) {
  return hoelder_components(rp, a, b).total();
}

DelayedRoughPath augment_time(const DelayedRoughPath& rp) {
  if (!rp.fine) throw ConfigError("augment_time: lift carries no fine sample");
  const SamplePath& path = *rp.fine;
  const int refine = checked_steps(rp.h, path.fine_step(), "augment_time");
  const int d = rp.dim;
  const double hf = path.fine_step();

  DelayedRoughPath out;
  out.dim = d + 1;
  out.t0 = rp.t0;
  out.h = rp.h;
  out.n_intervals = rp.n_intervals;
  out.delay_steps = rp.delay_steps;
  out.gamma = rp.gamma;
  out.convention = rp.convention;
  out.fine = rp.fine;

  auto& incr = out.raw_increments();
  auto& area = out.raw_areas();
  auto& darea = out.raw_delayed_areas();
  const int total = rp.n_intervals + rp.delay_steps;
  incr.resize(total);
  area.resize(rp.n_intervals);
  darea.resize(rp.n_intervals);

  for (int e = 0; e < total; ++e) {
    Vec v(d + 1);
    v[0] = rp.h;
    v.tail(d) = rp.raw_increments()[e];
    incr[e] = v;
  }

  const int fine_per_r = refine * rp.delay_steps;
  for (int j = 0; j < rp.n_intervals; ++j) {
    const int f0 = (j + rp.delay_steps) * refine;
    Mat a = Mat::Zero(d + 1, d + 1);
    Mat ad = Mat::Zero(d + 1, d + 1);
    a.bottomRightCorner(d, d) = rp.adj_area(j);
    ad.bottomRightCorner(d, d) = rp.adj_delayed_area(j);
    a(0, 0) = 0.5 * rp.h * rp.h;
    ad(0, 0) = 0.5 * rp.h * rp.h;
    // Cross areas from fine left sums:
    //   int (tau - s) dX   (row 0: time integrand against dX)
    //   int X_{s,.} dtau   (column 0: path integrand against dtau)
    Vec x = Vec::Zero(d);
    Vec xd = Vec::Zero(d);
    for (int u = 0; u < refine; ++u) {
      const Vec& dB = path.increment_at(f0 + u);
      a.row(0).tail(d) += (u * hf) * dB.transpose();
      a.col(0).tail(d) += hf * x;
      x += dB;
      // Delayed: the time component shifted by r has the same increments,
      // so int (tau - r - (s - r)) dX equals the plain cross area, while
      // the delayed path integrand runs r behind.
      ad.col(0).tail(d) += hf * xd;
      xd += path.increment_at(f0 + u - fine_per_r);
    }
    ad.row(0).tail(d) = a.row(0).tail(d);
    area[j] = a;
    darea[j] = ad;
  }
  return out;
}

bool validate_exponents(double alpha, double beta, double gamma, std::string& reason) {
  if (!(1.0 / 3.0 < alpha && alpha < beta && beta < gamma && gamma < 0.5)) {
    reason = "requires 1/3 < alpha < beta < gamma < 1/2";
    return false;
  }
  const double lhs = (1.0 - alpha) * (0.5 - beta) / ((1.0 - beta) * (1.0 - 2.0 * alpha));
  if (!(lhs < beta - alpha)) {
    reason = "(1-a)(1/2-b)/((1-b)(1-2a)) = " + std::to_string(lhs) +
             " not below b - a = " + std::to_string(beta - alpha);
    return false;
  }
  reason.clear();
  return true;
}

bool validate_exponents(double alpha, double beta, double gamma) {
  std::string reason;
  return validate_exponents(alpha, beta, gamma, reason);
}

}  // namespace rdde
