#include "rdde/vector_field.hpp"

#include <cmath>
#include <random>

#include "rdde/errors.hpp"

namespace rdde {

Vec VectorFieldBundle::drift(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(w);
  if (B1.size() > 0) out += B1 * x;
  if (B2.size() > 0) out += B2 * y;
  if (f) out += f(x, y);
  return out;
}

Vec VectorFieldBundle::drift_dx(const Vec& x, const Vec& y, const Vec& u) const {
  Vec out = Vec::Zero(w);
  if (B1.size() > 0) out += B1 * u;
  if (f_x) out += f_x(x, y, u);
  return out;
}

Vec VectorFieldBundle::drift_dy(const Vec& x, const Vec& y, const Vec& u) const {
  Vec out = Vec::Zero(w);
  if (B2.size() > 0) out += B2 * u;
  if (f_y) out += f_y(x, y, u);
  return out;
}

double VectorFieldBundle::check_partials(std::uint64_t seed, int n_probes) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double eps = 1e-5;
  double worst = 0.0;
  auto rel = [](const Mat& got, const Mat& want) {
    const double scale = std::max(1.0, want.norm());
    return (got - want).norm() / scale;
  };
  for (int p = 0; p < n_probes; ++p) {
    Vec x(w), y(w), u(w), v(w);
    for (int i = 0; i < w; ++i) {
      x[i] = unif(rng);
      y[i] = unif(rng);
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    const Mat fd_x = (sigma(x + eps * u, y) - sigma(x - eps * u, y)) / (2 * eps);
    const Mat fd_y = (sigma(x, y + eps * u) - sigma(x, y - eps * u)) / (2 * eps);
    worst = std::max(worst, rel(sigma_x(x, y, u), fd_x));
    worst = std::max(worst, rel(sigma_y(x, y, u), fd_y));
    if (sigma_xx) {
      const Mat fd_xx = (sigma_x(x + eps * v, y, u) - sigma_x(x - eps * v, y, u)) / (2 * eps);
      worst = std::max(worst, rel(sigma_xx(x, y, u, v), fd_xx));
      const Mat fd_xy = (sigma_x(x, y + eps * v, u) - sigma_x(x, y - eps * v, u)) / (2 * eps);
      worst = std::max(worst, rel(sigma_xy(x, y, u, v), fd_xy));
      const Mat fd_yy = (sigma_y(x, y + eps * v, u) - sigma_y(x, y - eps * v, u)) / (2 * eps);
      worst = std::max(worst, rel(sigma_yy(x, y, u, v), fd_yy));
    }
  }
  return worst;
}

VectorFieldBundle augmented_field(const VectorFieldBundle& vf) {
  VectorFieldBundle out;
  out.w = vf.w;
  out.d = vf.d + 1;
  out.smoothness = vf.smoothness;
  const int w = vf.w, d = vf.d;
  auto glue = [w, d](const Vec& col0, const Mat& rest) {
    Mat m(w, d + 1);
    m.col(0) = col0;
    m.rightCols(d) = rest;
    return m;
  };
  out.sigma = [vf, glue](const Vec& x, const Vec& y) { return glue(vf.drift(x, y), vf.sigma(x, y)); };
  out.sigma_x = [vf, glue](const Vec& x, const Vec& y, const Vec& u) {
    return glue(vf.drift_dx(x, y, u), vf.sigma_x(x, y, u));
  };
  out.sigma_y = [vf, glue](const Vec& x, const Vec& y, const Vec& u) {
    return glue(vf.drift_dy(x, y, u), vf.sigma_y(x, y, u));
  };
  // B is linear and f is only carried to first order, so the drift column
  // of the second partials is zero up to f's second derivatives, which the
  // one-step scheme never reads.
  out.sigma_xx = [vf, glue, w](const Vec& x, const Vec& y, const Vec& u, const Vec& v) {
    return glue(Vec::Zero(w), vf.sigma_xx(x, y, u, v));
  };
  out.sigma_xy = [vf, glue, w](const Vec& x, const Vec& y, const Vec& u, const Vec& v) {
    return glue(Vec::Zero(w), vf.sigma_xy(x, y, u, v));
  };
  out.sigma_yy = [vf, glue, w](const Vec& x, const Vec& y, const Vec& u, const Vec& v) {
    return glue(Vec::Zero(w), vf.sigma_yy(x, y, u, v));
  };
  return out;
}

namespace {

using Fn1 = std::function<double(double, double)>;

/// Scalar helper: builds a w = d = 1 bundle from sigma and its partials.
VectorFieldBundle scalar_field(Fn1 s, Fn1 sx, Fn1 sy, Fn1 sxx, Fn1 sxy, Fn1 syy) {
  VectorFieldBundle vf;
  vf.w = vf.d = 1;
  auto lift0 = [](Fn1 g) {
    return [g](const Vec& x, const Vec& y) { return Mat::Constant(1, 1, g(x[0], y[0])); };
  };
  auto lift1 = [](Fn1 g) {
    return [g](const Vec& x, const Vec& y, const Vec& u) {
      return Mat::Constant(1, 1, g(x[0], y[0]) * u[0]);
    };
  };
  auto lift2 = [](Fn1 g) {
    return [g](const Vec& x, const Vec& y, const Vec& u, const Vec& v) {
      return Mat::Constant(1, 1, g(x[0], y[0]) * u[0] * v[0]);
    };
  };
  vf.sigma = lift0(std::move(s));
  vf.sigma_x = lift1(std::move(sx));
  vf.sigma_y = lift1(std::move(sy));
  vf.sigma_xx = lift2(std::move(sxx));
  vf.sigma_xy = lift2(std::move(sxy));
  vf.sigma_yy = lift2(std::move(syy));
  return vf;
}

Fn1 zero_fn() {
  return [](double, double) { return 0.0; };
}

}  // namespace

VectorFieldBundle field_linear(double b, double c) {
  auto vf = scalar_field([b](double x, double) { return b * x; },
                         [b](double, double) { return b; }, zero_fn(), zero_fn(), zero_fn(),
                         zero_fn());
  vf.B1 = Mat::Constant(1, 1, c);
  vf.smoothness = c != 0.0 ? 4 : 3;
  return vf;
}

VectorFieldBundle field_pure_delay_linear(double a) {
  auto vf = scalar_field(zero_fn(), zero_fn(), zero_fn(), zero_fn(), zero_fn(), zero_fn());
  vf.B2 = Mat::Constant(1, 1, a);
  vf.smoothness = 4;
  return vf;
}

VectorFieldBundle field_quadratic_at_zero(double q, double a) {
  // sigma(x, y) = q x^2 / (1 + x^2): bounded, flat at the origin.
  auto s = [q](double x, double) { return q * x * x / (1 + x * x); };
  auto sx = [q](double x, double) {
    const double z = 1 + x * x;
    return q * 2 * x / (z * z);
  };
  auto sxx = [q](double x, double) {
    const double z = 1 + x * x;
    return q * (2 - 6 * x * x) / (z * z * z);
  };
  auto vf = scalar_field(s, sx, zero_fn(), sxx, zero_fn(), zero_fn());
  vf.B2 = Mat::Constant(1, 1, a);
  vf.smoothness = 4;
  return vf;
}

VectorFieldBundle field_sine_product(double s0, double s1, double s2) {
  auto s = [=](double x, double y) { return s0 * std::sin(x) + s1 * std::sin(y) + s2 * std::sin(x) * std::sin(y); };
  auto sx = [=](double x, double y) { return s0 * std::cos(x) + s2 * std::cos(x) * std::sin(y); };
  auto sy = [=](double x, double y) { return s1 * std::cos(y) + s2 * std::sin(x) * std::cos(y); };
  auto sxx = [=](double x, double y) { return -s0 * std::sin(x) - s2 * std::sin(x) * std::sin(y); };
  auto sxy = [=](double x, double y) { return s2 * std::cos(x) * std::cos(y); };
  auto syy = [=](double x, double y) { return -s1 * std::sin(y) - s2 * std::sin(x) * std::sin(y); };
  return scalar_field(s, sx, sy, sxx, sxy, syy);
}

VectorFieldBundle field_ou_additive(double c, double s0, double s1) {
  auto s = [=](double, double y) { return s0 + s1 * std::sin(y); };
  auto sy = [=](double, double y) { return s1 * std::cos(y); };
  auto syy = [=](double, double y) { return -s1 * std::sin(y); };
  auto vf = scalar_field(s, zero_fn(), sy, zero_fn(), zero_fn(), syy);
  vf.B1 = Mat::Constant(1, 1, -c);
  vf.smoothness = 4;
  return vf;
}

VectorFieldBundle make_field(const std::string& name, const std::map<std::string, double>& p) {
  auto get = [&p](const std::string& key, double def) {
    auto it = p.find(key);
    return it == p.end() ? def : it->second;
  };
  if (name == "linear") return field_linear(get("b", 1.0), get("c", 0.0));
  if (name == "pure-delay-linear") return field_pure_delay_linear(get("a", -0.3));
  if (name == "quadratic-at-zero") return field_quadratic_at_zero(get("q", 1.0), get("a", -0.3));
  if (name == "sine-product") return field_sine_product(get("s0", 0.3), get("s1", 0.2), get("s2", 0.1));
  if (name == "ou-additive") return field_ou_additive(get("c", 1.0), get("s0", 1.0), get("s1", 0.0));
  throw ConfigError("unknown vector field '" + name + "'");
}

}  // namespace rdde
