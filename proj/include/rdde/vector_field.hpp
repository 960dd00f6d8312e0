#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "rdde/types.hpp"

namespace rdde {

/// Diffusion field sigma with its partials (directional form), linear drift
/// B and optional bounded smooth drift f.
///
/// sigma(x, y) is a w x d matrix. The partials are supplied as directional
/// derivatives: sigma_x(x, y, u) = D_x sigma(x,y)[u] and so on; the second
/// order maps are bilinear, sigma_xy(x, y, u, v) differentiating once in x
/// along u and once in y along v.
struct VectorFieldBundle {
  int w = 1;
  int d = 1;
  int smoothness = 3;  // 3, or 4 when B != 0

  std::function<Mat(const Vec&, const Vec&)> sigma;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> sigma_x;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> sigma_y;
  std::function<Mat(const Vec&, const Vec&, const Vec&, const Vec&)> sigma_xx;
  std::function<Mat(const Vec&, const Vec&, const Vec&, const Vec&)> sigma_xy;
  std::function<Mat(const Vec&, const Vec&, const Vec&, const Vec&)> sigma_yy;

  // Linear drift B(x, y) = B1 x + B2 y.
  Mat B1, B2;

  // Optional additional bounded drift with first partials (directional).
  std::function<Vec(const Vec&, const Vec&)> f;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> f_x;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> f_y;

  bool has_drift_B() const { return B1.size() > 0 || B2.size() > 0; }
  bool has_drift_f() const { return static_cast<bool>(f); }

  Vec drift(const Vec& x, const Vec& y) const;
  Vec drift_dx(const Vec& x, const Vec& y, const Vec& u) const;
  Vec drift_dy(const Vec& x, const Vec& y, const Vec& u) const;

  /// Central finite-difference consistency of the supplied partials at
  /// random probe points; returns the worst relative error (step 1e-5).
  double check_partials(std::uint64_t seed, int n_probes = 20) const;
};

/// Field with the drift folded into the diffusion against a time-augmented
/// driver: sigma~(x,y) = [B(x,y)+f(x,y) | sigma(x,y)], noise dim d+1.
VectorFieldBundle augmented_field(const VectorFieldBundle& vf);

/// Built-in registry for the CLI: linear, pure-delay-linear,
/// quadratic-at-zero, sine-product, ou-additive.
VectorFieldBundle make_field(const std::string& name,
                             const std::map<std::string, double>& params);

// Convenience constructors used by the registry and by tests (all w = d = 1).
VectorFieldBundle field_linear(double b, double c);            // sigma = b x, B = c x
VectorFieldBundle field_pure_delay_linear(double a);           // sigma = 0, B = a y
VectorFieldBundle field_quadratic_at_zero(double q, double a); // sigma = q x^2/(1+x^2), B = a y
VectorFieldBundle field_sine_product(double s0, double s1, double s2);
VectorFieldBundle field_ou_additive(double c, double s0, double s1);  // B = -c x, sigma = s0 + s1 sin(y)

}  // namespace rdde
