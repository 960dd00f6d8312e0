#include "rdde/integral.hpp"

#include <cmath>
#include <limits>

#include "rdde/errors.hpp"

namespace rdde {

namespace {

void check_setup(const DelayedControlledSegment& integrand, const DelayedRoughPath& rp, int a,
                 int b, double beta, double theta) {
  if (integrand.base.get() != &rp) {
    throw GridMismatchError("integral: integrand is not based on this rough path");
  }
  if (!(theta + rp.gamma > 1.0 && beta + 2.0 * rp.gamma > 1.0)) {
    throw ConfigError("integral: exponents violate theta+gamma>1, beta+2gamma>1");
  }
  const int lo = integrand.start_node;
  const int hi = integrand.start_node + integrand.n_nodes() - 1;
  if (a < lo || b > hi || b < a) throw OutOfWindowError("integral: [a,b] outside segment");
  if (a < 0 || b > rp.n_intervals) throw OutOfWindowError("integral: [a,b] outside lift window");
  if (integrand.cols != rp.dim && integrand.cols != 1) {
    throw WrongKindError("integral: integrand cols must be 1 or the noise dimension");
  }
}

/// Germ over nodes [i, j): m_i X_{i,j} + zeta0_i XX_{i,j} + zeta1_i XX(-r)_{i,j},
/// flattened to the output coordinate vector.
Vec germ(const DelayedControlledSegment& g, const DelayedRoughPath& rp, int i, int j,
         bool contracted) {
  const int d = rp.dim;
  const int w = g.rows;
  const int local = i - g.start_node;
  const Vec dx = rp.increment(i, j);
  const Mat xx = rp.levy_area(i, j);
  const Mat xxd = rp.delayed_levy_area(i, j);
  if (contracted) {
    Vec out = g.value_matrix(local) * dx;
    for (int k = 0; k < d; ++k) {
      const auto z0k = Eigen::Map<const Mat>(g.zeta0[local].col(k).data(), w, d);
      const auto z1k = Eigen::Map<const Mat>(g.zeta1[local].col(k).data(), w, d);
      out += z0k * xx.row(k).transpose() + z1k * xxd.row(k).transpose();
    }
    return out;
  }
  Mat out = g.m[local] * dx.transpose() + g.zeta0[local] * xx + g.zeta1[local] * xxd;
  return Eigen::Map<const Vec>(out.data(), out.size());
}

}  // namespace

DelayedControlledSegment delayed_rough_integral(const DelayedControlledSegment& integrand,
                                                const DelayedRoughPath& rp, int a, int b,
                                                double beta, double theta) {
  check_setup(integrand, rp, a, b, beta, theta);
  const int d = rp.dim;
  const bool contracted = integrand.cols == d;

  DelayedControlledSegment out;
  out.base = integrand.base;
  out.start_node = a;
  out.rows = integrand.rows;
  out.cols = contracted ? 1 : d;
  const int n = b - a + 1;
  out.m.resize(n);
  out.zeta0.resize(n);
  out.zeta1.assign(n, Mat::Zero(out.vdim(), d));

  Vec acc = Vec::Zero(out.vdim());
  for (int k = 0; k < n; ++k) {
    out.m[k] = acc;
    const int local = a - integrand.start_node + k;
    if (contracted) {
      out.zeta0[k] = integrand.value_matrix(local);
    } else {
      // d(int m (x) dX)[(p,i)] / dX_k = m[p] delta_{ik}.
      Mat z = Mat::Zero(out.vdim(), d);
      for (int i = 0; i < d; ++i) z.col(i).segment(i * integrand.rows, integrand.rows) =
          integrand.m[local];
      out.zeta0[k] = z;
    }
    if (k + 1 < n) acc += germ(integrand, rp, a + k, a + k + 1, contracted);
  }
  return out;
}

SewingReport sewing_defect(const DelayedControlledSegment& integrand, const DelayedRoughPath& rp,
                           int a, int b, int levels) {
  check_setup(integrand, rp, a, b, 0.49, 0.98);
  const bool contracted = integrand.cols == rp.dim;
  if (levels < 1) throw ConfigError("sewing_defect: need at least one level");
  if ((b - a) % (1 << (levels - 1)) != 0) {
    throw ConfigError("sewing_defect: b-a must be divisible by 2^(levels-1)");
  }

  const int out_dim = contracted ? integrand.rows : integrand.rows * rp.dim;
  auto sum_at = [&](int stride) {
    Vec acc = Vec::Zero(out_dim);
    for (int j = a; j < b; j += stride) acc += germ(integrand, rp, j, j + stride, contracted);
    return acc;
  };

  SewingReport rep;
  const Vec finest = sum_at(1);
  std::vector<double> lx, ly;
  for (int l = 0; l < levels; ++l) {
    const int stride = 1 << l;
    rep.strides.push_back(stride);
    const double defect = (sum_at(stride) - finest).norm();
    rep.defects.push_back(defect);
    if (l > 0 && defect > 0) {
      lx.push_back(std::log(stride * rp.h));
      ly.push_back(std::log(defect));
    }
  }
  if (lx.size() < 2) {
    rep.fitted_rate = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
  mx /= lx.size();
  my /= ly.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.fitted_rate = num / den;
  return rep;
}

}  // namespace rdde
