#include "rdde/controlled.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rdde/errors.hpp"
#include "rdde/vector_field.hpp"

namespace rdde {

Mat DelayedControlledSegment::value_matrix(int node) const {
  return Eigen::Map<const Mat>(m[node].data(), rows, cols);
}

bool DelayedControlledSegment::is_plain() const {
  for (const auto& z : zeta1) {
    if (z.size() > 0 && !z.isZero(0.0)) return false;
  }
  return true;
}

DelayedControlledSegment DelayedControlledSegment::zero(
    std::shared_ptr<const DelayedRoughPath> base, int start_node, int n_nodes, int rows) {
  DelayedControlledSegment seg;
  seg.base = std::move(base);
  seg.start_node = start_node;
  seg.rows = rows;
  seg.cols = 1;
  seg.m.assign(n_nodes, Vec::Zero(rows));
  seg.zeta0.assign(n_nodes, Mat::Zero(rows, seg.base->dim));
  seg.zeta1.assign(n_nodes, Mat::Zero(rows, seg.base->dim));
  return seg;
}

DelayedControlledSegment DelayedControlledSegment::constant(
    std::shared_ptr<const DelayedRoughPath> base, int start_node, int n_nodes,
    const Vec& value) {
  auto seg = zero(std::move(base), start_node, n_nodes, static_cast<int>(value.size()));
  for (auto& v : seg.m) v = value;
  return seg;
}

namespace {

Vec remainder(const DelayedControlledSegment& seg, int i, int j) {
  const int a = seg.start_node;
  Vec out = seg.m[j] - seg.m[i];
  out -= seg.zeta0[i] * seg.base->increment(a + i, a + j);
  // The delayed increment reaches one delay further back than the segment
  // itself; skip it for plain segments so pre-window segments stay in range.
  if (!seg.is_plain()) {
    const int r = seg.base->delay_steps;
    out -= seg.zeta1[i] * seg.base->increment(a + i - r, a + j - r);
  }
  return out;
}

double holder_sup(const DelayedControlledSegment& seg, double expo,
                  const std::function<double(int, int)>& incr_norm) {
  const int n = seg.n_nodes();
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dt = (j - i) * seg.base->h;
      sup = std::max(sup, incr_norm(i, j) / std::pow(dt, expo));
    }
  }
  return sup;
}

double zeta_holder(const DelayedControlledSegment& seg, const std::vector<Mat>& z, double beta) {
  return holder_sup(seg, beta, [&z](int i, int j) { return (z[j] - z[i]).norm(); });
}

}  // namespace

double remainder_sup(const DelayedControlledSegment& seg, double theta) {
  return holder_sup(seg, theta,
                    [&seg](int i, int j) { return remainder(seg, i, j).norm(); });
}

double norm_controlled(const DelayedControlledSegment& seg, double beta) {
  if (!seg.is_plain()) {
    throw WrongKindError("norm_controlled: path carries a nonzero delayed coefficient");
  }
  return seg.m[0].norm() + seg.zeta0[0].norm() + zeta_holder(seg, seg.zeta0, beta) +
         remainder_sup(seg, 2 * beta);
}

double norm_delayed(const DelayedControlledSegment& seg, double beta) {
  return seg.m[0].norm() + seg.zeta0[0].norm() + seg.zeta1[0].norm() +
         zeta_holder(seg, seg.zeta0, beta) + zeta_holder(seg, seg.zeta1, beta) +
         remainder_sup(seg, 2 * beta);
}

double norm_delayed_general(const DelayedControlledSegment& seg, double alpha, double beta,
                            double theta) {
  const double m_holder =
      holder_sup(seg, alpha, [&seg](int i, int j) { return (seg.m[j] - seg.m[i]).norm(); });
  return seg.m[0].norm() + seg.zeta0[0].norm() + seg.zeta1[0].norm() + m_holder +
         zeta_holder(seg, seg.zeta0, beta) + zeta_holder(seg, seg.zeta1, beta) +
         remainder_sup(seg, theta);
}

DelayedControlledSegment compose_sigma(const DelayedControlledSegment& y,
                                       const DelayedControlledSegment& past,
                                       const VectorFieldBundle& vf) {
  if (y.base != past.base) {
    throw GridMismatchError("compose_sigma: segments live on different lifts");
  }
  if (y.n_nodes() != past.n_nodes()) {
    throw GridMismatchError("compose_sigma: segment lengths differ");
  }
  if (y.start_node != past.start_node + y.base->delay_steps) {
    throw GridMismatchError("compose_sigma: past segment is not one delay behind");
  }
  if (y.cols != 1 || past.cols != 1 || y.rows != vf.w || past.rows != vf.w) {
    throw WrongKindError("compose_sigma: expects vector-valued segments of field dimension");
  }
  if (!past.is_plain()) {
    // past's zeta1 would pair with a doubly-delayed increment, which the
    // two-level structure cannot carry.
    throw WrongKindError("compose_sigma: past segment must be plain");
  }

  const int d = y.base->dim;
  DelayedControlledSegment out;
  out.base = y.base;
  out.start_node = y.start_node;
  out.rows = vf.w;
  out.cols = d;
  const int n = y.n_nodes();
  out.m.resize(n);
  out.zeta0.resize(n);
  out.zeta1.resize(n);
  for (int s = 0; s < n; ++s) {
    const Vec& x = y.m[s];
    const Vec& xi = past.m[s];
    const Mat sig = vf.sigma(x, xi);
    out.m[s] = Eigen::Map<const Vec>(sig.data(), sig.size());
    Mat z0(vf.w * d, d), z1(vf.w * d, d);
    for (int k = 0; k < d; ++k) {
      // Chain rule per noise direction. past's own zeta0 pairs with the
      // delayed increment when read from the current segment, so it feeds
      // the composed zeta1, together with y's own delayed coefficient.
      const Mat dk0 = vf.sigma_x(x, xi, y.zeta0[s].col(k));
      z0.col(k) = Eigen::Map<const Vec>(dk0.data(), dk0.size());
      const Mat dk1 = vf.sigma_x(x, xi, y.zeta1[s].col(k)) +
                      vf.sigma_y(x, xi, past.zeta0[s].col(k));
      z1.col(k) = Eigen::Map<const Vec>(dk1.data(), dk1.size());
    }
    out.zeta0[s] = z0;
    out.zeta1[s] = z1;
  }
  return out;
}

void write_segment_csv(const DelayedControlledSegment& seg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  const int d = seg.base->dim;
  f << "t";
  for (int i = 0; i < seg.vdim(); ++i) f << ",m" << i;
  for (int i = 0; i < seg.vdim(); ++i)
    for (int k = 0; k < d; ++k) f << ",zeta0_" << i << "_" << k;
  for (int i = 0; i < seg.vdim(); ++i)
    for (int k = 0; k < d; ++k) f << ",zeta1_" << i << "_" << k;
  f << "\n";
  char buf[32];
  auto put = [&f, &buf](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    f << buf;
  };
  for (int s = 0; s < seg.n_nodes(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", seg.base->time_of(seg.start_node + s));
    f << buf;
    for (int i = 0; i < seg.vdim(); ++i) put(seg.m[s][i]);
    for (int i = 0; i < seg.vdim(); ++i)
      for (int k = 0; k < d; ++k) put(seg.zeta0[s](i, k));
    for (int i = 0; i < seg.vdim(); ++i)
      for (int k = 0; k < d; ++k) put(seg.zeta1[s](i, k));
    f << "\n";
  }
}

}  // namespace rdde
