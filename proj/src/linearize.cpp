#include "rdde/linearize.hpp"

#include <algorithm>
#include <string>
#include <cmath>

#include <Eigen/SVD>

#include "rdde/errors.hpp"

namespace rdde {

Vec SegmentBasis::encode(const DelayedControlledSegment& seg) const {
  if (seg.n_nodes() != n_nodes || seg.rows != w || seg.cols != 1 || seg.base->dim != d) {
    throw GridMismatchError("SegmentBasis::encode: segment shape mismatch");
  }
  Vec out(dim());
  const int per_node = w * (1 + d);
  for (int i = 0; i < n_nodes; ++i) {
    out.segment(i * per_node, w) = seg.m[i];
    out.segment(i * per_node + w, w * d) =
        Eigen::Map<const Vec>(seg.zeta0[i].data(), w * d);
  }
  return out;
}

DelayedControlledSegment SegmentBasis::decode(std::shared_ptr<const DelayedRoughPath> base,
                                              int start_node, const Vec& coords) const {
  if (coords.size() != dim()) throw GridMismatchError("SegmentBasis::decode: wrong length");
  DelayedControlledSegment seg;
  seg.base = std::move(base);
  seg.start_node = start_node;
  seg.rows = w;
  seg.cols = 1;
  seg.m.resize(n_nodes);
  seg.zeta0.resize(n_nodes);
  seg.zeta1.assign(n_nodes, Mat::Zero(w, d));
  const int per_node = w * (1 + d);
  for (int i = 0; i < n_nodes; ++i) {
    seg.m[i] = coords.segment(i * per_node, w);
    seg.zeta0[i] = Eigen::Map<const Mat>(coords.segment(i * per_node + w, w * d).data(), w, d);
  }
  return seg;
}

DelayedControlledSegment derivative_segment(const DelayedControlledSegment& xi,
                                            const DelayedControlledSegment& y,
                                            const DelayedControlledSegment& dir,
                                            const DelayedRoughPath& rp,
                                            const VectorFieldBundle& vf) {
  const int N = rp.delay_steps;
  if (xi.base.get() != &rp || y.base.get() != &rp || dir.base.get() != &rp) {
    throw GridMismatchError("derivative_segment: segments not based on this lift");
  }
  if (xi.n_nodes() != N + 1 || dir.n_nodes() != N + 1 || y.n_nodes() != N + 1) {
    throw GridMismatchError("derivative_segment: segments must span one delay");
  }
  if (dir.start_node != xi.start_node || y.start_node != xi.start_node + N) {
    throw GridMismatchError("derivative_segment: segment windows misaligned");
  }
  const int d = vf.d;
  const int start = y.start_node;

  DelayedControlledSegment out;
  out.base = xi.base;
  out.start_node = start;
  out.rows = vf.w;
  out.cols = 1;
  out.m.resize(N + 1);
  out.zeta0.resize(N + 1);
  out.zeta1.assign(N + 1, Mat::Zero(vf.w, d));

  Vec Z = dir.m[N];
  for (int j = 0; j <= N; ++j) {
    const Vec& x = y.m[j];
    const Vec& xi_j = xi.m[j];
    const Vec& td = dir.m[j];
    const Mat Zp = vf.sigma_x(x, xi_j, Z) + vf.sigma_y(x, xi_j, td);
    out.m[j] = Z;
    out.zeta0[j] = Zp;
    if (j == N) break;

    Vec next = Z;
    // Linearized drift.
    if (vf.B1.size() > 0) next += rp.h * (vf.B1 * Z);
    if (vf.B2.size() > 0) next += rp.h * (vf.B2 * td);
    if (vf.f_x) next += rp.h * vf.f_x(x, xi_j, Z);
    if (vf.f_y) next += rp.h * vf.f_y(x, xi_j, td);
    next += Zp * rp.increment(start + j, start + j + 1);
    const Mat& xx = rp.adj_area(start + j);
    const Mat& xxd = rp.adj_delayed_area(start + j);
    const Mat& yp = y.zeta0[j];      // sigma(y_j, xi_j)
    const Mat& xip = xi.zeta0[j];    // base past Gubinelli coefficient
    const Mat& tdp = dir.zeta0[j];   // direction past Gubinelli coefficient
    for (int k = 0; k < d; ++k) {
      const Mat c0 = vf.sigma_x(x, xi_j, Zp.col(k)) + vf.sigma_xx(x, xi_j, yp.col(k), Z) +
                     vf.sigma_xy(x, xi_j, yp.col(k), td);
      const Mat c1 = vf.sigma_y(x, xi_j, tdp.col(k)) + vf.sigma_xy(x, xi_j, Z, xip.col(k)) +
                     vf.sigma_yy(x, xi_j, xip.col(k), td);
      next += c0 * xx.row(k).transpose() + c1 * xxd.row(k).transpose();
    }
    if (!next.allFinite() || next.lpNorm<Eigen::Infinity>() > 1e12) {
      throw DivergenceError("derivative_segment: blow-up guard tripped at node " +
                                std::to_string(start + j + 1),
                            start + j + 1);
    }
    Z = next;
  }
  return out;
}

Mat cocycle_matrix(const DelayedControlledSegment& xi, const DelayedControlledSegment& y,
                   const DelayedRoughPath& rp, const VectorFieldBundle& vf,
                   const SegmentBasis& basis) {
  const int D = basis.dim();
  Mat out(D, D);
  for (int c = 0; c < D; ++c) {
    const DelayedControlledSegment dir =
        basis.decode(xi.base, xi.start_node, Vec::Unit(D, c));
    out.col(c) = basis.encode(derivative_segment(xi, y, dir, rp, vf));
  }
  return out;
}

BirkhoffReport growth_diagnostics(const std::vector<Mat>& matrices,
                                  const std::vector<double>& proxy_values) {
  BirkhoffReport rep;
  double acc = 0.0;
  for (size_t n = 0; n < matrices.size(); ++n) {
    const double norm =
        Eigen::JacobiSVD<Mat>(matrices[n]).singularValues()(0);
    acc += std::max(0.0, std::log(norm));
    rep.running_log_norm.push_back(acc / static_cast<double>(n + 1));
  }
  for (size_t n = 0; n < proxy_values.size(); ++n) {
    rep.proxy_over_n.push_back(proxy_values[n] / static_cast<double>(n + 1));
  }
  if (!rep.running_log_norm.empty()) {
    const double last = rep.running_log_norm.back();
    const size_t half = rep.running_log_norm.size() / 2;
    for (size_t i = half; i < rep.running_log_norm.size(); ++i) {
      rep.tail_spread = std::max(rep.tail_spread, std::abs(rep.running_log_norm[i] - last));
    }
    rep.converged = rep.tail_spread < 0.05;
  }
  return rep;
}

}  // namespace rdde
