#include "rdde/solver.hpp"

#include <algorithm>
#include <string>
#include <cstdio>
#include <fstream>

#include "rdde/errors.hpp"

namespace rdde {

namespace {

void check_past_segment(const DelayedControlledSegment& xi, const DelayedRoughPath& rp,
                        const VectorFieldBundle& vf) {
  if (xi.base.get() != &rp) {
    throw GridMismatchError("solve_segment: past segment not based on this lift");
  }
  if (xi.n_nodes() != rp.delay_steps + 1) {
    throw GridMismatchError("solve_segment: past segment must span exactly one delay");
  }
  if (xi.cols != 1 || xi.rows != vf.w) {
    throw WrongKindError("solve_segment: past segment has wrong shape");
  }
}

void guard(const Vec& y, int node) {
  if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > 1e12) {
    throw DivergenceError("solve_segment: blow-up guard tripped at node " + std::to_string(node),
                          node);
  }
}

DelayedControlledSegment step_segment(const DelayedControlledSegment& xi,
                                      const DelayedRoughPath& rp, const VectorFieldBundle& vf,
                                      bool direct_drift) {
  const int N = rp.delay_steps;
  const int d = vf.d;
  const int start = xi.start_node + N;
  if (start + N > rp.n_intervals) {
    throw OutOfWindowError("solve_segment: lift window too short for this segment");
  }

  DelayedControlledSegment out;
  out.base = xi.base;
  out.start_node = start;
  out.rows = vf.w;
  out.cols = 1;
  out.m.resize(N + 1);
  out.zeta0.resize(N + 1);
  out.zeta1.assign(N + 1, Mat::Zero(vf.w, rp.dim));

  Vec y = xi.m[N];
  for (int j = 0; j <= N; ++j) {
    const Vec& xi_j = xi.m[j];
    const Mat sig = vf.sigma(y, xi_j);
    out.m[j] = y;
    out.zeta0[j] = sig;
    if (j == N) break;

    Vec next = y;
    if (direct_drift) next += vf.drift(y, xi_j) * rp.h;
    next += sig * rp.increment(start + j, start + j + 1);
    const Mat& xx = rp.adj_area(start + j);
    const Mat& xxd = rp.adj_delayed_area(start + j);
    for (int k = 0; k < d; ++k) {
      next += vf.sigma_x(y, xi_j, sig.col(k)) * xx.row(k).transpose();
      next += vf.sigma_y(y, xi_j, xi.zeta0[j].col(k)) * xxd.row(k).transpose();
    }
    guard(next, start + j + 1);
    y = next;
  }
  return out;
}

}  // namespace

DelayedControlledSegment solve_segment(const DelayedControlledSegment& xi,
                                       const DelayedRoughPath& rp, const VectorFieldBundle& vf,
                                       DriftMode mode) {
  check_past_segment(xi, rp, vf);
  if (mode == DriftMode::Direct) return step_segment(xi, rp, vf, true);
  // Augmented route: same stepping against the time-augmented lift with the
  // drift folded into sigma's zeroth column. The past segment's zeta0 gains
  // a zero time column (its time-derivative coefficient is not stored).
  auto aug = std::make_shared<DelayedRoughPath>(augment_time(rp));
  const VectorFieldBundle avf = augmented_field(vf);
  DelayedControlledSegment axi = xi;
  axi.base = aug;
  for (auto& z : axi.zeta0) {
    Mat za = Mat::Zero(vf.w, rp.dim + 1);
    za.rightCols(rp.dim) = z;
    z = za;
  }
  for (auto& z : axi.zeta1) z = Mat::Zero(vf.w, rp.dim + 1);
  DelayedControlledSegment res = step_segment(axi, *aug, avf, false);
  // Rebase the output on the original lift, stripping the drift column.
  DelayedControlledSegment out;
  out.base = xi.base;
  out.start_node = res.start_node;
  out.rows = res.rows;
  out.cols = 1;
  out.m = res.m;
  out.zeta0.resize(res.n_nodes());
  out.zeta1.assign(res.n_nodes(), Mat::Zero(vf.w, rp.dim));
  for (int i = 0; i < res.n_nodes(); ++i) out.zeta0[i] = res.zeta0[i].rightCols(rp.dim);
  return out;
}

std::vector<DelayedControlledSegment> semiflow(const DelayedControlledSegment& xi,
                                               const DelayedRoughPath& rp,
                                               const VectorFieldBundle& vf, int n,
                                               DriftMode mode) {
  std::vector<DelayedControlledSegment> segs;
  segs.reserve(n + 1);
  segs.push_back(xi);
  for (int k = 0; k < n; ++k) segs.push_back(solve_segment(segs.back(), rp, vf, mode));
  return segs;
}

std::vector<SegmentDiagnostic> solution_norm_diagnostic(
    const std::vector<DelayedControlledSegment>& segments, const DelayedRoughPath& rp,
    double beta) {
  std::vector<SegmentDiagnostic> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    SegmentDiagnostic diag;
    for (const auto& v : seg.m) diag.sup = std::max(diag.sup, v.lpNorm<Eigen::Infinity>());
    diag.norm = seg.is_plain() ? norm_controlled(seg, beta) : norm_delayed(seg, beta);
    const int a = std::max(seg.start_node, 0);
    const int b = std::min(seg.start_node + seg.n_nodes() - 1, rp.n_intervals);
    diag.A = 1.0 + (b > a ? hoelder_norm(rp, a, b) : 0.0);
    out.push_back(diag);
  }
  return out;
}

void write_trajectory_csv(const std::vector<DelayedControlledSegment>& segments,
                          const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  if (segments.empty()) return;
  const int w = segments[0].rows;
  const int d = segments[0].base->dim;
  f << "segment,t";
  for (int i = 0; i < w; ++i) f << ",y" << i;
  for (int i = 0; i < w; ++i)
    for (int k = 0; k < d; ++k) f << ",yprime_" << i << "_" << k;
  f << "\n";
  char buf[32];
  for (size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    for (int j = 0; j < seg.n_nodes(); ++j) {
      f << s;
      std::snprintf(buf, sizeof buf, ",%.17g", seg.base->time_of(seg.start_node + j));
      f << buf;
      for (int i = 0; i < w; ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", seg.m[j][i]);
        f << buf;
      }
      for (int i = 0; i < w; ++i)
        for (int k = 0; k < d; ++k) {
          std::snprintf(buf, sizeof buf, ",%.17g", seg.zeta0[j](i, k));
          f << buf;
        }
      f << "\n";
    }
  }
}

}  // namespace rdde
