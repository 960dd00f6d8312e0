#pragma once

#include <memory>
#include <vector>

#include "rdde/controlled.hpp"
#include "rdde/solver.hpp"
#include "rdde/vector_field.hpp"

namespace rdde {

/// Finite-dimensional coordinates for one segment: per node the value
/// (w entries) followed by the Gubinelli coefficient (w*d entries),
/// nodes concatenated. Inner product is the h-weighted l2 product.
struct SegmentBasis {
  int n_nodes = 0;  // N + 1
  int w = 0;
  int d = 0;
  double h = 0.0;

  int dim() const { return n_nodes * w * (1 + d); }

  Vec encode(const DelayedControlledSegment& seg) const;
  DelayedControlledSegment decode(std::shared_ptr<const DelayedRoughPath> base, int start_node,
                                  const Vec& coords) const;
  double inner(const Vec& u, const Vec& v) const { return h * u.dot(v); }
};

/// Directional derivative of one semiflow step at the past segment xi in
/// the direction dir (both on [(k-1)r, kr]); y is the solution segment
/// solve_segment(xi) on [kr, (k+1)r]. One-step level-2 scheme for the
/// linearized equation; exactly linear and additive in dir. Output starts
/// at dir's end value and carries Z' = sigma_x(y,xi)[Z] + sigma_y(y,xi)[dir]
/// as its Gubinelli coefficient.
DelayedControlledSegment derivative_segment(const DelayedControlledSegment& xi,
                                            const DelayedControlledSegment& y,
                                            const DelayedControlledSegment& dir,
                                            const DelayedRoughPath& rp,
                                            const VectorFieldBundle& vf);

/// Matrix of the one-segment derivative map in SegmentBasis coordinates,
/// assembled column-by-column through derivative_segment.
Mat cocycle_matrix(const DelayedControlledSegment& xi, const DelayedControlledSegment& y,
                   const DelayedRoughPath& rp, const VectorFieldBundle& vf,
                   const SegmentBasis& basis);

/// Ergodic-average diagnostics for a sequence of one-segment derivative
/// matrices: running (1/n) sum log+ ||psi_k|| (spectral norm) and, when
/// per-segment proxy values are supplied, proxy_n / n. tail_spread is the
/// max deviation of the running average from its final value over the last
/// half of the sequence.
struct BirkhoffReport {
  std::vector<double> running_log_norm;
  std::vector<double> proxy_over_n;
  double tail_spread = 0.0;
  bool converged = false;  // tail_spread < 0.05
};

BirkhoffReport growth_diagnostics(const std::vector<Mat>& matrices,
                                  const std::vector<double>& proxy_values = {});

}  // namespace rdde
