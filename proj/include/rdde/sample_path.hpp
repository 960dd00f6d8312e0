#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rdde/errors.hpp"
#include "rdde/types.hpp"

namespace rdde {

/// Fine-grid sample of the driving noise over a time window.
///
/// The primitive data are the fine-grid increments; node values are prefix
/// sums rebased so that the value at time 0 vanishes whenever 0 lies in the
/// window. Storing increments keeps window slicing (the Wiener shift) an
/// exact operation: a shifted path shares the increment doubles of its
/// parent, so any quantity computed from increments is bit-identical
/// between the two.
class SamplePath {
 public:
  SamplePath() = default;

  int dim() const { return dim_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double fine_step() const { return h_f_; }
  std::uint64_t seed() const { return seed_; }

  int n_nodes() const { return static_cast<int>(values_.size()); }
  int n_increments() const { return static_cast<int>(incr_.size()); }

  double time_of(int node) const { return t_start_ + node * h_f_; }

  /// Node index of a time on the fine grid; throws GridMismatchError when
  /// the time is off-grid, OutOfWindowError when outside the window.
  int node_of(double t) const;

  const Vec& value(int node) const { return values_[node]; }
  const Vec& increment_at(int interval) const { return incr_[interval]; }

  /// X_{t_i, t_j} summed left to right over the stored fine increments.
  Vec increment(int i, int j) const;

  /// Seeded Brownian sample: i.i.d. Gaussian increments of covariance h_f I.
  static SamplePath brownian(int dim, double t_start, double t_end, double h_f,
                             std::uint64_t seed);

  /// Deterministic injection of a smooth path, sampled exactly at the nodes.
  static SamplePath from_function(int dim, double t_start, double t_end, double h_f,
                                  const std::function<Vec(double)>& f);

 private:
  friend SamplePath wiener_shift(const SamplePath&, int, double);

  void rebuild_values();

  int dim_ = 0;
  double t_start_ = 0.0, t_end_ = 0.0, h_f_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<Vec> incr_;
  std::vector<Vec> values_;
};

/// Realization of the shift theta_{n r} on sampled data: the window is
/// re-based so that new time t reads the old path at t + n*r, and values
/// are re-based to vanish at the new time origin. Increments are shared
/// bit-exactly with the input. n may be negative (pullback).
SamplePath wiener_shift(const SamplePath& path, int n_segments, double r);

/// Number of grid steps in a window, validated to 1e-12 relative tolerance.
int checked_steps(double length, double step, const char* what);

}  // namespace rdde
