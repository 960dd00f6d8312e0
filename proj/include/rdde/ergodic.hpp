#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "rdde/linearize.hpp"

namespace rdde {

/// Everything needed to run one simulation pipeline for one seed: the
/// field, delay, grids, lift convention and the constant initial segment.
struct System {
  VectorFieldBundle vf;
  double r = 1.0;
  int n_coarse = 32;  // coarse intervals per delay length
  int refine = 8;     // fine steps per coarse interval
  double gamma = 0.45;
  Convention convention = Convention::Ito;
  bool deterministic = false;  // zero driving increments
  Vec init;                    // constant initial segment; empty means zero
  DriftMode drift_mode = DriftMode::Direct;

  double coarse_step() const { return r / n_coarse; }
  double fine_step() const { return coarse_step() / refine; }
  Vec initial_value() const { return init.size() ? init : Vec::Zero(vf.w); }
  SegmentBasis basis() const { return {n_coarse + 1, vf.w, vf.d, coarse_step()}; }
};

/// Sampled noise and its lift over [t_lo, t_lo + (n_segments+1) r]; grid
/// node 0 of the lift sits at t_lo + r. NaN t_lo (the default) means -r.
std::shared_ptr<DelayedRoughPath> make_lift(
    const System& sys, std::uint64_t seed, int n_segments,
    double t_lo = std::numeric_limits<double>::quiet_NaN());

/// Constant initial segment occupying the delay interval before node 0.
DelayedControlledSegment initial_segment(const System& sys,
                                         std::shared_ptr<const DelayedRoughPath> rp);

struct LyapunovReport {
  std::vector<double> exponents;  // per unit time, nonincreasing
  std::vector<bool> at_floor;
  std::vector<std::vector<double>> running;  // one k-vector per QR event
  std::uint64_t seed = 0;
  int k = 0;
  int n_steps = 0;
  int N = 0;  // coarse intervals per segment
  double floor_value = 0.0;
  bool converged = false;
};

/// Benettin QR over the segment cocycle: k orthonormal directions pushed
/// through the derivative of each semiflow step, reorthonormalized every
/// reorth_every segments; exponents are averaged log R_ii divided by the
/// delay length. The initial direction set is seeded pseudo-randomly unless
/// init_directions (a dim x k matrix, orthonormalized internally) is given.
LyapunovReport lyapunov_spectrum(const System& sys, std::uint64_t seed, int k, int n_steps,
                                 int reorth_every = 1, double conv_tol = 0.05,
                                 const Mat* init_directions = nullptr);

/// Orthonormal basis (columns) of the fast subspace at the time-0 fiber,
/// obtained by pushing k0 random directions forward from the n_pullback-fold
/// pulled-back fiber with per-segment reorthonormalization.
Mat unstable_subspace_pullback(const System& sys, std::uint64_t seed, int n_pullback, int k0);

// ---------------------------------------------------------------------------
// Stationary trajectories.

struct ContractionCheck {
  bool ok = false;
  double M = 0.0;
  double lambda = 0.0;
  double factor = 0.0;  // 2 M L^2 / lambda
};

/// |exp(tC)| <= M exp(-lambda t) with lambda = -max Re eig(C) - 1e-9 and M
/// fitted on [0, 50/lambda]; ok iff lambda > 0 and 2 M L^2 / lambda < 1.
ContractionCheck contraction_condition(const Mat& C, double L);

/// sigma(0,0) = sigma_x(0,0) = sigma_y(0,0) = 0 (so the zero trajectory is
/// stationary and usable as probe center).
bool stationary_zero_check(const VectorFieldBundle& vf);

struct StationaryTrajectory {
  std::shared_ptr<const SamplePath> fine;
  Mat C;
  double r = 0.0;
  double T = 0.0;        // burn-in / history truncation
  double t_begin = 0.0;  // usable window is [t_begin, fine->t_end()]
  int first_node = 0;    // fine node of t_begin
  std::vector<Vec> values;  // one value per fine node of the full window
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  double contraction_factor = 0.0;
};

/// Picard iteration on the truncated fixed-point map
///   Gamma(y)(t) = int_{t-T}^t exp((t-tau) C) sigma(y_tau, y_{tau-r}) dB_tau
/// realized as an exact-exponential recursion on the fine grid. The
/// diffusion Lipschitz bound is estimated by probing the partials; a failed
/// contraction check throws ConfigError carrying the computed factor.
StationaryTrajectory find_stationary(const Mat& C, const VectorFieldBundle& vf,
                                     const SamplePath& path, double r, double T, double tol,
                                     int max_iter = 60);

/// The trajectory restricted to the coarse nodes [start_node, start_node+N]
/// of a lift built over the same fine sample, with zeta0 = sigma(Y, Y_past).
DelayedControlledSegment stationary_segment(const StationaryTrajectory& Y,
                                            std::shared_ptr<const DelayedRoughPath> rp,
                                            const VectorFieldBundle& vf, int start_node);

// ---------------------------------------------------------------------------
// Manifold probes. Both probe the zero stationary trajectory (guarded by
// stationary_zero_check); the stable probe's directions live in
// SegmentBasis coordinates, e.g. the orthogonal complement of the pullback
// unstable basis (a proxy for the true stable fiber).

struct ProbeReport {
  double upsilon = 0.0;
  double epsilon = 0.0;
  double rate_fit = 0.0;    // per unit time; stable: worst fitted decay,
                            // unstable: fitted backward rate (negated slope)
  double sup_exp_nv = 0.0;  // sup_n e^{n upsilon} ||segment difference n||
  std::vector<double> log_norms;  // per segment, worst over directions
};

ProbeReport stable_rate_probe(const System& sys, std::uint64_t seed, double upsilon,
                              const std::vector<Vec>& directions, double eps, int n);

ProbeReport unstable_rate_probe(const System& sys, std::uint64_t seed, double upsilon, int n,
                                int k0 = 1, double eps = 1e-6);

}  // namespace rdde
