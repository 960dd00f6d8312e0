#include "rdde/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include "rdde/errors.hpp"

namespace rdde {

namespace {

/// Deterministic standard normals (Box-Muller on explicit uniforms), for
/// direction sets that must not depend on stdlib distribution internals.
class NormalDraws {
 public:
  explicit NormalDraws(std::uint64_t seed) : rng_(seed ^ 0xd1b54a32d192ed03ULL) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double rho = std::sqrt(-2.0 * std::log(u1));
    spare_ = rho * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return rho * std::cos(2.0 * M_PI * u2);
  }

  Mat matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = next();
    return m;
  }

 private:
  double uniform() { return (rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

/// Thin QR with the sign convention R_ii >= 0; returns Q, fills r_diag.
Mat qr_fix(const Mat& M, Vec& r_diag) {
  const int k = static_cast<int>(M.cols());
  Eigen::HouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ() * Mat::Identity(M.rows(), k);
  Mat R = Q.transpose() * M;
  r_diag.resize(k);
  for (int j = 0; j < k; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    r_diag[j] = std::abs(R(j, j));
  }
  return Q;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den > 0 ? num / den : 0.0;
}

double segment_sup(const DelayedControlledSegment& seg) {
  double s = 0.0;
  for (const auto& v : seg.m) s = std::max(s, v.lpNorm<Eigen::Infinity>());
  return s;
}

}  // namespace

std::shared_ptr<DelayedRoughPath> make_lift(const System& sys, std::uint64_t seed,
                                            int n_segments, double t_lo) {
  if (std::isnan(t_lo)) t_lo = -sys.r;
  const double t_hi = t_lo + (n_segments + 1) * sys.r;
  SamplePath path =
      sys.deterministic
          ? SamplePath::from_function(sys.vf.d, t_lo, t_hi, sys.fine_step(),
                                      [&](double) { return Vec::Zero(sys.vf.d); })
          : SamplePath::brownian(sys.vf.d, t_lo, t_hi, sys.fine_step(), seed);
  DelayedRoughPath rp = sys.convention == Convention::Ito
                            ? lift_ito(path, sys.coarse_step(), sys.r, sys.gamma)
                            : lift_stratonovich(path, sys.coarse_step(), sys.r, sys.gamma);
  return std::make_shared<DelayedRoughPath>(std::move(rp));
}

DelayedControlledSegment initial_segment(const System& sys,
                                         std::shared_ptr<const DelayedRoughPath> rp) {
  return DelayedControlledSegment::constant(std::move(rp), -sys.n_coarse, sys.n_coarse + 1,
                                            sys.initial_value());
}

LyapunovReport lyapunov_spectrum(const System& sys, std::uint64_t seed, int k, int n_steps,
                                 int reorth_every, double conv_tol,
                                 const Mat* init_directions) {
  const SegmentBasis basis = sys.basis();
  const int D = basis.dim();
  if (k < 1 || k > D) throw ConfigError("lyapunov_spectrum: k out of range");
  if (reorth_every < 1) throw ConfigError("lyapunov_spectrum: reorth_every must be >= 1");

  auto rp = make_lift(sys, seed, n_steps, -sys.r);
  DelayedControlledSegment xi = initial_segment(sys, rp);

  NormalDraws draws(seed);
  Vec r_diag;
  if (init_directions && (init_directions->rows() != D || init_directions->cols() != k)) {
    throw ConfigError("lyapunov_spectrum: init_directions must be dim x k");
  }
  Mat Q = qr_fix(init_directions ? *init_directions : draws.matrix(D, k), r_diag);

  LyapunovReport rep;
  rep.seed = seed;
  rep.k = k;
  rep.n_steps = n_steps;
  rep.N = sys.n_coarse;
  rep.floor_value = std::log(1e-14) / sys.r;

  Vec logs = Vec::Zero(k);
  for (int s = 0; s < n_steps; ++s) {
    DelayedControlledSegment y = solve_segment(xi, *rp, sys.vf, sys.drift_mode);
    Mat pushed(D, k);
    for (int j = 0; j < k; ++j) {
      const DelayedControlledSegment dir = basis.decode(rp, xi.start_node, Q.col(j));
      pushed.col(j) = basis.encode(derivative_segment(xi, y, dir, *rp, sys.vf));
    }
    if ((s + 1) % reorth_every == 0 || s + 1 == n_steps) {
      Q = qr_fix(pushed, r_diag);
      for (int j = 0; j < k; ++j) logs[j] += std::log(std::max(r_diag[j], 1e-300));
      std::vector<double> run(k);
      for (int j = 0; j < k; ++j) run[j] = logs[j] / ((s + 1) * sys.r);
      rep.running.push_back(std::move(run));
    } else {
      Q = pushed;
    }
    xi = std::move(y);
  }

  rep.exponents.resize(k);
  for (int j = 0; j < k; ++j) rep.exponents[j] = logs[j] / (n_steps * sys.r);
  std::sort(rep.exponents.begin(), rep.exponents.end(), std::greater<double>());
  rep.at_floor.resize(k);
  for (int j = 0; j < k; ++j) rep.at_floor[j] = rep.exponents[j] <= rep.floor_value;

  if (!rep.running.empty()) {
    bool ok = true;
    const size_t half = rep.running.size() / 2;
    for (int j = 0; j < k; ++j) {
      const double last = rep.running.back()[j];
      for (size_t i = half; i < rep.running.size(); ++i) {
        if (std::abs(rep.running[i][j] - last) >= conv_tol) ok = false;
      }
    }
    rep.converged = ok;
  }
  return rep;
}

Mat unstable_subspace_pullback(const System& sys, std::uint64_t seed, int n_pullback, int k0) {
  const SegmentBasis basis = sys.basis();
  const int D = basis.dim();
  if (k0 == 0) return Mat(D, 0);
  if (k0 < 0 || k0 > D) throw ConfigError("unstable_subspace_pullback: k0 out of range");
  if (n_pullback < 1) throw ConfigError("unstable_subspace_pullback: need n_pullback >= 1");

  // Fiber at time 0 reached from the pulled-back window start.
  auto rp = make_lift(sys, seed, n_pullback, -(n_pullback + 1) * sys.r);
  DelayedControlledSegment xi = initial_segment(sys, rp);

  NormalDraws draws(seed ^ 0x5bf03635ULL);
  Vec r_diag;
  Mat Q = qr_fix(draws.matrix(D, k0), r_diag);
  for (int s = 0; s < n_pullback; ++s) {
    DelayedControlledSegment y = solve_segment(xi, *rp, sys.vf, sys.drift_mode);
    Mat pushed(D, k0);
    for (int j = 0; j < k0; ++j) {
      const DelayedControlledSegment dir = basis.decode(rp, xi.start_node, Q.col(j));
      pushed.col(j) = basis.encode(derivative_segment(xi, y, dir, *rp, sys.vf));
    }
    Q = qr_fix(pushed, r_diag);
    xi = std::move(y);
  }
  return Q;
}

// ---------------------------------------------------------------------------

ContractionCheck contraction_condition(const Mat& C, double L) {
  ContractionCheck out;
  if (C.rows() != C.cols() || C.rows() == 0) throw ConfigError("contraction_condition: C not square");
  const Eigen::EigenSolver<Mat> es(C);
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < C.rows(); ++i) max_re = std::max(max_re, es.eigenvalues()[i].real());
  out.lambda = -max_re - 1e-9;
  if (out.lambda <= 0) {
    out.factor = std::numeric_limits<double>::infinity();
    return out;
  }
  const int n_grid = 500;
  const double dt = (50.0 / out.lambda) / n_grid;
  const Mat E = (dt * C).exp();
  Mat P = Mat::Identity(C.rows(), C.cols());
  double M = 1.0;
  for (int i = 1; i <= n_grid; ++i) {
    P = E * P;
    const double nrm = Eigen::JacobiSVD<Mat>(P).singularValues()(0);
    M = std::max(M, nrm * std::exp(out.lambda * i * dt));
  }
  out.M = M;
  out.factor = 2.0 * M * L * L / out.lambda;
  out.ok = out.factor < 1.0;
  return out;
}

bool stationary_zero_check(const VectorFieldBundle& vf) {
  const Vec z = Vec::Zero(vf.w);
  if (vf.sigma(z, z).norm() > 1e-12) return false;
  for (int i = 0; i < vf.w; ++i) {
    if (vf.sigma_x(z, z, Vec::Unit(vf.w, i)).norm() > 1e-12) return false;
    if (vf.sigma_y(z, z, Vec::Unit(vf.w, i)).norm() > 1e-12) return false;
  }
  return true;
}

namespace {

double lipschitz_estimate(const VectorFieldBundle& vf) {
  NormalDraws draws(987654321u);
  double L = 0.0;
  for (int p = 0; p < 40; ++p) {
    Vec x = 2.0 * draws.matrix(vf.w, 1).col(0);
    Vec y = 2.0 * draws.matrix(vf.w, 1).col(0);
    Vec u = draws.matrix(vf.w, 1).col(0);
    if (u.norm() < 1e-12) continue;
    u /= u.norm();
    L = std::max(L, vf.sigma_x(x, y, u).norm());
    L = std::max(L, vf.sigma_y(x, y, u).norm());
  }
  return L;
}

}  // namespace

StationaryTrajectory find_stationary(const Mat& C, const VectorFieldBundle& vf,
                                     const SamplePath& path, double r, double T, double tol,
                                     int max_iter) {
  if (C.rows() != vf.w || C.cols() != vf.w) {
    throw ConfigError("find_stationary: C must be w x w");
  }
  if (path.dim() != vf.d) throw ConfigError("find_stationary: noise dimension mismatch");
  const double L = lipschitz_estimate(vf);
  const ContractionCheck cc = contraction_condition(C, L);
  if (!cc.ok) {
    throw ConfigError("find_stationary: contraction condition fails, 2ML^2/lambda = " +
                      std::to_string(cc.factor));
  }
  const double hf = path.fine_step();
  const int steps_r = checked_steps(r, hf, "find_stationary: delay");
  const int burn = checked_steps(T, hf, "find_stationary: truncation");
  const int n = path.n_increments();
  if (burn >= n) throw ConfigError("find_stationary: window shorter than truncation length");

  StationaryTrajectory out;
  out.fine = std::make_shared<SamplePath>(path);
  out.C = C;
  out.r = r;
  out.T = T;
  out.t_begin = path.t_start() + T;
  out.first_node = burn;
  out.contraction_factor = cc.factor;

  const Mat E = (hf * C).exp();
  const Vec zero = Vec::Zero(vf.w);
  std::vector<Vec> y(n + 1, zero);
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<Vec> ynew(n + 1, zero);
    Vec S = zero;
    for (int i = 0; i < n; ++i) {
      const Vec& past = i >= steps_r ? y[i - steps_r] : zero;
      S = E * (S + vf.sigma(y[i], past) * path.increment_at(i));
      ynew[i + 1] = S;
    }
    double res = 0.0;
    for (int i = burn; i <= n; ++i) res = std::max(res, (ynew[i] - y[i]).lpNorm<Eigen::Infinity>());
    y = std::move(ynew);
    out.iterations = it;
    out.residual = res;
    out.residual_history.push_back(res);
    if (res <= tol) break;
  }
  if (out.residual > tol) {
    throw ConfigError("find_stationary: Picard iteration did not reach tolerance, residual " +
                      std::to_string(out.residual));
  }
  out.values = std::move(y);
  return out;
}

DelayedControlledSegment stationary_segment(const StationaryTrajectory& Y,
                                            std::shared_ptr<const DelayedRoughPath> rp,
                                            const VectorFieldBundle& vf, int start_node) {
  const SamplePath& path = *Y.fine;
  if (rp->fine.get() != Y.fine.get() && rp->fine->seed() != path.seed()) {
    throw GridMismatchError("stationary_segment: lift built over a different sample");
  }
  const int steps_r = checked_steps(Y.r, path.fine_step(), "stationary_segment");
  const int N = rp->delay_steps;
  DelayedControlledSegment seg;
  seg.base = rp;
  seg.start_node = start_node;
  seg.rows = vf.w;
  seg.cols = 1;
  seg.m.resize(N + 1);
  seg.zeta0.resize(N + 1);
  seg.zeta1.assign(N + 1, Mat::Zero(seg.rows, rp->dim));
  for (int j = 0; j <= N; ++j) {
    const int fn = path.node_of(rp->time_of(start_node + j));
    if (fn - steps_r < 0) throw OutOfWindowError("stationary_segment: delayed read before window");
    seg.m[j] = Y.values[fn];
    seg.zeta0[j] = vf.sigma(Y.values[fn], Y.values[fn - steps_r]);
  }
  return seg;
}

// ---------------------------------------------------------------------------

namespace {

ProbeReport fit_probe(const std::vector<std::vector<double>>& sups, double upsilon, double eps,
                      double r, bool backward) {
  ProbeReport rep;
  rep.upsilon = upsilon;
  rep.epsilon = eps;
  const size_t n_seg = sups.empty() ? 0 : sups[0].size();
  rep.log_norms.assign(n_seg, -std::numeric_limits<double>::infinity());
  double worst_rate = -std::numeric_limits<double>::infinity();
  for (const auto& s : sups) {
    std::vector<double> tx, ly;
    for (size_t k = 0; k < s.size(); ++k) {
      const double lg = std::log(std::max(s[k], 1e-300));
      rep.log_norms[k] = std::max(rep.log_norms[k], lg);
      if (s[k] > 0) {
        tx.push_back(k * r);
        ly.push_back(lg);
      }
      const double scale = backward ? std::max(s.back(), 1e-300) : 1.0;
      const double m = backward ? (s.size() - 1 - k) : k;
      rep.sup_exp_nv = std::max(rep.sup_exp_nv, std::exp(upsilon * m) * s[k] / scale);
    }
    double rate = ls_slope(tx, ly);
    if (backward) rate = -rate;
    worst_rate = std::max(worst_rate, rate);
  }
  rep.rate_fit = worst_rate;
  return rep;
}

}  // namespace

ProbeReport stable_rate_probe(const System& sys, std::uint64_t seed, double upsilon,
                              const std::vector<Vec>& directions, double eps, int n) {
  if (!stationary_zero_check(sys.vf)) {
    throw WrongKindError("stable_rate_probe: field has no zero stationary trajectory");
  }
  const SegmentBasis basis = sys.basis();
  auto rp = make_lift(sys, seed, n, -sys.r);
  std::vector<std::vector<double>> sups;
  for (const Vec& dir : directions) {
    DelayedControlledSegment xi = basis.decode(rp, -sys.n_coarse, eps * dir);
    const auto segs = semiflow(xi, *rp, sys.vf, n, sys.drift_mode);
    std::vector<double> s;
    for (const auto& seg : segs) s.push_back(segment_sup(seg));
    sups.push_back(std::move(s));
  }
  return fit_probe(sups, upsilon, eps, sys.r, false);
}

ProbeReport unstable_rate_probe(const System& sys, std::uint64_t seed, double upsilon, int n,
                                int k0, double eps) {
  if (!stationary_zero_check(sys.vf)) {
    throw WrongKindError("unstable_rate_probe: field has no zero stationary trajectory");
  }
  const SegmentBasis basis = sys.basis();
  const Mat U = unstable_subspace_pullback(sys, seed, n, k0);
  std::vector<std::vector<double>> sups;
  auto rp = make_lift(sys, seed, n, -(n + 1) * sys.r);
  for (int j = 0; j < U.cols(); ++j) {
    DelayedControlledSegment xi = basis.decode(rp, -sys.n_coarse, eps * U.col(j));
    const auto segs = semiflow(xi, *rp, sys.vf, n, sys.drift_mode);
    std::vector<double> s;
    for (const auto& seg : segs) s.push_back(segment_sup(seg));
    sups.push_back(std::move(s));
  }
  return fit_probe(sups, upsilon, eps, sys.r, true);
}

}  // namespace rdde
