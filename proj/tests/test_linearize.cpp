#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "rdde/linearize.hpp"
#include "oracles.hpp"

using namespace rdde;

namespace {

std::shared_ptr<DelayedRoughPath> brownian_lift(std::uint64_t seed, int n_coarse, int segments) {
  const double r = 1.0, h = r / n_coarse;
  const SamplePath p = SamplePath::brownian(1, -r, segments * r, h / 8, seed);
  return std::make_shared<DelayedRoughPath>(lift_ito(p, h, r));
}

// Fully linear field: sigma = b1 x + b2 y, drift = c1 x + c2 y.
VectorFieldBundle linear_delay_field(double b1, double b2, double c1, double c2) {
  VectorFieldBundle vf;
  vf.w = vf.d = 1;
  vf.sigma = [b1, b2](const Vec& x, const Vec& y) {
    return Mat::Constant(1, 1, b1 * x[0] + b2 * y[0]);
  };
  vf.sigma_x = [b1](const Vec&, const Vec&, const Vec& u) { return Mat::Constant(1, 1, b1 * u[0]); };
  vf.sigma_y = [b2](const Vec&, const Vec&, const Vec& v) { return Mat::Constant(1, 1, b2 * v[0]); };
  auto zero2 = [](const Vec&, const Vec&, const Vec&, const Vec&) { return Mat::Zero(1, 1); };
  vf.sigma_xx = zero2;
  vf.sigma_xy = zero2;
  vf.sigma_yy = zero2;
  vf.B1 = Mat::Constant(1, 1, c1);
  vf.B2 = Mat::Constant(1, 1, c2);
  return vf;
}

DelayedControlledSegment random_direction(const SegmentBasis& basis,
                                          std::shared_ptr<const DelayedRoughPath> rp,
                                          int start_node, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec coords(basis.dim());
  for (int i = 0; i < coords.size(); ++i) coords[i] = gauss(rng);
  return basis.decode(std::move(rp), start_node, coords);
}

}  // namespace

TEST_CASE("segment basis round trip and inner product") {
  auto rp = brownian_lift(2, 8, 2);
  const SegmentBasis basis{rp->delay_steps + 1, 1, 1, rp->h};
  CHECK(basis.dim() == 18);
  const auto dir = random_direction(basis, rp, 0, 5);
  const Vec coords = basis.encode(dir);
  const auto back = basis.decode(rp, 0, coords);
  for (int i = 0; i < dir.n_nodes(); ++i) {
    CHECK(back.m[i][0] == dir.m[i][0]);
    CHECK(back.zeta0[i](0, 0) == dir.zeta0[i](0, 0));
  }
  CHECK(basis.inner(coords, coords) == doctest::Approx(rp->h * coords.squaredNorm()));
  CHECK_THROWS_AS(basis.decode(rp, 0, Vec::Zero(5)), GridMismatchError);
}

TEST_CASE("linear field: the derivative is the solution map itself") {
  auto rp = brownian_lift(3, 16, 2);
  const VectorFieldBundle vf = linear_delay_field(0.4, 0.3, -0.2, 0.1);
  const int N = rp->delay_steps;
  const SegmentBasis basis{N + 1, 1, 1, rp->h};

  const auto xi = random_direction(basis, rp, -N, 7);
  const auto y = solve_segment(xi, *rp, vf);
  const auto dir = random_direction(basis, rp, -N, 8);

  // For a linear equation solve(xi + dir) - solve(xi) == derivative at xi[dir].
  DelayedControlledSegment sum = xi;
  for (int i = 0; i <= N; ++i) {
    sum.m[i] += dir.m[i];
    sum.zeta0[i] += dir.zeta0[i];
  }
  const auto y_sum = solve_segment(sum, *rp, vf);
  const auto Z = derivative_segment(xi, y, dir, *rp, vf);
  for (int i = 0; i <= N; ++i) {
    CHECK(std::abs((y_sum.m[i][0] - y.m[i][0]) - Z.m[i][0]) < 1e-12);
  }
}

TEST_CASE("derivative is exactly linear in the direction; zero maps to zero") {
  auto rp = brownian_lift(4, 8, 2);
  const VectorFieldBundle vf = field_sine_product(0.3, 0.2, 0.1);
  const int N = rp->delay_steps;
  const SegmentBasis basis{N + 1, 1, 1, rp->h};
  const auto xi = random_direction(basis, rp, -N, 11);
  const auto y = solve_segment(xi, *rp, vf);

  const auto zero = basis.decode(rp, -N, Vec::Zero(basis.dim()));
  const auto z_out = derivative_segment(xi, y, zero, *rp, vf);
  for (int i = 0; i <= N; ++i) CHECK(z_out.m[i][0] == 0.0);

  const auto d1 = random_direction(basis, rp, -N, 12);
  const auto d2 = random_direction(basis, rp, -N, 13);
  const auto combo = basis.decode(rp, -N, Vec(basis.encode(d1) + 2.0 * basis.encode(d2)));
  const Vec lhs = basis.encode(derivative_segment(xi, y, combo, *rp, vf));
  const Vec rhs = basis.encode(derivative_segment(xi, y, d1, *rp, vf)) +
                  2.0 * basis.encode(derivative_segment(xi, y, d2, *rp, vf));
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("finite differences of the nonlinear flow converge to the derivative") {
  auto rp = brownian_lift(5, 16, 2);
  const VectorFieldBundle vf = field_sine_product(0.3, 0.2, 0.1);
  const int N = rp->delay_steps;
  const SegmentBasis basis{N + 1, 1, 1, rp->h};
  const auto xi = random_direction(basis, rp, -N, 21);
  const auto y = solve_segment(xi, *rp, vf);
  const auto dir = random_direction(basis, rp, -N, 22);
  const auto Z = derivative_segment(xi, y, dir, *rp, vf);

  std::vector<double> le, lerr;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    DelayedControlledSegment pert = xi;
    for (int i = 0; i <= N; ++i) {
      pert.m[i] += eps * dir.m[i];
      pert.zeta0[i] += eps * dir.zeta0[i];
    }
    const auto y_eps = solve_segment(pert, *rp, vf);
    double err = 0.0;
    for (int i = 0; i <= N; ++i) {
      err = std::max(err, std::abs((y_eps.m[i][0] - y.m[i][0]) / eps - Z.m[i][0]));
    }
    le.push_back(std::log(eps));
    lerr.push_back(std::log(err));
  }
  const double rate = oracle::slope(le, lerr);
  CHECK(rate > 0.7);
  CHECK(rate < 1.3);
}

TEST_CASE("cocycle matrix represents the derivative and composes") {
  auto rp = brownian_lift(6, 8, 3);
  const VectorFieldBundle vf = field_sine_product(0.3, 0.2, 0.1);
  const int N = rp->delay_steps;
  const SegmentBasis basis{N + 1, 1, 1, rp->h};
  const auto xi = random_direction(basis, rp, -N, 31);
  const auto y1 = solve_segment(xi, *rp, vf);
  const auto y2 = solve_segment(y1, *rp, vf);

  const Mat M1 = cocycle_matrix(xi, y1, *rp, vf, basis);
  const Mat M2 = cocycle_matrix(y1, y2, *rp, vf, basis);

  const auto dir = random_direction(basis, rp, -N, 32);
  const Vec via_matrix = M1 * basis.encode(dir);
  const Vec direct = basis.encode(derivative_segment(xi, y1, dir, *rp, vf));
  CHECK((via_matrix - direct).lpNorm<Eigen::Infinity>() < 1e-10);

  // Two-step push of a direction equals the matrix product.
  const auto Z1 = derivative_segment(xi, y1, dir, *rp, vf);
  const auto Z2 = derivative_segment(y1, y2, Z1, *rp, vf);
  CHECK(((M2 * M1) * basis.encode(dir) - basis.encode(Z2)).lpNorm<Eigen::Infinity>() < 1e-8);

  // The one-step derivative is strictly contracting in some directions.
  const Eigen::JacobiSVD<Mat> svd(M1);
  CHECK(svd.singularValues()(0) >= svd.singularValues()(basis.dim() - 1));
  CHECK(svd.singularValues()(basis.dim() - 1) < svd.singularValues()(0));
}

TEST_CASE("misaligned segments are rejected") {
  auto rp = brownian_lift(7, 8, 2);
  const VectorFieldBundle vf = field_sine_product(0.3, 0.2, 0.1);
  const int N = rp->delay_steps;
  const SegmentBasis basis{N + 1, 1, 1, rp->h};
  const auto xi = random_direction(basis, rp, -N, 41);
  const auto y = solve_segment(xi, *rp, vf);
  auto dir = random_direction(basis, rp, -N + 1, 42);  // shifted window
  CHECK_THROWS_AS(derivative_segment(xi, y, dir, *rp, vf), GridMismatchError);
}

TEST_CASE("growth diagnostics on a constant matrix sequence") {
  const Mat A = 2.0 * Mat::Identity(3, 3);
  const std::vector<Mat> seq(20, A);
  std::vector<double> proxy;
  for (int n = 1; n <= 20; ++n) proxy.push_back(n * std::log(2.0));
  const BirkhoffReport rep = growth_diagnostics(seq, proxy);
  REQUIRE(rep.running_log_norm.size() == 20);
  CHECK(rep.running_log_norm.back() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.proxy_over_n.back() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.tail_spread < 1e-12);
  CHECK(rep.converged);
}
