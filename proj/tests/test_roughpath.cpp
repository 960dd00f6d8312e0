#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "rdde/io.hpp"
#include "rdde/rough_path.hpp"

using namespace rdde;

namespace {

SamplePath linear_time_path(double t_lo, double t_hi, double hf) {
  return SamplePath::from_function(1, t_lo, t_hi, hf,
                                   [](double t) { return Vec::Constant(1, t); });
}

}  // namespace

TEST_CASE("deterministic path t: areas match the closed forms") {
  const double hf = 1.0 / 512, h = 1.0 / 8, r = 0.5;
  const SamplePath p = linear_time_path(-r, 2.0, hf);
  const DelayedRoughPath rp = lift_ito(p, h, r);
  for (int i = 0; i < rp.n_intervals; i += 3) {
    for (int j = i + 1; j <= rp.n_intervals; j += 2) {
      const double dt = (j - i) * h;
      // Left-point fine sums of int (u - s) du: exact value minus hf dt / 2.
      CHECK(rp.levy_area(i, j)(0, 0) == doctest::Approx(dt * dt / 2).epsilon(0.0).scale(1.0).epsilon(0.02));
      CHECK(std::abs(rp.levy_area(i, j)(0, 0) - dt * dt / 2) < hf * dt);
      CHECK(std::abs(rp.delayed_levy_area(i, j)(0, 0) - dt * dt / 2) < hf * dt);
    }
  }
}

TEST_CASE("both Chen identities hold on random triples") {
  const SamplePath p = SamplePath::brownian(2, -1.0, 4.0, 1.0 / 256, 2024);
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 16, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> node(0, rp.n_intervals);
  for (int t = 0; t < 100; ++t) {
    int i = node(rng), u = node(rng), j = node(rng);
    if (i > u) std::swap(i, u);
    if (u > j) std::swap(u, j);
    if (i > u) std::swap(i, u);
    const Mat lhs = rp.levy_area(i, j);
    const Mat rhs = rp.levy_area(i, u) + rp.levy_area(u, j) +
                    rp.increment(i, u) * rp.increment(u, j).transpose();
    CHECK((lhs - rhs).norm() < 1e-10);

    const Mat dlhs = rp.delayed_levy_area(i, j);
    const Mat drhs = rp.delayed_levy_area(i, u) + rp.delayed_levy_area(u, j) +
                     rp.increment(i - rp.delay_steps, u - rp.delay_steps) *
                         rp.increment(u, j).transpose();
    CHECK((dlhs - drhs).norm() < 1e-10);
  }
}

TEST_CASE("Stratonovich lift: exact correction, shared delayed area") {
  const SamplePath p = SamplePath::brownian(2, -1.0, 3.0, 1.0 / 512, 5);
  const DelayedRoughPath ito = lift_ito(p, 1.0 / 16, 1.0);
  const DelayedRoughPath strat = lift_stratonovich(p, 1.0 / 16, 1.0);
  const Mat corr = 0.5 * ito.h * Mat::Identity(2, 2);
  for (int i = 0; i < ito.n_intervals; ++i) {
    CHECK((strat.adj_area(i) - (ito.adj_area(i) + corr)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((strat.adj_delayed_area(i) - ito.adj_delayed_area(i)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((strat.adj_increment(i) - ito.adj_increment(i)).cwiseAbs().maxCoeff() == 0.0);
  }
  // Random non-adjacent pair: correction scales with (t - s).
  const Mat d = strat.levy_area(3, 9) - ito.levy_area(3, 9);
  CHECK((d - 6 * corr).norm() < 1e-12);
}

TEST_CASE("scalar geometric identity of the Stratonovich area") {
  const int R = 512;
  const double h = 1.0 / 8;
  const SamplePath p = SamplePath::brownian(1, -1.0, 2.0, h / R, 31);
  const DelayedRoughPath strat = lift_stratonovich(p, h, 1.0);
  for (int i = 0; i < strat.n_intervals; ++i) {
    const double dx = strat.adj_increment(i)[0];
    const double dev = strat.adj_area(i)(0, 0) - 0.5 * dx * dx;
    const double se = h * std::sqrt(1.0 / (2.0 * R));
    CHECK(std::abs(dev) < 5.0 * se);
  }
}

TEST_CASE("exact scalar area option reproduces the closed form") {
  const SamplePath p = SamplePath::brownian(1, -1.0, 2.0, 1.0 / 256, 77);
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 8, 1.0, 0.45, true);
  for (int i = 0; i < rp.n_intervals; ++i) {
    const double dx = rp.adj_increment(i)[0];
    CHECK(rp.adj_area(i)(0, 0) == 0.5 * (dx * dx - rp.h));
  }
  CHECK_THROWS_AS(lift_ito(SamplePath::brownian(2, -1.0, 2.0, 1.0 / 256, 1), 1.0 / 8, 1.0, 0.45,
                           true),
                  ConfigError);
}

TEST_CASE("hoelder norm: zero path, monotonicity, deterministic value") {
  const SamplePath z = SamplePath::from_function(1, -1.0, 2.0, 1.0 / 64,
                                                 [](double) { return Vec::Zero(1); });
  const DelayedRoughPath zrp = lift_ito(z, 1.0 / 8, 1.0);
  CHECK(hoelder_norm(zrp, 0, zrp.n_intervals) == 0.0);
  CHECK(hoelder_norm(zrp, 3, 3) == 0.0);  // empty interval

  const SamplePath p = SamplePath::brownian(1, -1.0, 3.0, 1.0 / 128, 6);
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 8, 1.0);
  double prev = 0.0;
  for (int b = 1; b <= rp.n_intervals; b += 4) {
    const double cur = hoelder_norm(rp, 0, b);
    CHECK(cur >= prev);
    prev = cur;
  }

  const SamplePath lin = linear_time_path(-1.0, 1.0, 1.0 / 100);
  const DelayedRoughPath lrp = lift_ito(lin, 0.1, 1.0, 0.45);
  const HoelderComponents hc = hoelder_components(lrp, 0, lrp.n_intervals);
  CHECK(hc.path == doctest::Approx(1.0).epsilon(1e-12));  // max (t-s)^{1-gamma} on [0,1]
  CHECK(hc.path_delayed == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hoelder norm is invariant under the Wiener shift") {
  const double r = 1.0;
  const SamplePath p = SamplePath::brownian(1, -r, 5.0, 1.0 / 128, 404);
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 16, r);
  const int N = rp.delay_steps;

  // The shift shares increments bit-exactly and the lift is anchored
  // relative to t_start, so matching node windows agree bitwise.
  const SamplePath sp = wiener_shift(p, 2, r);
  const DelayedRoughPath srp = lift_ito(sp, 1.0 / 16, r);
  CHECK(hoelder_norm(srp, 0, N) == hoelder_norm(rp, 0, N));
  CHECK(hoelder_norm(srp, 2 * N, 4 * N) == hoelder_norm(rp, 2 * N, 4 * N));

  // Re-basing the sample so that new time t reads the old path at t + 2r
  // moves the window [2r, 3r] onto [0, r]; the norm follows up to the
  // rounding incurred when the values are re-differenced.
  const SamplePath rebased = SamplePath::from_function(
      1, -r, 3.0, 1.0 / 128,
      [&](double t) { return Vec(p.value(p.node_of(t + 2.0)) - p.value(p.node_of(2.0))); });
  const DelayedRoughPath rrp = lift_ito(rebased, 1.0 / 16, r);
  CHECK(hoelder_norm(rrp, 0, N) ==
        doctest::Approx(hoelder_norm(rp, 2 * N, 3 * N)).epsilon(1e-9));
}

TEST_CASE("time augmentation: closed forms, Chen, exact stripping") {
  const SamplePath p = SamplePath::brownian(1, -1.0, 2.0, 1.0 / 512, 9);
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 8, 1.0);
  const DelayedRoughPath aug = augment_time(rp);
  CHECK(aug.dim == 2);

  for (int i = 0; i < aug.n_intervals; ++i) {
    CHECK(aug.adj_area(i)(0, 0) == 0.5 * rp.h * rp.h);
    CHECK(aug.adj_increment(i)[0] == rp.h);
    // Stripping the time row/column recovers the input exactly.
    CHECK(aug.adj_increment(i)[1] == rp.adj_increment(i)[0]);
    CHECK(aug.adj_area(i)(1, 1) == rp.adj_area(i)(0, 0));
    CHECK(aug.adj_delayed_area(i)(1, 1) == rp.adj_delayed_area(i)(0, 0));
  }

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> node(0, aug.n_intervals);
  for (int t = 0; t < 50; ++t) {
    int i = node(rng), u = node(rng), j = node(rng);
    if (i > u) std::swap(i, u);
    if (u > j) std::swap(u, j);
    if (i > u) std::swap(i, u);
    const Mat lhs = aug.levy_area(i, j);
    const Mat rhs = aug.levy_area(i, u) + aug.levy_area(u, j) +
                    aug.increment(i, u) * aug.increment(u, j).transpose();
    CHECK((lhs - rhs).norm() < 1e-10);
    const Mat dl = aug.delayed_levy_area(i, j);
    const Mat dr = aug.delayed_levy_area(i, u) + aug.delayed_levy_area(u, j) +
                   aug.increment(i - aug.delay_steps, u - aug.delay_steps) *
                       aug.increment(u, j).transpose();
    CHECK((dl - dr).norm() < 1e-10);
  }

  // Integration by parts: int (tau-s) dX + int X_{s,tau} dtau = (t-s) X_{s,t}.
  for (int i = 0; i < aug.n_intervals; i += 2) {
    const int j = i + 1;
    const double lhs = aug.adj_area(i)(0, 1) + aug.adj_area(i)(1, 0);
    const double rhs = rp.h * rp.adj_increment(i)[0];
    CHECK(std::abs(lhs - rhs) < 4 * (1.0 / 512));
  }
}

TEST_CASE("exponent validator") {
  CHECK(validate_exponents(0.34, 0.49, 0.495));
  CHECK_FALSE(validate_exponents(0.40, 0.41, 0.45));
  CHECK_FALSE(validate_exponents(0.40, 0.40, 0.45));
  std::string reason;
  CHECK_FALSE(validate_exponents(0.40, 0.41, 0.45, reason));
  CHECK(!reason.empty());
}

TEST_CASE("grid bookkeeping and errors") {
  const SamplePath p = SamplePath::brownian(1, -1.0, 2.0, 1.0 / 64, 3);
  CHECK_THROWS_AS(lift_ito(p, 1.0 / 16, 0.3), GridMismatchError);   // r not multiple of h
  CHECK_THROWS_AS(lift_ito(p, 1.0 / 100, 1.0), GridMismatchError);  // h not multiple of hf
  const DelayedRoughPath rp = lift_ito(p, 1.0 / 16, 1.0);
  CHECK(rp.node_of(0.0) == 0);
  CHECK(rp.node_of(-1.0) == -rp.delay_steps);
  CHECK_THROWS_AS(rp.node_of(0.03), GridMismatchError);
  CHECK_THROWS_AS(rp.node_of(5.0), OutOfWindowError);
}

TEST_CASE("binary round trip is bit-exact") {
  const SamplePath p = SamplePath::brownian(3, -1.0, 2.0, 1.0 / 64, 88);
  const DelayedRoughPath rp = lift_stratonovich(p, 1.0 / 8, 1.0, 0.48);
  const std::string file = (std::filesystem::temp_directory_path() / "rp_roundtrip.bin").string();
  save_rough_path(rp, file);
  const DelayedRoughPath back = load_rough_path(file);
  CHECK(back.dim == rp.dim);
  CHECK(back.t0 == rp.t0);
  CHECK(back.h == rp.h);
  CHECK(back.gamma == rp.gamma);
  CHECK(back.convention == rp.convention);
  CHECK(back.n_intervals == rp.n_intervals);
  CHECK(back.delay_steps == rp.delay_steps);
  for (size_t i = 0; i < rp.raw_increments().size(); ++i) {
    CHECK((back.raw_increments()[i] - rp.raw_increments()[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int i = 0; i < rp.n_intervals; ++i) {
    CHECK((back.adj_area(i) - rp.adj_area(i)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.adj_delayed_area(i) - rp.adj_delayed_area(i)).cwiseAbs().maxCoeff() == 0.0);
  }
  std::filesystem::remove(file);
}
