#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "rdde/solver.hpp"
#include "oracles.hpp"

using namespace rdde;

namespace {

std::shared_ptr<DelayedRoughPath> brownian_lift(std::uint64_t seed, int n_coarse, int segments,
                                                int refine = 8) {
  const double r = 1.0, h = r / n_coarse;
  const SamplePath p = SamplePath::brownian(1, -r, segments * r, h / refine, seed);
  return std::make_shared<DelayedRoughPath>(lift_ito(p, h, r));
}

std::shared_ptr<DelayedRoughPath> zero_lift(int n_coarse, int segments) {
  const double r = 1.0, h = r / n_coarse;
  const SamplePath p = SamplePath::from_function(1, -r, segments * r, h,
                                                 [](double) { return Vec::Zero(1); });
  return std::make_shared<DelayedRoughPath>(lift_ito(p, h, r));
}

DelayedControlledSegment const_history(std::shared_ptr<const DelayedRoughPath> rp, double v) {
  const int N = rp->delay_steps;
  return DelayedControlledSegment::constant(std::move(rp), -N, N + 1, Vec::Constant(1, v));
}

}  // namespace

TEST_CASE("additive constant noise integrates exactly") {
  auto rp = brownian_lift(3, 16, 2);
  const VectorFieldBundle vf = field_ou_additive(0.0, 2.0, 0.0);  // dy = 2 dB
  const auto segs = semiflow(const_history(rp, 1.0), *rp, vf, 2);
  for (int s = 1; s <= 2; ++s) {
    const int start = segs[s].start_node;
    for (int j = 0; j < segs[s].n_nodes(); ++j) {
      const double expect = 1.0 + 2.0 * rp->increment(0, start + j)[0];
      CHECK(segs[s].m[j][0] == doctest::Approx(expect).epsilon(1e-13));
      CHECK(segs[s].zeta0[j](0, 0) == 2.0);
    }
  }
}

TEST_CASE("pure-delay linear equation matches the exact series") {
  // Small-step deterministic run; the first segment is reproduced exactly,
  // the later ones to O(h) with a small constant.
  const double a = -0.3;
  const int n_coarse = 200000;
  auto rp = zero_lift(n_coarse, 2);
  const VectorFieldBundle vf = field_pure_delay_linear(a);
  const auto segs = semiflow(const_history(rp, 1.0), *rp, vf, 2);
  double worst = 0.0;
  for (int s = 1; s <= 2; ++s) {
    for (int j = 0; j < segs[s].n_nodes(); j += 97) {
      const double t = rp->time_of(segs[s].start_node + j);
      worst = std::max(worst, std::abs(segs[s].m[j][0] - oracle::pure_delay_exact(a, 1.0, t)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("deterministic a = -0.3 decays monotonically from 1") {
  auto rp = zero_lift(64, 3);
  const auto segs = semiflow(const_history(rp, 1.0), *rp, field_pure_delay_linear(-0.3), 3);
  double prev = 1.0 + 1e-15;
  for (int s = 1; s <= 3; ++s) {
    for (const auto& v : segs[s].m) {
      CHECK(v[0] > 0.0);
      CHECK(v[0] <= prev);
      prev = v[0];
    }
  }
}

TEST_CASE("semiflow bookkeeping: n = 0, composition, window exhaustion") {
  auto rp = brownian_lift(5, 8, 3);
  const VectorFieldBundle vf = field_sine_product(0.3, 0.2, 0.1);
  const auto xi = const_history(rp, 0.5);
  const auto only = semiflow(xi, *rp, vf, 0);
  CHECK(only.size() == 1);
  CHECK(only[0].m[3][0] == 0.5);

  const auto two = semiflow(xi, *rp, vf, 2);
  const auto once = solve_segment(xi, *rp, vf);
  const auto twice = solve_segment(once, *rp, vf);
  REQUIRE(two.size() == 3);
  for (int j = 0; j < twice.n_nodes(); ++j) CHECK(two[2].m[j][0] == twice.m[j][0]);

  CHECK_THROWS_AS(semiflow(xi, *rp, vf, 4), OutOfWindowError);
}

TEST_CASE("past segment validation") {
  auto rp = brownian_lift(6, 8, 2);
  const VectorFieldBundle vf = field_linear(1.0, 0.0);
  auto bad_len = DelayedControlledSegment::constant(rp, -8, 5, Vec::Ones(1));
  CHECK_THROWS_AS(solve_segment(bad_len, *rp, vf), GridMismatchError);
  auto bad_shape = DelayedControlledSegment::constant(rp, -8, 9, Vec::Ones(2));
  CHECK_THROWS_AS(solve_segment(bad_shape, *rp, vf), WrongKindError);
  auto other = brownian_lift(7, 8, 2);
  CHECK_THROWS_AS(solve_segment(const_history(other, 1.0), *rp, vf), GridMismatchError);
}

TEST_CASE("blow-up guard names the offending node") {
  auto rp = zero_lift(16, 2);
  const VectorFieldBundle vf = field_linear(0.0, 1e6);  // y' = 1e6 y
  try {
    semiflow(const_history(rp, 1.0), *rp, vf, 2);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.node > 0);
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("direct and augmented drift handling agree to O(h)") {
  auto rp = brownian_lift(8, 64, 2);
  const VectorFieldBundle vf = field_linear(0.5, -0.4);
  const auto direct = semiflow(const_history(rp, 1.0), *rp, vf, 2, DriftMode::Direct);
  const auto aug = semiflow(const_history(rp, 1.0), *rp, vf, 2, DriftMode::Augmented);
  double diff = 0.0, scale = 0.0;
  for (int s = 1; s <= 2; ++s) {
    for (int j = 0; j < direct[s].n_nodes(); ++j) {
      diff = std::max(diff, std::abs(direct[s].m[j][0] - aug[s].m[j][0]));
      scale = std::max(scale, std::abs(direct[s].m[j][0]));
    }
  }
  CHECK(scale > 0.0);
  CHECK(diff < 0.05 * std::max(1.0, scale));
}

TEST_CASE("norm diagnostics are finite and sensible") {
  auto rp = brownian_lift(9, 16, 3);
  const auto segs = semiflow(const_history(rp, 0.5), *rp, field_sine_product(0.3, 0.2, 0.1), 3);
  const auto diags = solution_norm_diagnostic(segs, *rp, 0.49);
  REQUIRE(diags.size() == segs.size());
  for (const auto& dg : diags) {
    CHECK(std::isfinite(dg.sup));
    CHECK(std::isfinite(dg.norm));
    CHECK(dg.A >= 1.0);
    CHECK(dg.sup > 0.0);
  }
}

TEST_CASE("trajectory csv smoke") {
  auto rp = brownian_lift(10, 8, 2);
  const auto segs = semiflow(const_history(rp, 1.0), *rp, field_linear(0.4, -0.1), 2);
  const std::string file = (std::filesystem::temp_directory_path() / "traj.csv").string();
  write_trajectory_csv(segs, file);
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("segment,t", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 3 * 9);
  std::filesystem::remove(file);
}
