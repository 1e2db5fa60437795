#include <cmath>
#include <sstream>

#include "doctest.h"

#include "quasiblow/characteristics.hpp"
#include "quasiblow/error.hpp"

using namespace quasiblow;

namespace {

Trajectory smooth_run(const SpeedModel& model, double t_max, std::size_t n = 1024) {
  RunConfig cfg;
  cfg.lambda = 1.0;
  cfg.eps = 0.25;
  cfg.model = model;
  cfg.grid = {-1.5, 1.5, n};
  cfg.t_max = t_max;
  cfg.record_every = n / 128;
  return run(cfg);
}

}  // namespace

TEST_CASE("curves of a constant speed are straight lines") {
  const Trajectory tr = smooth_run(SpeedModel::affine(1.0, 0.0), 0.5);
  const CharCurve plus = trace_curve(tr, 0.25, 0.1, Direction::plus);
  CHECK(plus.reached_start);
  CHECK(plus.reached_end);
  CHECK(plus.x_at(0.0) == doctest::Approx(-0.15));
  CHECK(plus.x_at(0.5) == doctest::Approx(0.35));
  const CharCurve minus = trace_curve(tr, 0.25, 0.1, Direction::minus);
  CHECK(minus.x_at(0.5) == doctest::Approx(-0.15));
  CHECK_THROWS_AS(trace_curve(tr, 0.25, 7.0, Direction::plus), OutOfRangeError);
}

TEST_CASE("interpolation reproduces snapshot values") {
  const Trajectory tr = smooth_run(SpeedModel::power(1.0), 0.3);
  const TrajectoryInterpolator it(tr);
  const FieldState& s = tr.snapshots[3];
  const auto v = it.at(s.t, s.x(500));
  CHECK(v.S == doctest::Approx(s.S[500]));
  CHECK(v.u == doctest::Approx(s.u[500]));
  CHECK(v.c == doctest::Approx(1.0 + s.u[500]));
  CHECK(it.contains(0.1, 0.0));
  CHECK_FALSE(it.contains(0.1, 3.0));
}

TEST_CASE("scaled Riemann variable obeys its ODE along the curve") {
  // Interior residuals (centred differences in t) shrink with the grid.
  auto interior_residual = [](std::size_t n) {
    const Trajectory tr = smooth_run(SpeedModel::power(1.0), 0.6, n);
    const CharCurve curve = trace_scaled_riemann(tr, 0.0, 0.0, Direction::plus);
    REQUIRE(curve.points.size() > 10);
    // lambda = 1: s = S, and S(0, 0) = -2 c phi'(0) = 2/e.
    CHECK(curve.points.front().scaled_value == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-4));
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) r = std::max(r, curve.points[i].ode_residual);
    return r;
  };
  const double coarse = interior_residual(1024);
  const double fine = interior_residual(2048);
  CHECK(coarse < 0.05);
  CHECK(coarse / fine > 1.5);

  const Trajectory tr = smooth_run(SpeedModel::power(1.0), 0.2);
  std::ostringstream out;
  write_curve_csv(out, trace_scaled_riemann(tr, 0.1, 0.0, Direction::minus));
  CHECK(out.str().rfind("t,x,R,S,u,c,scaled_value,ode_residual", 0) == 0);
}

TEST_CASE("triangle balance closes for a smooth solution") {
  std::vector<double> res;
  for (std::size_t n : {1024u, 2048u}) {
    const Trajectory tr = smooth_run(SpeedModel::power(1.0), 0.6, n);
    const TriangleBalance b = triangle_balance(tr, 0.5, 0.1);
    CHECK(b.x1 < 0.1);
    CHECK(b.x2 > 0.1);
    CHECK(std::abs(b.residual) < 0.05 * (b.lhs() + b.initial_term));
    res.push_back(std::abs(b.residual));
    CHECK_THROWS_AS(triangle_balance(tr, 0.55, 1.4), OutOfRangeError);
  }
  CHECK(res[0] / res[1] > 1.5);
}
