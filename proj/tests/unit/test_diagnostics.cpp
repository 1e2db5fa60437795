#include <cmath>
#include <random>

#include "doctest.h"

#include "quasiblow/diagnostics.hpp"
#include "quasiblow/error.hpp"

using namespace quasiblow;

TEST_CASE("key identity and inequality at hand-picked points") {
  // R = S: both sides of the identity vanish.
  CHECK(key_identity_residual(1.3, 1.3, 3.0) == 0.0);
  // p = 2: |R|^(p-2) = 1, so the inequality margin is 4(R^2 + S^2).
  CHECK(key_inequality_margin(2.0, -1.0, 2.0) == doctest::Approx(20.0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double R = v(rng), S = v(rng), p = 2.0 + std::abs(v(rng)) * 3.0;
    const double scale = std::pow(std::max({std::abs(R), std::abs(S), 1.0}), p);
    CHECK(key_identity_residual(R, S, p) < 1e-12 * scale);
    CHECK(key_inequality_margin(R, S, p) >= 0.0);
  }
}

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.75));
  const ScalingFit f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(0.75));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  CHECK(f.residual < 1e-12);
  CHECK_THROWS_AS(loglog_fit({0.1, 0.2}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(loglog_fit({0.1, 0.2, 0.4}, {1.0, -2.0, 3.0}), ValidationError);
}

TEST_CASE("norms of a piecewise-linear state") {
  FieldState s = FieldState::zeros(Grid1D{0.0, 1.0, 4});
  s.R = {1.0, 1.0, 1.0, 1.0};
  s.S = {0.0, 2.0, 0.0, 0.0};
  const auto [r, q] = lp_norms(s, 2.0);
  CHECK(r > 0.0);
  CHECK(q > 0.0);
  // Energy is half the sum of the squared L2 norms.
  CHECK(energy(s, SpeedModel::power(1.0)) == doctest::Approx(0.5 * (r + q)));
}

TEST_CASE("balance source vanishes at lambda = 2 and for R = S") {
  CHECK(balance_source(0.7, -0.4, 1.2, 0.8, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(balance_source(0.7, 0.7, 1.2, 0.8, 1.0, 2.0) == doctest::Approx(0.0));
  CHECK(balance_source(0.7, -0.4, 1.2, 0.0, 1.0, 2.0) == doctest::Approx(0.0));
}

namespace {

Trajectory lambda_one_run(double t_max, std::size_t n, double factor) {
  RunConfig cfg;
  cfg.lambda = 1.0;
  cfg.eps = 0.4;
  cfg.grid = {-0.8, 0.8, n};
  cfg.cfl = 0.8;
  cfg.t_max = t_max;
  cfg.track_peak = true;
  cfg.check_domain_of_dependence = false;
  cfg.blowup_factor = factor;
  return run(cfg);
}

}  // namespace

TEST_CASE("energy is conserved at lambda = 1 and the balance law closes") {
  const Trajectory tr = lambda_one_run(2.0, 1024, 1e6);
  CHECK(energy_drift(tr, 2.0) < 1e-3);
  const BalanceSeries b = balance_residual(tr, 2.0);
  CHECK(b.max_abs() < 1e-2);
  CHECK(gronwall_check(tr).pass);
}

TEST_CASE("sign of the blow-up and theorem bounds") {
  const Trajectory tr = lambda_one_run(20.0, 1024, 2.0);
  REQUIRE(tr.event == TerminalEvent::blowup_threshold_crossed);
  const SignReport s = blowup_sign_monitor(tr);
  CHECK(s.driver == 'S');
  // S > 0 drives the blow-up, so u_t > 0 and u_x < 0 there.
  CHECK(s.sign_u_t == 1);
  CHECK(s.sign_u_x == -1);
  const Constants k = compute_constants(tr.config);
  for (const auto& b : theorem_bounds_check(tr, k, 0.4)) CHECK_MESSAGE(b.pass, b.id);
  CHECK_THROWS_AS(blowup_sign_monitor(lambda_one_run(0.5, 256, 1e6)), NoBlowupError);
}
