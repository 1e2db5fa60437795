#include <cmath>

#include "doctest.h"

#include "quasiblow/companions.hpp"
#include "quasiblow/error.hpp"

using namespace quasiblow;

TEST_CASE("uniform classical Carlemann data conserve R + S") {
  CarlemannConfig cfg = CarlemannConfig::classical();
  cfg.R0 = {true, 0.5, ProfileModel::bump_x()};
  cfg.S0 = {true, 0.1, ProfileModel::bump_x()};
  cfg.grid = {-1.0, 1.0, 64};
  cfg.t_max = 0.5;
  const Trajectory tr = carlemann_run(cfg);
  const FieldState& s = tr.final();
  CHECK(s.R[10] + s.S[10] == doctest::Approx(0.6).epsilon(1e-13));
  // d(R - S)/dt = 2(S^2 - R^2) = -2(R + S)(R - S): R - S = 0.4 exp(-1.2 t).
  CHECK(s.R[10] - s.S[10] == doctest::Approx(0.4 * std::exp(-1.2 * s.t)).epsilon(1e-5));
}

TEST_CASE("scalar Riccati companion blows up near t = 1") {
  CarlemannConfig cfg;
  cfg.a1 = 1.0;
  cfg.R0 = {true, 1.0, ProfileModel::bump_x()};
  cfg.S0 = {true, 0.0, ProfileModel::bump_x()};
  cfg.grid = {-1.0, 1.0, 64};
  cfg.t_max = 2.0;
  cfg.blowup_factor = 100.0;
  const Trajectory tr = carlemann_run(cfg);
  CHECK(tr.event == TerminalEvent::blowup_threshold_crossed);
  // R = 1 / (1 - t) reaches 100 at t = 0.99.
  CHECK(tr.t_final == doctest::Approx(0.99).epsilon(5e-3));
}

TEST_CASE("Riemann invariants round-trip") {
  PsystemState s;
  s.grid = {0.0, 1.0, 5};
  s.a = 1.0;
  s.u = {0.1, 0.2, -0.1, 0.0, 0.3};
  s.u_t = {0.0, 0.0, 0.0, 0.0, 0.0};
  const auto [wp, wm] = riemann_invariants(s);
  // u_t = 0: w+ = w- = (1+u)^2 / 2.
  CHECK(wp[1] == doctest::Approx(0.5 * 1.44));
  CHECK(wm[1] == doctest::Approx(0.5 * 1.44));
  const auto u = u_from_invariants(wp, wm, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(s.u[i]));
  s.a = -1.0;
  CHECK_THROWS_AS(riemann_invariants(s), ValidationError);
}

TEST_CASE("degeneracy threshold and presets") {
  const Trajectory above = run(degeneracy_preset(1.0, 0.5, 512, 2.0));
  const DegeneracyReport r = degeneracy_monitor(above, 1.0);
  CHECK(r.threshold == doctest::Approx(-1.0));
  CHECK(r.threshold_closed == -1.0);
  CHECK(r.integral_u1 == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK_FALSE(r.below_threshold);
  CHECK(r.consistent);
  const DegeneracyReport r2 = degeneracy_monitor(run(degeneracy_preset(2.0, 0.5, 256, 0.5)), 2.0);
  CHECK(r2.threshold == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("d'Alembert identity holds at lambda = 2") {
  RunConfig cfg;
  cfg.lambda = 2.0;
  cfg.model = SpeedModel::power(1.0);
  cfg.data.kind = InitialData::Kind::primitive;
  cfg.data.u0_amplitude = 0.2;
  cfg.data.u1 = ProfileModel::poly_bump({1.0});
  cfg.data.u1_amplitude = 0.1;
  cfg.grid = {-2.5, 2.5, 1024};
  cfg.t_max = 1.0;
  const Trajectory tr = run(cfg);
  const DalembertReport d = dalembert_residual(tr);
  CHECK(d.samples > 0);
  CHECK(d.max_residual < 1e-3);
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(dalembert_residual(run(cfg)), ValidationError);
}
