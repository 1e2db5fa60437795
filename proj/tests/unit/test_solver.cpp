#include <cmath>
#include <limits>

#include "doctest.h"

#include "quasiblow/error.hpp"
#include "quasiblow/solver.hpp"

using namespace quasiblow;

namespace {

RunConfig transport_config(std::size_t n) {
  RunConfig cfg;
  cfg.lambda = 1.0;
  cfg.eps = 0.25;
  cfg.model = SpeedModel::affine(1.0, 0.0);
  cfg.grid = {-1.0, 1.0, n};
  cfg.t_max = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("constant speed translates S to the right and keeps R = 0") {
  // S(t, x) = -2 c phi'((x - t) / eps); the error at least halves with dx.
  const ProfileModel phi = ProfileModel::bump_x();
  std::vector<double> err;
  for (std::size_t n : {1024u, 2048u}) {
    const Trajectory tr = run(transport_config(n));
    CHECK(tr.event == TerminalEvent::reached_t_max);
    CHECK(tr.t_final == doctest::Approx(0.5));
    const FieldState& fin = tr.final();
    double e = 0.0, max_R = 0.0;
    for (std::size_t i = 0; i < fin.size(); ++i) {
      e = std::max(e, std::abs(fin.S[i] + 2.0 * phi.derivative((fin.x(i) - fin.t) / 0.25)));
      max_R = std::max(max_R, std::abs(fin.R[i]));
    }
    CHECK(max_R < 1e-14);
    err.push_back(e);
  }
  CHECK(err[0] < 0.15);
  CHECK(err[0] / err[1] > 1.9);
}

TEST_CASE("one step matches a manual forward step at the CFL limit") {
  RunConfig cfg = transport_config(64);
  cfg.cfl = 0.5;
  const FieldState s0 = initial_state(cfg);
  double dt = 0.0;
  const FieldState s1 = step(s0, cfg, &dt);
  CHECK(dt == doctest::Approx(0.5 * cfg.grid.dx()));
  CHECK(s1.t == doctest::Approx(dt));
  CHECK(s1.all_finite());
}

TEST_CASE("frames converge to the same solution") {
  // The lab frame clips the moving S peak more, so it converges from below.
  auto peak = [](std::size_t n, bool track) {
    RunConfig cfg;
    cfg.lambda = 1.0;
    cfg.eps = 0.25;
    cfg.grid = {-1.5, 1.5, n};
    cfg.t_max = 0.4;
    cfg.track_peak = track;
    cfg.check_domain_of_dependence = false;
    const Trajectory tr = run(cfg);
    if (track) CHECK(tr.final().x_offset > 0.3);
    return tr.samples.back().max_abs_S;
  };
  const double lab_fine = peak(8192, false);
  const double track_coarse = peak(2048, true);
  const double track_fine = peak(8192, true);
  CHECK(track_coarse == doctest::Approx(track_fine).epsilon(2e-3));
  CHECK(lab_fine == doctest::Approx(track_fine).epsilon(1e-2));
  CHECK(std::abs(peak(2048, false) - track_fine) > std::abs(lab_fine - track_fine));
}

TEST_CASE("blow-up threshold ends the run") {
  RunConfig cfg;
  cfg.lambda = 1.0;
  cfg.eps = 0.4;
  cfg.grid = {-0.8, 0.8, 512};
  cfg.t_max = 20.0;
  cfg.cfl = 0.8;
  cfg.track_peak = true;
  cfg.check_domain_of_dependence = false;
  cfg.blowup_factor = 1.5;
  const Trajectory tr = run(cfg);
  CHECK(tr.event == TerminalEvent::blowup_threshold_crossed);
  CHECK(tr.threshold == doctest::Approx(1.5 * tr.initial_max_norm));
  const auto t = crossing_time(tr, 1.25 * tr.initial_max_norm);
  REQUIRE(t.has_value());
  CHECK(*t < tr.t_final);
  CHECK_FALSE(crossing_time(tr, 10.0 * tr.initial_max_norm).has_value());
}

TEST_CASE("the inverse-threshold fit is exact for T = T* - K/M") {
  const std::vector<double> M{2.0, 3.0, 4.0, 5.0};
  std::vector<double> T;
  for (double m : M) T.push_back(5.0 - 1.5 / m);
  const auto fit = fit_inverse_threshold(M, T);
  CHECK(fit.t_star == doctest::Approx(5.0));
  CHECK(fit.slope == doctest::Approx(1.5));
  CHECK(fit.residual < 1e-12);
}

TEST_CASE("invalid run configurations") {
  RunConfig cfg = transport_config(64);
  cfg.cfl = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = transport_config(64);
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = transport_config(64);
  cfg.t_max = 5.0;  // the pulse reaches the edge
  CHECK_THROWS_AS(initial_state(cfg), ValidationError);
  CHECK(boundary_kind_from_string("extrapolate") == BoundaryKind::extrapolate);
  CHECK_THROWS_AS(boundary_kind_from_string("periodic"), ValidationError);
}
