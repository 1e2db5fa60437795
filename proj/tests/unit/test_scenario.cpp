#include <cmath>

#include "doctest.h"

#include "quasiblow/scenario.hpp"

using namespace quasiblow;

TEST_CASE("configuration defaults and echo round-trip") {
  const ScenarioSpec s = parse_config(R"({"kind": "simulate", "lambda": 0.5, "eps": 0.2,
    "grid": {"x_min": -1, "x_max": 1, "n": 128}, "cfl": 0.5, "t_max": 0.5})");
  CHECK(s.kind == ScenarioKind::simulate);
  CHECK(s.run.lambda == 0.5);
  CHECK(s.run.grid.n == 128);
  CHECK(s.run.model.family() == SpeedFamily::power);
  const ScenarioSpec again = parse_config(echo_config(s));
  CHECK(echo_config(again) == echo_config(s));
}

TEST_CASE("configuration errors name their location") {
  try {
    parse_config(R"({"kind": "riccati", "riccati": {"a": 1, "y00": 2}})");
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(e.where() == "/riccati/y00");
  }
  try {
    parse_config("{\n  \"kind\": }");
    FAIL("accepted a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.where().rfind("line 2", 0) == 0);
  }
  CHECK_THROWS_AS(parse_config(R"({"kind": "simulate"})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "psystem", "lambda": 1,
    "grid": {"x_min": -3, "x_max": 3, "n": 256}, "cfl": 0.5, "t_max": 1})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "simulate", "lambda": 1.5, "eps": 0.1, "theorem": true,
    "grid": {"x_min": -1, "x_max": 1, "n": 64}, "cfl": 0.5, "t_max": 0.1})"),
                  HypothesisError);
}

TEST_CASE("sweep cells scale the grid with eps") {
  const ScenarioSpec s = parse_config(R"({"kind": "sweep",
    "grid": {"x_min": -2, "x_max": 2, "n": 64}, "cfl": 0.8, "t_max": 14,
    "frame": {"track_peak": true}, "check_domain_of_dependence": false,
    "sweep": {"eps": [0.4, 0.2], "lambda": [1], "n": [64], "grid_in_eps_units": true}})");
  CHECK(s.axes.eps.front() == 0.2);  // sorted
  const RunConfig c = sweep_cell_config(s, 1.0, 0.2, 64);
  CHECK(c.grid.x_min == doctest::Approx(-0.4));
  CHECK(c.grid.x_max == doctest::Approx(0.4));
  CHECK(c.blowup_factor == doctest::Approx(2.0));
}

TEST_CASE("a small sweep is deterministic across worker counts") {
  const ScenarioSpec s = parse_config(R"({"kind": "sweep",
    "grid": {"x_min": -2, "x_max": 2, "n": 64}, "cfl": 0.8, "t_max": 14,
    "frame": {"track_peak": true}, "check_domain_of_dependence": false, "theorem": true,
    "sweep": {"eps": [0.4, 0.3, 0.2], "lambda": [1], "n": [128, 256], "grid_in_eps_units": true}})");
  const SweepResult a = run_sweep(s, 1);
  const SweepResult b = run_sweep(s, 3);
  CHECK(a.cells.size() == 6);
  CHECK(a.groups.size() == 3);
  CHECK(a.sweep_csv == b.sweep_csv);
  CHECK(a.scaling_csv == b.scaling_csv);
  CHECK(a.sweep_csv.rfind("eps,lambda,n,event,", 0) == 0);
  for (const auto& c : a.cells) CHECK(c.event == TerminalEvent::blowup_threshold_crossed);
}
