#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasiblow/solver.hpp"

namespace quasiblow {

// ---- Generalized Carlemann system ----
//   R_t - R_x = a1 R^2 + b1 R S + c1 S^2
//   S_t + S_x = a2 S^2 + b2 R S + c2 R^2

// Initial profile: amplitude * phi(x), or the constant amplitude when uniform.
struct CarlemannProfile {
  bool uniform = false;
  double amplitude = 0.0;
  ProfileModel profile = ProfileModel::bump_x();

  double value(double x) const { return uniform ? amplitude : amplitude * profile.value(x); }
};

struct CarlemannConfig {
  double a1 = 0.0, b1 = 0.0, c1 = 0.0;
  double a2 = 0.0, b2 = 0.0, c2 = 0.0;
  CarlemannProfile R0;
  CarlemannProfile S0;
  Grid1D grid;
  double cfl = 0.4;
  double t_max = 1.0;
  std::optional<double> blowup_threshold;
  double blowup_factor = 1e6;
  int scheme_order = 2;
  std::size_t record_every = 0;

  // R_t - R_x = S^2 - R^2, S_t + S_x = R^2 - S^2.
  static CarlemannConfig classical();
  // a1 = a2 = 1, b1 = b2 = 0, c1 = c2 = -1.
  static CarlemannConfig original();

  void validate() const;
  // The equivalent solver configuration (c = 1, lambda = 1, u unused).
  RunConfig as_run_config() const;
};

FieldState carlemann_initial_state(const CarlemannConfig& cfg);

/// Upwind transport at speeds -1 (R) and +1 (S) with the quadratic sources,
/// using the solver's scheme and event model. u stays identically 0.
Trajectory carlemann_run(const CarlemannConfig& cfg);

// ---- lambda = 2: p-system and Riemann invariants ----

struct PsystemState {
  Grid1D grid;
  std::vector<double> u;
  std::vector<double> u_t;
  double a = 1.0;  // c(u) = (1+u)^a
  std::vector<double> w_plus;
  std::vector<double> w_minus;

  static PsystemState from_field(const FieldState& s, double a);
};

// w+- = (1+u)^(a+1)/(a+1) +- int_{x_min}^x u_t (trapezoid from the left grid edge).
// Throws ValidationError for a = -1 and DomainError where 1+u <= 0.
std::pair<std::vector<double>, std::vector<double>> riemann_invariants(const PsystemState& state);

// u = ((a+1)(w+ + w-)/2)^(1/(a+1)) - 1.
std::vector<double> u_from_invariants(const std::vector<double>& w_plus,
                                      const std::vector<double>& w_minus, double a);

struct DalembertReport {
  double max_residual = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // points whose backward characteristics left the grid
};

/// max over sample points (t, x) of |2(1+u)^(a+1)/(a+1) - w+(0, x-(0)) - w-(0, x+(0))|,
/// where x-+(0) are the feet of the backward characteristics. w+ is constant
/// along dx/dt = -c and w- along dx/dt = +c, so the two feet enter with a sum.
/// Samples up to `points_per_snapshot` x positions on `snapshots` snapshots.
/// Throws ValidationError unless lambda = 2 with a power model and
/// OutOfRangeError("triangle exits grid") if no sample can be traced.
DalembertReport dalembert_residual(const Trajectory& traj, std::size_t snapshots = 8,
                                   std::size_t points_per_snapshot = 16);

// ---- Degeneracy threshold ----

struct DegeneracyReport {
  double a = 1.0;
  double integral_u1 = 0.0;     // int u_t(0, x) dx
  double threshold = 0.0;       // -2 int_{-1}^0 c(theta) d theta
  double threshold_closed = 0.0;  // -2/(a+1)
  bool below_threshold = false;
  double initial_min_one_plus_u = 0.0;
  double min_one_plus_u = 0.0;  // over all snapshots
  bool degenerated = false;     // run ended in the degeneracy event
  bool declining = false;       // min(1+u) non-increasing over the last half of the run
  bool consistent = false;      // outcome agrees with the side of the threshold
  std::vector<std::string> hypothesis_notes;
};

/// Hypothesis violations (model, a <= 0, lambda != 2, positive R or S at t = 0)
/// are listed in hypothesis_notes rather than thrown.
DegeneracyReport degeneracy_monitor(const Trajectory& traj, double a);

/// Scenario presets: u0 = 0 and u1 = -A exp(1/(y^2-1)) on [-1, 1], with A set
/// so that int u1 = fraction * (-2/(a+1)). fraction < 1 stays above the
/// threshold, fraction > 1 goes below it.
RunConfig degeneracy_preset(double a, double fraction, std::size_t n = 2048, double t_max = 4.0);
RunConfig degeneracy_preset_above(double a = 1.0);
RunConfig degeneracy_preset_below(double a = 1.0);

}  // namespace quasiblow
