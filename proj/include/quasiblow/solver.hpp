#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "quasiblow/coeffs.hpp"
#include "quasiblow/state.hpp"

namespace quasiblow {

enum class TerminalEvent { reached_t_max, blowup_threshold_crossed, degeneracy, nonfinite_value };

std::string_view to_string(TerminalEvent event);

// Value of an incoming family outside the grid: zero (nothing enters from
// outside, right for compactly supported data) or the edge value repeated
// (right for spatially uniform data).
enum class BoundaryKind { quiescent, extrapolate };

std::string_view to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(std::string_view name);

/// Initial data: either the scaled family u0 = eps phi(x/eps), u1 = -c(u0) u0_x
/// (kind scaled_profile) or generic Cauchy data u0 = A0 phi0(x), u1 = A1 phi1(x).
struct InitialData {
  enum class Kind { scaled_profile, primitive };

  Kind kind = Kind::scaled_profile;
  ProfileModel profile = ProfileModel::bump_x();
  ProfileModel u0 = ProfileModel::bump_x();
  double u0_amplitude = 0.0;
  ProfileModel u1 = ProfileModel::bump_x();
  double u1_amplitude = 0.0;

  // Support of the data in x (already scaled by eps for scaled_profile).
  std::pair<double, double> support(double eps) const;
};

struct RunConfig {
  double lambda = 1.0;
  double eps = 0.1;
  SpeedModel model = SpeedModel::power(1.0);
  InitialData data;
  Grid1D grid;
  double cfl = 0.4;
  double t_max = 1.0;
  // Absolute threshold; when unset, blowup_factor times the initial max norm.
  std::optional<double> blowup_threshold;
  double blowup_factor = 1e6;
  // Snapshot cadence in steps; 0 picks roughly 256 snapshots over t_max.
  std::size_t record_every = 0;
  // Extra snapshot whenever max(|R|,|S|) grows by this factor since the last one (0 disables).
  double snapshot_growth = 1.25;
  int scheme_order = 2;
  // Velocity of the computational frame: the grid is translated with x -> x + v t.
  // 0 is the lab frame. With v = c(0) the right-moving S pulse stays nearly at rest
  // on the grid. For v > 0 the left-moving family may leave through the left
  // boundary; what leaves is accumulated in DiagnosticSample::*_outflow.
  double frame_velocity = 0.0;
  // Move the frame with c(u) at the cell of largest S instead, updated every step
  // (frame_velocity is then ignored). Keeps a right-moving blow-up point at rest on
  // the grid, where the limiter clips it least.
  bool track_peak = false;
  BoundaryKind boundary = BoundaryKind::quiescent;
  // Reject grids whose boundary lies inside the domain of dependence of the data before t_max
  // (in a moving frame only the right-moving family is required to stay on the grid).
  bool check_domain_of_dependence = true;
  // Count steps violating the explicit source growth bound (debug aid).
  bool check_growth_bound = false;

  void validate() const;
  // lambda in (0, 1] with the scaled data family: the setting of the blow-up theorem.
  bool theorem_scenario() const;
  double lp_exponent() const { return 2.0 / lambda; }
};

FieldState initial_state(const RunConfig& cfg);

struct DiagnosticSample {
  double t = 0.0;
  double dt = 0.0;
  double max_abs_R = 0.0;
  double max_abs_S = 0.0;
  double lp_sum = 0.0;  // int |R|^p + |S|^p dx, p = 2/lambda
  double min_c = 0.0;
  double max_c = 0.0;
  double energy = 0.0;
  // Cumulative amounts of lp_sum and energy carried out through the boundaries.
  double lp_outflow = 0.0;
  double energy_outflow = 0.0;
  double max_abs_dlogc = 0.0;  // sup |c'/c|
  double max_abs_R_jump = 0.0;  // max_i |R_{i+1} - R_i|
  double max_abs_S_jump = 0.0;
};

struct Trajectory {
  RunConfig config;
  std::vector<FieldState> snapshots;
  std::vector<DiagnosticSample> samples;
  TerminalEvent event = TerminalEvent::reached_t_max;
  double t_final = 0.0;
  std::size_t steps = 0;
  double initial_max_norm = 0.0;
  double threshold = 0.0;
  std::size_t growth_bound_violations = 0;

  const FieldState& initial() const { return snapshots.front(); }
  const FieldState& final() const { return snapshots.back(); }
  // Time up to which the solution is resolved on the grid (see resolved_horizon).
  double resolved_time(double max_jump_ratio = kResolvedJumpRatio) const;

  static constexpr double kResolvedJumpRatio = 0.25;
};

/// Advance one step of size cfl dx / max c(u): SSP-RK2 with minmod slopes
/// (order 2) or forward Euler with first-order upwinding (order 1).
/// Throws DomainError on degeneracy and Error on non-finite output.
FieldState step(const FieldState& state, const RunConfig& cfg, double* dt_used = nullptr);

Trajectory run(const RunConfig& cfg);

// Snapshot-space helpers shared by the diagnostics.
DiagnosticSample sample_state(const FieldState& state, const SpeedModel& model, double lambda,
                              double dt);

// First time the sample series reaches max(|R|,|S|) >= level; 1/max is
// interpolated linearly between samples (Riccati growth makes it ~ linear in t).
std::optional<double> crossing_time(const Trajectory& traj, double level);

struct BlowupEstimate {
  bool blew_up = false;
  std::vector<double> thresholds;          // absolute levels
  std::vector<std::size_t> grid_sizes;     // n per refinement
  std::vector<std::vector<double>> crossing_times;  // [refinement][threshold]
  std::vector<double> extrapolated;        // T* per refinement (fit vs 1/M)
  double t_star = 0.0;                     // finest-grid extrapolation
  double refinement_spread = 0.0;          // |T_fine - T_coarse| / T_fine, last two grids
  double fit_residual = 0.0;               // rms residual of the finest fit
  std::vector<TerminalEvent> events;
};

// Fit T = T* - K / M over the given (M, T) pairs; returns {T*, K, rms residual}.
struct InverseThresholdFit {
  double t_star;
  double slope;
  double residual;
};
InverseThresholdFit fit_inverse_threshold(const std::vector<double>& levels,
                                          const std::vector<double>& times);

/// Runs the configuration on grids n, 2n, 4n, ... and extrapolates the first
/// crossing times of the given thresholds (multiples of the initial max norm)
/// to M -> infinity. Throws NoBlowupError if the finest run reaches t_max.
BlowupEstimate estimate_blowup_time(const RunConfig& cfg, const std::vector<double>& threshold_factors,
                                    std::size_t refinements, std::size_t workers = 1);

// Same extrapolation from trajectories that were already computed (ordered coarse to fine).
BlowupEstimate estimate_blowup_time(const std::vector<const Trajectory*>& runs,
                                    const std::vector<double>& threshold_factors);

// Columns t,dt,max_abs_R,max_abs_S,lp_sum,min_c,max_c,energy. With max_rows > 0
// every k-th sample is written (plus the last) so that at most about max_rows rows remain.
void write_timeseries_csv(std::ostream& out, const Trajectory& traj, std::size_t max_rows = 0);

}  // namespace quasiblow
