#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quasiblow/companions.hpp"
#include "quasiblow/diagnostics.hpp"
#include "quasiblow/error.hpp"
#include "quasiblow/riccati.hpp"
#include "quasiblow/solver.hpp"

namespace quasiblow {

enum class ScenarioKind { simulate, sweep, riccati, carlemann, psystem, verify };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

// Malformed or invalid configuration document. `where` is "line L, column C"
// for syntax errors and the JSON pointer of the offending key otherwise.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : ValidationError(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct SweepAxes {
  std::vector<double> eps;
  std::vector<double> lambda;
  std::vector<std::size_t> n;
  // Grid bounds are multiples of eps (the data support scales with eps).
  bool grid_in_eps_units = false;
};

struct OutputSpec {
  bool timeseries = true;
  std::size_t timeseries_rows = 4000;  // 0 keeps every step
  std::size_t snapshots = 16;          // snapshot CSVs written per run, evenly spaced
  bool plots = true;
  bool curves = true;                  // characteristic curve CSV (theorem runs)
  bool cells = true;                   // per-cell artifacts for sweeps
};

struct RiccatiSpec {
  // Either explicit (a, y0, m) or the constants of (lambda, eps, model, profile).
  bool from_constants = false;
  double a = 1.0;
  double y0 = 1.0;
  double m = 0.0;
  std::size_t samples = 200;  // rows of riccati.csv
};

struct PsystemSpec {
  // Degeneracy preset: u0 = 0, int u1 = fraction * (-2/(a+1)). Replaces data and grid.
  std::optional<double> preset_fraction;
  double a = 1.0;
  std::size_t dalembert_snapshots = 8;
  std::size_t dalembert_points = 16;
};

struct VerifySpec {
  std::vector<std::string> suites{"algebraic", "riccati", "constants"};
  std::size_t samples = 100000;  // algebraic suite
  std::size_t sets = 100;        // riccati and constants suites
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::simulate;
  RunConfig run;
  CarlemannConfig carlemann;
  std::string carlemann_preset;  // "", "classical" or "original"
  SweepAxes axes;
  // Threshold multiples of the initial max norm for the 1/M extrapolation.
  std::vector<double> extrapolation_factors{1.25, 1.5, 1.75, 2.0};
  bool theorem = false;  // enforce the blow-up hypotheses on the data
  std::optional<std::string> expect_event;
  RiccatiSpec riccati;
  PsystemSpec psystem;
  VerifySpec verify;
  OutputSpec outputs;
  std::uint64_t seed = 20240607;
};

/// Parses and validates a JSON configuration. Unknown keys are rejected.
/// With "theorem": true the data must satisfy phi'(0) < 0, c'(0) > 0 and
/// lambda in (0, 1] (HypothesisError otherwise).
ScenarioSpec parse_config(std::string_view document);
ScenarioSpec load_config(const std::filesystem::path& path);

// The full configuration with every default filled in; parse_config of the
// result gives back the same spec.
std::string echo_config(const ScenarioSpec& spec);

// ---- sweeps ----

struct SweepCell {
  double lambda = 0.0;
  double eps = 0.0;
  std::size_t n = 0;
  TerminalEvent event = TerminalEvent::reached_t_max;
  double t_final = 0.0;
  std::size_t steps = 0;
  double initial_max_norm = 0.0;
  double resolved_time = 0.0;
  double sup_R = 0.0;    // up to the resolved time
  double lp_sum = 0.0;   // sup over t up to the resolved time
  double min_c = 0.0;    // over the whole run
  double max_c = 0.0;
  std::vector<double> crossing_times;  // per extrapolation factor (nan if not crossed)
  std::optional<double> t_extrapolated;
  std::optional<Constants> constants;
  std::vector<BoundReport> bounds;
  std::optional<ComparisonReport> comparison;
  double riccati_blowup = 0.0;  // T*_{b,eps}
  std::optional<SignReport> sign;
  std::string error;  // run or analysis failure, if any
  bool invalid = false;  // the cell configuration failed validation
};

struct SweepGroup {
  double lambda = 0.0;
  double eps = 0.0;
  std::optional<BlowupEstimate> estimate;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCell> cells;    // eps, then lambda, then n, ascending
  std::vector<SweepGroup> groups;  // per (eps, lambda), same order
  struct LambdaFits {
    double lambda = 0.0;
    std::optional<ScalingFit> sup_R;
    std::optional<ScalingFit> lp_sum;
    std::optional<double> t_est_ratio;  // max over eps / min over eps
    std::string error;
  };
  std::vector<LambdaFits> fits;
  std::string sweep_csv;
  std::string scaling_csv;
};

// Runs every cell of the sweep axes on up to `workers` threads. `on_cell` (if
// set) sees each finished trajectory before its snapshots are dropped; it is
// called from the worker threads.
using CellCallback = std::function<void(const SweepCell&, const Trajectory&)>;
SweepResult run_sweep(const ScenarioSpec& spec, std::size_t workers = 1,
                      const CellCallback& on_cell = {});

// The run configuration of one sweep cell.
RunConfig sweep_cell_config(const ScenarioSpec& spec, double lambda, double eps, std::size_t n);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

/// Runs the scenario and writes run.json plus the CSV/SVG artifacts.
/// Returns 0 on success, 2 on validation failure and 3 when a declared
/// expectation fails or the run breaks down.
int run_scenario(const ScenarioSpec& spec, const RunOptions& options);

}  // namespace quasiblow
