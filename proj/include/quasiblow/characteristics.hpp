#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "quasiblow/solver.hpp"

namespace quasiblow {

enum class Direction { plus, minus };

std::string_view to_string(Direction d);

/// Space-time interpolation of a stored trajectory: linear in t between
/// snapshots, 4-point Lagrange in x within a snapshot. Positions are
/// physical (snapshot offsets of moving-frame runs are accounted for).
class TrajectoryInterpolator {
 public:
  explicit TrajectoryInterpolator(const Trajectory& traj);

  struct Values {
    double R = 0.0;
    double S = 0.0;
    double u = 0.0;
    double c = 0.0;
    double c_prime = 0.0;
  };

  double t_min() const;
  double t_max() const;
  // Physical x-range covered by every snapshot used at time t.
  bool contains(double t, double x) const;
  Values at(double t, double x) const;
  // Values of snapshot k at x (x must lie in the snapshot's range).
  Values at_snapshot(std::size_t k, double x) const;
  const std::vector<double>& times() const { return times_; }
  const Trajectory& trajectory() const { return *traj_; }

 private:
  std::size_t bracket(double t) const;
  bool in_snapshot(std::size_t k, double x) const;

  const Trajectory* traj_;
  std::vector<double> times_;
};

struct CurvePoint {
  double t = 0.0;
  double x = 0.0;
  double R = 0.0;
  double S = 0.0;
  double u = 0.0;
  double c = 0.0;
  double scaled_value = 0.0;  // c^((lambda-1)/2) S (plus) or c^((lambda-1)/2) R (minus)
  double ode_residual = 0.0;  // |d/dt scaled_value - right-hand side|
};

struct CharCurve {
  Direction direction = Direction::plus;
  double t0 = 0.0;
  double x0 = 0.0;
  std::vector<CurvePoint> points;  // increasing t
  bool reached_start = false;     // backward trace got to the first snapshot
  bool reached_end = false;       // forward trace got to the last snapshot
  double max_ode_residual() const;
  // Position at time t by linear interpolation of the stored points.
  double x_at(double t) const;
};

struct TraceOptions {
  // Substeps per solver-sized time step; the RK2 step is about
  // cfl dx / max c of the run divided by this.
  double step_fraction = 1.0;
  bool forward = true;
  bool backward = true;
};

/// Integrates dx/dt = +-c(u) with Heun's RK2 through the stored trajectory,
/// forward and backward from the anchor until the footprint is left.
/// Points are stored at the anchor and at every snapshot time crossed.
/// Throws OutOfRangeError if the anchor lies outside the footprint.
CharCurve trace_curve(const Trajectory& traj, double t0, double x0, Direction direction,
                      const TraceOptions& opt = {});

/// trace_curve plus the scaled Riemann variable along the curve and the
/// residual of its ODE, d/dt s = (c' c^((lambda-3)/2) / 4)(lambda S^2 - (2-lambda) R^2)
/// (R and S swapped for the minus direction).
CharCurve trace_scaled_riemann(const Trajectory& traj, double t0, double x0, Direction direction,
                               const TraceOptions& opt = {});

struct TriangleBalance {
  double apex_t = 0.0;
  double apex_x = 0.0;
  double x1 = 0.0;  // foot of the backward plus curve
  double x2 = 0.0;  // foot of the backward minus curve
  double hypotenuse_R = 0.0;  // int_{x1}^{x} |R|^p along the plus curve
  double hypotenuse_S = 0.0;  // int_{x}^{x2} |S|^p along the minus curve
  double initial_term = 0.0;  // 1/2 int_{x1}^{x2} (|R|^p + |S|^p)(0, y) dy
  double source_term = 0.0;   // (1/lambda)(1/2 - lambda/4) times the interior integral
  double residual = 0.0;      // hypotenuses - initial_term - source_term
  double lhs() const { return hypotenuse_R + hypotenuse_S; }
};

/// Balance of |R|^p, |S|^p (p = 2/lambda) over the characteristic triangle
/// below the apex. Throws OutOfRangeError("triangle exits grid") when a
/// backward curve leaves the footprint before t = 0.
TriangleBalance triangle_balance(const Trajectory& traj, double apex_t, double apex_x);

// CSV with columns t,x,R,S,u,c,scaled_value,ode_residual.
void write_curve_csv(std::ostream& out, const CharCurve& curve);

}  // namespace quasiblow
