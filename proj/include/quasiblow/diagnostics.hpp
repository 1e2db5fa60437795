#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasiblow/riccati.hpp"
#include "quasiblow/solver.hpp"

namespace quasiblow {

struct BoundReport {
  std::string id;
  double left = 0.0;
  double right = 0.0;
  double margin = 0.0;  // right - left
  double tolerance = 0.0;
  bool pass = true;  // margin >= -tolerance
};

BoundReport make_bound(std::string id, double left, double right, double tolerance);

struct ScalingFit {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  double slope = 0.0;
  double intercept = 0.0;  // of log(ordinate) = intercept + slope log(abscissa)
  double residual = 0.0;   // rms in log space
};

// Least-squares line through (log x, log y). Needs >= 3 distinct positive x
// and positive y; throws ValidationError otherwise.
ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Trapezoid-rule int |R|^p dx and int |S|^p dx.
std::pair<double, double> lp_norms(const FieldState& state, double p);

// int u_t^2 + c^2 u_x^2 dx = 1/2 int R^2 + S^2 dx (trapezoid rule).
double energy(const FieldState& state, const SpeedModel& model);

// max over samples with t <= t_limit of |E(t) + E_out(t) - E(0)| / E(0), where
// E_out is the energy carried out through the grid boundaries.
double energy_drift(const Trajectory& traj, double t_limit);

// |(R-S)(|R|^p-|S|^p) - (R-S)^2(|R|^(p-2)R + |S|^(p-2)S) - RS(R-S)(|R|^(p-2)-|S|^(p-2))|
double key_identity_residual(double R, double S, double p);

// 4(|R|^p+|S|^p) - |S||R-S|||R|^(p-2)-|S|^(p-2)|
double key_inequality_margin(double R, double S, double p);

// lp_sum(t) <= lp_sum(0) exp(C t) with C = (2/lambda)(2-lambda) sup|R| sup|c'/c|
// over the recorded samples. Reports the worst sample.
BoundReport gronwall_check(const Trajectory& traj);

struct BalanceSeries {
  std::vector<double> t;         // midpoints of consecutive snapshot pairs
  std::vector<double> residual;  // (1/p)(d/dt int Q - boundary flux) - int source
  std::vector<double> residual_difference;  // same for |S|^p - |R|^p with flux c Q
  double max_abs() const;
  double max_abs_difference() const;
  // int |residual| dt over the series.
  double l1() const;
  double l1_difference() const;
};

// Space-integrated residual of the balance law for Q = |R|^p + |S|^p,
//   (1/p)(Q_t - (c(|R|^p - |S|^p))_x) = (1/2 - lambda/4)(c'/c) RS(R-S)(|R|^(p-2) - |S|^(p-2)),
// and of its difference form, per pair of consecutive snapshots (boundary
// fluxes included, moving frames handled). Throws ValidationError with fewer
// than three snapshots.
BalanceSeries balance_residual(const Trajectory& traj, double p);

// Pointwise right-hand sides of the two balance laws (divided by p).
double balance_source(double R, double S, double c, double c_prime, double lambda, double p);
double balance_source_difference(double R, double S, double c, double c_prime, double lambda,
                                 double p);

// sup|R| vs cstar1 t_b^(1-lambda) eps^lambda, sup lp_sum vs (hypotenuse bound) eps,
// c range vs [c0/2, 2 c0] (left = max(max c / c0, c0 / min c), right = 2).
std::vector<BoundReport> theorem_bounds_check(const Trajectory& traj, const Constants& k,
                                              double eps);

struct SignReport {
  double t = 0.0;
  double x = 0.0;
  double R = 0.0;
  double S = 0.0;
  double u_t = 0.0;
  double u_x = 0.0;
  int sign_u_t = 0;
  int sign_u_x = 0;
  char driver = 'S';  // family carrying the larger magnitude
};

// Signs of u_t and u_x at the max(|R|,|S|) cell of the final snapshot.
// Throws NoBlowupError unless the run ended on the blow-up threshold.
SignReport blowup_sign_monitor(const Trajectory& traj);

// max over snapshots of max(R, S), divided by max|S(0)|.
double sign_preservation_excess(const Trajectory& traj);

struct HolderReport {
  double t = 0.0;       // snapshot used
  double x_peak = 0.0;  // max |S| location
  ScalingFit spatial;
  std::optional<ScalingFit> temporal;
};

// Modulus of continuity of u at dyadic scales h = 4dx, 8dx, ... up to an eighth
// of the data support, fitted on log-log axes. Uses the last snapshot inside
// [window_begin, window_end] that is still resolved. The temporal fit (if
// enough snapshots exist) uses |u(t) - u(t - tau)| at x_peak.
// Throws ResolutionError with fewer than 4 usable scales.
HolderReport holder_exponent(const Trajectory& traj, double window_begin, double window_end);

ScalingFit epsilon_scaling_fit(const std::vector<std::pair<double, double>>& sweep);

// Trapezoid-rule int_{t1}^{t2} |R|^p + |S|^p at fixed x. Throws OutOfRangeError
// if the segment leaves the trajectory.
double temporal_lp_at_point(const Trajectory& traj, double x, double t1, double t2, double p);

}  // namespace quasiblow
