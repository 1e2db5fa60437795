#include "quasiblow/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "quasiblow/error.hpp"
#include "quasiblow/format.hpp"

namespace quasiblow {

std::string_view to_string(Direction d) { return d == Direction::plus ? "plus" : "minus"; }

TrajectoryInterpolator::TrajectoryInterpolator(const Trajectory& traj) : traj_(&traj) {
  if (traj.snapshots.empty()) throw ValidationError("trajectory has no snapshots");
  times_.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) times_.push_back(s.t);
}

double TrajectoryInterpolator::t_min() const { return times_.front(); }
double TrajectoryInterpolator::t_max() const { return times_.back(); }

std::size_t TrajectoryInterpolator::bracket(double t) const {
  if (times_.size() == 1) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(k, times_.size() - 2);
}

bool TrajectoryInterpolator::in_snapshot(std::size_t k, double x) const {
  const FieldState& s = traj_->snapshots[k];
  return x >= s.x_first() && x <= s.x_last();
}

bool TrajectoryInterpolator::contains(double t, double x) const {
  if (!(t >= t_min() && t <= t_max())) return false;
  const std::size_t k = bracket(t);
  if (!in_snapshot(k, x)) return false;
  return times_.size() == 1 || in_snapshot(k + 1, x);
}

TrajectoryInterpolator::Values TrajectoryInterpolator::at_snapshot(std::size_t k, double x) const {
  const FieldState& s = traj_->snapshots[k];
  if (!in_snapshot(k, x)) throw OutOfRangeError("interpolation point outside the snapshot");
  const std::size_t n = s.size();
  const double dx = s.grid.dx();
  // Position in units of cells relative to node 0.
  const double q = (x - s.x(0)) / dx;
  const auto left = static_cast<std::ptrdiff_t>(std::floor(q));
  const std::ptrdiff_t j0 =
      std::clamp<std::ptrdiff_t>(left - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
  double w[4];
  for (int a = 0; a < 4; ++a) {
    double num = 1.0;
    double den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= q - static_cast<double>(j0 + b);
      den *= static_cast<double>(a - b);
    }
    w[a] = num / den;
  }
  Values v;
  for (int a = 0; a < 4; ++a) {
    const auto j = static_cast<std::size_t>(j0 + a);
    v.R += w[a] * s.R[j];
    v.S += w[a] * s.S[j];
    v.u += w[a] * s.u[j];
  }
  v.c = traj_->config.model.c_unchecked(v.u);
  v.c_prime = traj_->config.model.c_prime_unchecked(v.u);
  return v;
}

TrajectoryInterpolator::Values TrajectoryInterpolator::at(double t, double x) const {
  if (!contains(t, x)) throw OutOfRangeError("interpolation point outside the trajectory footprint");
  const std::size_t k = bracket(t);
  if (times_.size() == 1) return at_snapshot(0, x);
  const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
  const Values a = at_snapshot(k, x);
  const Values b = at_snapshot(k + 1, x);
  Values v;
  v.R = (1.0 - w) * a.R + w * b.R;
  v.S = (1.0 - w) * a.S + w * b.S;
  v.u = (1.0 - w) * a.u + w * b.u;
  v.c = traj_->config.model.c_unchecked(v.u);
  v.c_prime = traj_->config.model.c_prime_unchecked(v.u);
  return v;
}

double CharCurve::max_ode_residual() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.ode_residual);
  return m;
}

double CharCurve::x_at(double t) const {
  if (points.empty()) throw OutOfRangeError("empty curve");
  if (t <= points.front().t) return points.front().x;
  if (t >= points.back().t) return points.back().x;
  auto it = std::lower_bound(points.begin(), points.end(), t,
                             [](const CurvePoint& p, double tt) { return p.t < tt; });
  const CurvePoint& b = *it;
  const CurvePoint& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return (1.0 - w) * a.x + w * b.x;
}

namespace {

double base_step(const Trajectory& traj) {
  double cmax = 0.0;
  for (const auto& s : traj.samples) cmax = std::max(cmax, s.max_c);
  if (!(cmax > 0.0)) cmax = traj.config.model.c0();
  const double dx = traj.snapshots.front().grid.dx();
  return traj.config.cfl * dx / cmax;
}

// Integrates from (t0, x0) towards the snapshot times in the given order,
// appending a point at every snapshot time reached. Returns false if the
// footprint was left before the last target.
bool sweep(const TrajectoryInterpolator& interp, double sign, double t0, double x0,
           const std::vector<double>& targets, double h_max, std::vector<CurvePoint>& out) {
  double t = t0;
  double x = x0;
  auto speed = [&](double tt, double xx) { return sign * interp.at(tt, xx).c; };
  for (double target : targets) {
    const double span = target - t;
    if (span == 0.0) continue;
    const auto steps = static_cast<std::size_t>(std::ceil(std::abs(span) / h_max));
    const double h = span / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t k = 0; k < std::max<std::size_t>(steps, 1); ++k) {
      const double t_next = (k + 1 == steps) ? target : t + h;
      const double k1 = speed(t, x);
      const double xp = x + h * k1;
      if (!interp.contains(t_next, xp)) return false;
      const double k2 = speed(t_next, xp);
      const double xn = x + 0.5 * h * (k1 + k2);
      if (!interp.contains(t_next, xn)) return false;
      t = t_next;
      x = xn;
    }
    CurvePoint p;
    p.t = t;
    p.x = x;
    out.push_back(p);
  }
  return true;
}

void fill_values(const TrajectoryInterpolator& interp, CurvePoint& p) {
  const auto v = interp.at(p.t, p.x);
  p.R = v.R;
  p.S = v.S;
  p.u = v.u;
  p.c = v.c;
}

}  // namespace

CharCurve trace_curve(const Trajectory& traj, double t0, double x0, Direction direction,
                      const TraceOptions& opt) {
  TrajectoryInterpolator interp(traj);
  if (!interp.contains(t0, x0))
    throw OutOfRangeError("trace_curve: anchor outside the trajectory footprint");
  const double sign = direction == Direction::plus ? 1.0 : -1.0;
  const double h_max = base_step(traj) * opt.step_fraction;

  CharCurve curve;
  curve.direction = direction;
  curve.t0 = t0;
  curve.x0 = x0;

  std::vector<CurvePoint> back;
  if (opt.backward) {
    std::vector<double> targets;
    for (auto it = interp.times().rbegin(); it != interp.times().rend(); ++it)
      if (*it < t0) targets.push_back(*it);
    curve.reached_start = sweep(interp, sign, t0, x0, targets, h_max, back);
  }
  std::vector<CurvePoint> fwd;
  if (opt.forward) {
    std::vector<double> targets;
    for (double tt : interp.times())
      if (tt > t0) targets.push_back(tt);
    curve.reached_end = sweep(interp, sign, t0, x0, targets, h_max, fwd);
  }
  if (t0 == interp.t_min()) curve.reached_start = true;
  if (t0 == interp.t_max()) curve.reached_end = true;

  curve.points.assign(back.rbegin(), back.rend());
  CurvePoint anchor;
  anchor.t = t0;
  anchor.x = x0;
  curve.points.push_back(anchor);
  curve.points.insert(curve.points.end(), fwd.begin(), fwd.end());
  for (auto& p : curve.points) fill_values(interp, p);
  return curve;
}

CharCurve trace_scaled_riemann(const Trajectory& traj, double t0, double x0, Direction direction,
                               const TraceOptions& opt) {
  CharCurve curve = trace_curve(traj, t0, x0, direction, opt);
  const double lambda = traj.config.lambda;
  const SpeedModel& model = traj.config.model;
  const bool plus = direction == Direction::plus;
  auto& pts = curve.points;
  std::vector<double> rhs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& p = pts[i];
    const double scale = std::pow(p.c, (lambda - 1.0) / 2.0);
    const double own = plus ? p.S : p.R;
    const double other = plus ? p.R : p.S;
    p.scaled_value = scale * own;
    const double cp = model.c_prime_unchecked(p.u);
    rhs[i] = cp * std::pow(p.c, (lambda - 3.0) / 2.0) / 4.0 *
             (lambda * own * own - (2.0 - lambda) * other * other);
  }
  // Three-point derivative on the (non-uniform) sample times, one-sided at the ends.
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n && n >= 2; ++i) {
    double deriv;
    if (i == 0 || i + 1 == n) {
      const std::size_t a = i == 0 ? 0 : n - 2;
      deriv = (pts[a + 1].scaled_value - pts[a].scaled_value) / (pts[a + 1].t - pts[a].t);
    } else {
      const double h1 = pts[i].t - pts[i - 1].t;
      const double h2 = pts[i + 1].t - pts[i].t;
      deriv = (-h2 / (h1 * (h1 + h2))) * pts[i - 1].scaled_value +
              ((h2 - h1) / (h1 * h2)) * pts[i].scaled_value +
              (h1 / (h2 * (h1 + h2))) * pts[i + 1].scaled_value;
    }
    pts[i].ode_residual = std::abs(deriv - rhs[i]);
  }
  return curve;
}

namespace {

// Trapezoid integral of f over [a, b] on the snapshot's nodes, with the
// partial end cells closed by interpolated end values.
template <class F>
double integrate_snapshot(const TrajectoryInterpolator& interp, std::size_t k, double a, double b,
                          F&& f) {
  if (!(b > a)) return 0.0;
  const FieldState& s = interp.trajectory().snapshots[k];
  const SpeedModel& model = interp.trajectory().config.model;
  auto node_value = [&](std::size_t i) {
    TrajectoryInterpolator::Values v;
    v.R = s.R[i];
    v.S = s.S[i];
    v.u = s.u[i];
    v.c = model.c_unchecked(v.u);
    v.c_prime = model.c_prime_unchecked(v.u);
    return f(v);
  };
  double prev_x = a;
  double prev_f = f(interp.at_snapshot(k, a));
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.x(i);
    if (x <= a) continue;
    if (x >= b) break;
    const double fx = node_value(i);
    total += 0.5 * (fx + prev_f) * (x - prev_x);
    prev_x = x;
    prev_f = fx;
  }
  total += 0.5 * (f(interp.at_snapshot(k, b)) + prev_f) * (b - prev_x);
  return total;
}

double abs_pow(double x, double p) { return std::pow(std::abs(x), p); }

}  // namespace

TriangleBalance triangle_balance(const Trajectory& traj, double apex_t, double apex_x) {
  TrajectoryInterpolator interp(traj);
  if (!interp.contains(apex_t, apex_x))
    throw OutOfRangeError("triangle_balance: apex outside the trajectory footprint");
  TraceOptions opt;
  opt.forward = false;
  const CharCurve left = trace_curve(traj, apex_t, apex_x, Direction::plus, opt);
  const CharCurve right = trace_curve(traj, apex_t, apex_x, Direction::minus, opt);
  if (!left.reached_start || !right.reached_start)
    throw OutOfRangeError("triangle exits grid");

  const double lambda = traj.config.lambda;
  const double p = 2.0 / lambda;
  TriangleBalance out;
  out.apex_t = apex_t;
  out.apex_x = apex_x;
  out.x1 = left.points.front().x;
  out.x2 = right.points.front().x;

  auto hyp = [&](const CharCurve& curve, bool use_R) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
      const auto& a = curve.points[i];
      const auto& b = curve.points[i + 1];
      const double fa = a.c * abs_pow(use_R ? a.R : a.S, p);
      const double fb = b.c * abs_pow(use_R ? b.R : b.S, p);
      total += 0.5 * (fa + fb) * (b.t - a.t);
    }
    return total;
  };
  out.hypotenuse_R = hyp(left, true);
  out.hypotenuse_S = hyp(right, false);

  auto density = [&](const TrajectoryInterpolator::Values& v) {
    return abs_pow(v.R, p) + abs_pow(v.S, p);
  };
  out.initial_term = 0.5 * integrate_snapshot(interp, 0, out.x1, out.x2, density);

  auto source = [&](const TrajectoryInterpolator::Values& v) {
    const double R = v.R;
    const double S = v.S;
    return (v.c_prime / v.c) * R * S * (R - S) * (abs_pow(R, p - 2.0) - abs_pow(S, p - 2.0));
  };
  // Time slices at the snapshots below the apex; the slice at the apex has zero width.
  double integral = 0.0;
  double prev_t = 0.0;
  double prev_f = 0.0;
  bool first = true;
  const auto& times = interp.times();
  for (std::size_t k = 0; k < times.size() && times[k] < apex_t; ++k) {
    const double f = integrate_snapshot(interp, k, left.x_at(times[k]), right.x_at(times[k]), source);
    if (!first) integral += 0.5 * (f + prev_f) * (times[k] - prev_t);
    prev_t = times[k];
    prev_f = f;
    first = false;
  }
  if (!first) integral += 0.5 * prev_f * (apex_t - prev_t);
  out.source_term = (1.0 / lambda) * (0.5 - lambda / 4.0) * integral;
  out.residual = out.lhs() - out.initial_term - out.source_term;
  return out;
}

void write_curve_csv(std::ostream& out, const CharCurve& curve) {
  out << "t,x,R,S,u,c,scaled_value,ode_residual\n";
  for (const auto& p : curve.points) {
    out << format_double(p.t) << ',' << format_double(p.x) << ',' << format_double(p.R) << ','
        << format_double(p.S) << ',' << format_double(p.u) << ',' << format_double(p.c) << ','
        << format_double(p.scaled_value) << ',' << format_double(p.ode_residual) << '\n';
  }
}

}  // namespace quasiblow
