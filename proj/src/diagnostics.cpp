#include "quasiblow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "quasiblow/characteristics.hpp"
#include "quasiblow/error.hpp"

namespace quasiblow {

namespace {

double apow(double x, double p) { return std::pow(std::abs(x), p); }

// Trapezoid rule on the uniform grid of a snapshot.
template <class F>
double trapezoid(const FieldState& s, F&& f) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    total += w * f(i);
  }
  return total * s.grid.dx();
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

BoundReport make_bound(std::string id, double left, double right, double tolerance) {
  BoundReport b;
  b.id = std::move(id);
  b.left = left;
  b.right = right;
  b.margin = right - left;
  b.tolerance = tolerance;
  b.pass = b.margin >= -tolerance;
  return b;
}

ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("loglog_fit: length mismatch");
  if (x.size() < 3) throw ValidationError("loglog_fit: needs at least 3 points");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() != x.size()) throw ValidationError("loglog_fit: abscissae must be distinct");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ValidationError("loglog_fit: values must be positive");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  ScalingFit fit;
  fit.abscissae = x;
  fit.ordinates = y;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::pair<double, double> lp_norms(const FieldState& state, double p) {
  if (!(p >= 1.0)) throw ValidationError("lp_norms: p must be >= 1");
  return {trapezoid(state, [&](std::size_t i) { return apow(state.R[i], p); }),
          trapezoid(state, [&](std::size_t i) { return apow(state.S[i], p); })};
}

double energy(const FieldState& state, const SpeedModel&) {
  return 0.5 * trapezoid(state, [&](std::size_t i) {
           return state.R[i] * state.R[i] + state.S[i] * state.S[i];
         });
}

double energy_drift(const Trajectory& traj, double t_limit) {
  if (traj.samples.empty()) throw ValidationError("energy_drift: empty trajectory");
  const double e0 = traj.samples.front().energy;
  if (!(e0 > 0.0)) throw ValidationError("energy_drift: zero initial energy");
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    if (s.t > t_limit) break;
    worst = std::max(worst, std::abs(s.energy + s.energy_outflow - e0) / e0);
  }
  return worst;
}

double key_identity_residual(double R, double S, double p) {
  const double d = R - S;
  const double lhs = d * (apow(R, p) - apow(S, p)) -
                     d * d * (apow(R, p - 2.0) * R + apow(S, p - 2.0) * S);
  const double rhs = R * S * d * (apow(R, p - 2.0) - apow(S, p - 2.0));
  return std::abs(lhs - rhs);
}

double key_inequality_margin(double R, double S, double p) {
  return 4.0 * (apow(R, p) + apow(S, p)) -
         std::abs(S) * std::abs(R - S) * std::abs(apow(R, p - 2.0) - apow(S, p - 2.0));
}

BoundReport gronwall_check(const Trajectory& traj) {
  const double lambda = traj.config.lambda;
  double sup_R = 0.0;
  double sup_dlogc = 0.0;
  for (const auto& s : traj.samples) {
    sup_R = std::max(sup_R, s.max_abs_R);
    sup_dlogc = std::max(sup_dlogc, s.max_abs_dlogc);
  }
  const double rate = (2.0 / lambda) * (2.0 - lambda) * sup_R * sup_dlogc;
  const double lp0 = traj.samples.front().lp_sum;
  const double tol = 1e-9 + 1e-6 * lp0;
  BoundReport worst = make_bound("gronwall", lp0, lp0, tol);
  for (const auto& s : traj.samples) {
    const double t = s.t - traj.samples.front().t;
    BoundReport b = make_bound("gronwall", s.lp_sum, lp0 * std::exp(rate * t), tol);
    if (b.margin < worst.margin) worst = b;
  }
  return worst;
}

double BalanceSeries::max_abs() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double BalanceSeries::max_abs_difference() const {
  double m = 0.0;
  for (double r : residual_difference) m = std::max(m, std::abs(r));
  return m;
}

namespace {

double series_l1(const std::vector<double>& t, const std::vector<double>& r) {
  // Each residual belongs to one snapshot interval; t holds the midpoints.
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double width;
    if (r.size() == 1) {
      width = 0.0;
    } else if (i == 0) {
      width = t[1] - t[0];
    } else if (i + 1 == r.size()) {
      width = t[i] - t[i - 1];
    } else {
      width = 0.5 * (t[i + 1] - t[i - 1]);
    }
    total += std::abs(r[i]) * width;
  }
  return total;
}

}  // namespace

double BalanceSeries::l1() const { return series_l1(t, residual); }
double BalanceSeries::l1_difference() const { return series_l1(t, residual_difference); }

double balance_source(double R, double S, double c, double c_prime, double lambda, double p) {
  return (0.5 - 0.25 * lambda) * (c_prime / c) * R * S * (R - S) *
         (apow(R, p - 2.0) - apow(S, p - 2.0));
}

double balance_source_difference(double R, double S, double c, double c_prime, double lambda,
                                 double p) {
  const double k = 0.25 * c_prime / c;
  const double fR = k * (lambda * R * R + 2.0 * (1.0 - lambda) * R * S - (2.0 - lambda) * S * S);
  const double fS = k * (lambda * S * S + 2.0 * (1.0 - lambda) * R * S - (2.0 - lambda) * R * R);
  const double c_x = c_prime * (R - S) / (2.0 * c);
  return apow(S, p - 2.0) * S * fS - apow(R, p - 2.0) * R * fR +
         c_x * (apow(R, p) + apow(S, p)) / p;
}

BalanceSeries balance_residual(const Trajectory& traj, double p) {
  if (traj.snapshots.size() < 3)
    throw ValidationError("balance_residual: needs at least two snapshot pairs");
  const SpeedModel& model = traj.config.model;
  const double lambda = traj.config.lambda;

  struct Slice {
    double q = 0.0, d = 0.0;  // int Q, int (|S|^p - |R|^p)
    double jump_q = 0.0, jump_p = 0.0;  // [Q], [P]: right edge minus left edge
    double jump_cq = 0.0, jump_cp = 0.0;
    double src = 0.0, src_d = 0.0;
  };
  auto slice = [&](const FieldState& s) {
    Slice out;
    const std::size_t n = s.size();
    std::vector<double> c(n), cp(n);
    model.evaluate(s.u, c, cp);
    auto Qf = [&](std::size_t i) { return apow(s.R[i], p) + apow(s.S[i], p); };
    auto Pf = [&](std::size_t i) { return apow(s.R[i], p) - apow(s.S[i], p); };
    out.q = trapezoid(s, Qf);
    out.d = -trapezoid(s, Pf);
    out.src = trapezoid(s, [&](std::size_t i) {
      return balance_source(s.R[i], s.S[i], c[i], cp[i], lambda, p);
    });
    out.src_d = trapezoid(s, [&](std::size_t i) {
      return balance_source_difference(s.R[i], s.S[i], c[i], cp[i], lambda, p);
    });
    const std::size_t a = 0, b = n - 1;
    out.jump_q = Qf(b) - Qf(a);
    out.jump_p = Pf(b) - Pf(a);
    out.jump_cq = c[b] * Qf(b) - c[a] * Qf(a);
    out.jump_cp = c[b] * Pf(b) - c[a] * Pf(a);
    return out;
  };

  BalanceSeries series;
  Slice prev = slice(traj.snapshots.front());
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const FieldState& s0 = traj.snapshots[k - 1];
    const FieldState& s1 = traj.snapshots[k];
    const Slice cur = slice(s1);
    const double dt = s1.t - s0.t;
    if (dt > 0.0) {
      // Mean window velocity over the pair (covers fixed and peak-tracking frames).
      const double v = (s1.x_offset - s0.x_offset) / dt;
      // Q_t - (cP)_x on a window moving with v: d/dt int Q - v[Q] - [cP].
      const double flux = -v * 0.5 * (cur.jump_q + prev.jump_q) - 0.5 * (cur.jump_cp + prev.jump_cp);
      // (|S|^p - |R|^p)_t + (cQ)_x: d/dt int D + v[P] + [cQ], with D = -P.
      const double flux_d = v * 0.5 * (cur.jump_p + prev.jump_p) + 0.5 * (cur.jump_cq + prev.jump_cq);
      const double r = ((cur.q - prev.q) / dt + flux) / p - 0.5 * (cur.src + prev.src);
      const double rd = ((cur.d - prev.d) / dt + flux_d) / p - 0.5 * (cur.src_d + prev.src_d);
      series.t.push_back(0.5 * (s0.t + s1.t));
      series.residual.push_back(r);
      series.residual_difference.push_back(rd);
    }
    prev = cur;
  }
  return series;
}

std::vector<BoundReport> theorem_bounds_check(const Trajectory& traj, const Constants& k,
                                              double eps) {
  const double lambda = traj.config.lambda;
  double sup_R = 0.0, sup_lp = 0.0;
  double min_c = std::numeric_limits<double>::infinity();
  double max_c = 0.0;
  for (const auto& s : traj.samples) {
    sup_R = std::max(sup_R, s.max_abs_R);
    sup_lp = std::max(sup_lp, s.lp_sum);
    min_c = std::min(min_c, s.min_c);
    max_c = std::max(max_c, s.max_c);
  }
  auto tol = [](double right) { return 1e-9 + 1e-6 * std::abs(right); };
  std::vector<BoundReport> out;
  const double r_bound = k.cstar1 * std::pow(k.t_b, 1.0 - lambda) * std::pow(eps, lambda);
  out.push_back(make_bound("sup_R", sup_R, r_bound, tol(r_bound)));
  const double lp_bound = k.hypotenuse_bound() * eps;
  out.push_back(make_bound("lp_sum", sup_lp, lp_bound, tol(lp_bound)));
  const double ratio = std::max(max_c / k.c0, k.c0 / min_c);
  out.push_back(make_bound("c_range", ratio, 2.0, tol(2.0)));
  return out;
}

SignReport blowup_sign_monitor(const Trajectory& traj) {
  if (traj.event != TerminalEvent::blowup_threshold_crossed)
    throw NoBlowupError("blowup_sign_monitor: run did not cross the blow-up threshold");
  const FieldState& s = traj.final();
  std::size_t at = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double m = std::max(std::abs(s.R[i]), std::abs(s.S[i]));
    if (m > best) {
      best = m;
      at = i;
    }
  }
  SignReport rep;
  rep.t = s.t;
  rep.x = s.x(at);
  rep.R = s.R[at];
  rep.S = s.S[at];
  const double c = traj.config.model.c_unchecked(s.u[at]);
  rep.u_t = 0.5 * (rep.R + rep.S);
  rep.u_x = (rep.R - rep.S) / (2.0 * c);
  rep.sign_u_t = sign_of(rep.u_t);
  rep.sign_u_x = sign_of(rep.u_x);
  rep.driver = std::abs(rep.R) > std::abs(rep.S) ? 'R' : 'S';
  return rep;
}

double sign_preservation_excess(const Trajectory& traj) {
  const FieldState& s0 = traj.initial();
  double norm = 0.0;
  for (double v : s0.S) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) return 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max({worst, s.R[i], s.S[i]});
  }
  return worst / norm;
}

HolderReport holder_exponent(const Trajectory& traj, double window_begin, double window_end) {
  const double t_res = traj.resolved_time();
  std::optional<std::size_t> pick;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const double t = traj.snapshots[k].t;
    if (t >= window_begin && t <= window_end && t <= t_res) pick = k;
  }
  if (!pick) throw ResolutionError("holder_exponent: no resolved snapshot inside the window");
  const FieldState& s = traj.snapshots[*pick];
  const double dx = s.grid.dx();
  const auto support = traj.config.data.support(traj.config.eps);
  const double h_max = (support.second - support.first) / 8.0;

  double u_inf = 0.0;
  std::size_t peak = 0;
  double peak_val = -1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    u_inf = std::max(u_inf, std::abs(s.u[i]));
    const double m = std::max(std::abs(s.S[i]), std::abs(s.R[i]));
    if (m > peak_val) {
      peak_val = m;
      peak = i;
    }
  }
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * u_inf;

  HolderReport rep;
  rep.t = s.t;
  rep.x_peak = s.x(peak);
  std::vector<double> hs, ws;
  for (std::size_t m = 4; static_cast<double>(m) * dx <= h_max && m < s.size(); m *= 2) {
    double w = 0.0;
    for (std::size_t i = 0; i + m < s.size(); ++i) w = std::max(w, std::abs(s.u[i + m] - s.u[i]));
    if (w < floor) continue;
    hs.push_back(static_cast<double>(m) * dx);
    ws.push_back(w);
  }
  if (hs.size() < 4) throw ResolutionError("holder_exponent: fewer than 4 usable scales");
  rep.spatial = loglog_fit(hs, ws);

  if (*pick >= 1) {
    TrajectoryInterpolator interp(traj);
    const double tau0 = s.t - traj.snapshots[*pick - 1].t;
    const double u_now = s.u[peak];
    std::vector<double> ts, wt;
    for (double tau = tau0; tau <= 0.5 * s.t; tau *= 2.0) {
      const double t = s.t - tau;
      if (!interp.contains(t, rep.x_peak)) break;
      const double w = std::abs(u_now - interp.at(t, rep.x_peak).u);
      if (w < floor) continue;
      ts.push_back(tau);
      wt.push_back(w);
    }
    if (ts.size() >= 4) rep.temporal = loglog_fit(ts, wt);
  }
  return rep;
}

ScalingFit epsilon_scaling_fit(const std::vector<std::pair<double, double>>& sweep) {
  std::vector<double> x, y;
  for (const auto& [eps, value] : sweep) {
    x.push_back(eps);
    y.push_back(value);
  }
  return loglog_fit(x, y);
}

double temporal_lp_at_point(const Trajectory& traj, double x, double t1, double t2, double p) {
  if (!(t2 >= t1)) throw OutOfRangeError("temporal_lp_at_point: needs t1 <= t2");
  TrajectoryInterpolator interp(traj);
  std::vector<double> ts{t1};
  for (double t : interp.times())
    if (t > t1 && t < t2) ts.push_back(t);
  ts.push_back(t2);
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!interp.contains(ts[i], x))
      throw OutOfRangeError("temporal_lp_at_point: point leaves the trajectory");
    const auto v = interp.at(ts[i], x);
    const double f = apow(v.R, p) + apow(v.S, p);
    if (i > 0) total += 0.5 * (f + prev) * (ts[i] - ts[i - 1]);
    prev = f;
  }
  return total;
}

}  // namespace quasiblow
