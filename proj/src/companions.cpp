#include "quasiblow/companions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "quasiblow/characteristics.hpp"
#include "quasiblow/error.hpp"
#include "scheme.hpp"

namespace quasiblow {

namespace {

struct CarlemannPhysics {
  SpeedModel unit = SpeedModel::affine(1.0, 0.0);
  double a1, b1, c1, a2, b2, c2;

  const SpeedModel& model() const { return unit; }

  void sources(double R, double S, double, double, double& fR, double& fS) const {
    fR = a1 * R * R + b1 * R * S + c1 * S * S;
    fS = a2 * S * S + b2 * R * S + c2 * R * R;
  }

  double u_rate(double, double) const { return 0.0; }
};

double integral_G(double u, double a) { return std::pow(1.0 + u, a + 1.0) / (a + 1.0); }

// Linear interpolation of nodal values f on snapshot s at physical x.
double interpolate_linear(const FieldState& s, const std::vector<double>& f, double x) {
  const double q = (x - s.x(0)) / s.grid.dx();
  if (q <= 0.0) return f.front();
  if (q >= static_cast<double>(f.size() - 1)) return f.back();
  const auto i = static_cast<std::size_t>(q);
  const double w = q - static_cast<double>(i);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace

CarlemannConfig CarlemannConfig::classical() {
  CarlemannConfig c;
  c.a1 = -1.0;
  c.c1 = 1.0;
  c.a2 = -1.0;
  c.c2 = 1.0;
  return c;
}

CarlemannConfig CarlemannConfig::original() {
  CarlemannConfig c;
  c.a1 = 1.0;
  c.c1 = -1.0;
  c.a2 = 1.0;
  c.c2 = -1.0;
  return c;
}

void CarlemannConfig::validate() const {
  grid.validate();
  for (double v : {a1, b1, c1, a2, b2, c2, R0.amplitude, S0.amplitude})
    if (!std::isfinite(v)) throw ValidationError("carlemann: coefficients and amplitudes must be finite");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ValidationError("carlemann: cfl must lie in (0, 1)");
  if (!(t_max > 0.0)) throw ValidationError("carlemann: t_max must be positive");
  if (scheme_order != 1 && scheme_order != 2)
    throw ValidationError("carlemann: scheme_order must be 1 or 2");
  if (blowup_threshold && !(*blowup_threshold > 0.0))
    throw ValidationError("carlemann: blowup_threshold must be positive");
}

RunConfig CarlemannConfig::as_run_config() const {
  RunConfig rc;
  rc.lambda = 1.0;
  rc.model = SpeedModel::affine(1.0, 0.0);
  rc.grid = grid;
  rc.cfl = cfl;
  rc.t_max = t_max;
  rc.blowup_threshold = blowup_threshold;
  rc.blowup_factor = blowup_factor;
  rc.scheme_order = scheme_order;
  rc.record_every = record_every;
  rc.check_domain_of_dependence = false;
  rc.data.kind = InitialData::Kind::primitive;
  // Uniform data continue past the grid edges.
  rc.boundary = R0.uniform || S0.uniform ? BoundaryKind::extrapolate : BoundaryKind::quiescent;
  return rc;
}

FieldState carlemann_initial_state(const CarlemannConfig& cfg) {
  cfg.validate();
  FieldState s = FieldState::zeros(cfg.grid);
  for (std::size_t i = 0; i < cfg.grid.n; ++i) {
    const double x = cfg.grid.x(i);
    s.R[i] = cfg.R0.value(x);
    s.S[i] = cfg.S0.value(x);
  }
  return s;
}

Trajectory carlemann_run(const CarlemannConfig& cfg) {
  FieldState s = carlemann_initial_state(cfg);
  const RunConfig rc = cfg.as_run_config();
  detail::UpwindScheme<CarlemannPhysics> scheme(
      CarlemannPhysics{SpeedModel::affine(1.0, 0.0), cfg.a1, cfg.b1, cfg.c1, cfg.a2, cfg.b2, cfg.c2},
      cfg.scheme_order, 0.0, rc.boundary == BoundaryKind::quiescent);
  return detail::run_scheme(rc, std::move(s), scheme);
}

PsystemState PsystemState::from_field(const FieldState& s, double a) {
  PsystemState p;
  p.grid = s.grid;
  p.a = a;
  p.u = s.u;
  p.u_t.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p.u_t[i] = 0.5 * (s.R[i] + s.S[i]);
  auto [wp, wm] = riemann_invariants(p);
  p.w_plus = std::move(wp);
  p.w_minus = std::move(wm);
  return p;
}

std::pair<std::vector<double>, std::vector<double>> riemann_invariants(const PsystemState& state) {
  if (state.a == -1.0) throw ValidationError("riemann_invariants: exponent a = -1 is degenerate");
  if (state.u.size() != state.u_t.size())
    throw ValidationError("riemann_invariants: u and u_t lengths differ");
  const std::size_t n = state.u.size();
  const double dx = state.grid.dx();
  std::vector<double> wp(n), wm(n);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(1.0 + state.u[i] > 0.0))
      throw DomainError("riemann_invariants: 1 + u <= 0", state.u[i]);
    if (i > 0) cumulative += 0.5 * dx * (state.u_t[i - 1] + state.u_t[i]);
    const double g = integral_G(state.u[i], state.a);
    wp[i] = g + cumulative;
    wm[i] = g - cumulative;
  }
  return {std::move(wp), std::move(wm)};
}

std::vector<double> u_from_invariants(const std::vector<double>& w_plus,
                                      const std::vector<double>& w_minus, double a) {
  if (a == -1.0) throw ValidationError("u_from_invariants: exponent a = -1 is degenerate");
  if (w_plus.size() != w_minus.size())
    throw ValidationError("u_from_invariants: lengths differ");
  std::vector<double> u(w_plus.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::pow((a + 1.0) * 0.5 * (w_plus[i] + w_minus[i]), 1.0 / (a + 1.0)) - 1.0;
  return u;
}

DalembertReport dalembert_residual(const Trajectory& traj, std::size_t snapshots,
                                   std::size_t points_per_snapshot) {
  const RunConfig& cfg = traj.config;
  if (cfg.lambda != 2.0) throw ValidationError("dalembert_residual: needs lambda = 2");
  if (cfg.model.family() != SpeedFamily::power)
    throw ValidationError("dalembert_residual: needs the power speed model");
  if (snapshots == 0 || points_per_snapshot == 0)
    throw ValidationError("dalembert_residual: needs at least one sample");
  const double a = cfg.model.params().at(0);
  const FieldState& s0 = traj.initial();
  const PsystemState p0 = PsystemState::from_field(s0, a);

  DalembertReport rep;
  const std::size_t count = traj.snapshots.size();
  const std::size_t picks = std::min(snapshots, count);
  TraceOptions opt;
  opt.forward = false;
  for (std::size_t j = 0; j < picks; ++j) {
    const std::size_t k =
        picks == 1 ? count - 1
                   : static_cast<std::size_t>(std::llround(static_cast<double>(j) *
                                                          static_cast<double>(count - 1) /
                                                          static_cast<double>(picks - 1)));
    const FieldState& s = traj.snapshots[k];
    for (std::size_t m = 0; m < points_per_snapshot; ++m) {
      const auto i = static_cast<std::size_t>((static_cast<double>(m) + 0.5) *
                                              static_cast<double>(s.size()) /
                                              static_cast<double>(points_per_snapshot));
      const double x = s.x(i);
      double foot_plus = x;
      double foot_minus = x;
      if (k > 0) {
        const CharCurve plus = trace_curve(traj, s.t, x, Direction::plus, opt);
        const CharCurve minus = trace_curve(traj, s.t, x, Direction::minus, opt);
        if (!plus.reached_start || !minus.reached_start) {
          ++rep.skipped;
          continue;
        }
        foot_plus = plus.points.front().x;
        foot_minus = minus.points.front().x;
      }
      const double lhs = 2.0 * integral_G(s.u[i], a);
      const double rhs = interpolate_linear(s0, p0.w_plus, foot_minus) +
                         interpolate_linear(s0, p0.w_minus, foot_plus);
      rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
      ++rep.samples;
    }
  }
  if (rep.samples == 0) throw OutOfRangeError("triangle exits grid");
  return rep;
}

DegeneracyReport degeneracy_monitor(const Trajectory& traj, double a) {
  const RunConfig& cfg = traj.config;
  DegeneracyReport rep;
  rep.a = a;
  if (cfg.model.family() != SpeedFamily::power) rep.hypothesis_notes.push_back("model is not the power family");
  else if (cfg.model.params().at(0) != a) rep.hypothesis_notes.push_back("exponent differs from the run's model");
  if (!(a > 0.0)) rep.hypothesis_notes.push_back("exponent a must be positive");
  if (cfg.lambda != 2.0) rep.hypothesis_notes.push_back("lambda is not 2");

  const FieldState& s0 = traj.initial();
  const std::size_t n = s0.size();
  double integral = 0.0;
  bool positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    integral += w * 0.5 * (s0.R[i] + s0.S[i]);
    if (s0.R[i] > 0.0 || s0.S[i] > 0.0) positive = true;
  }
  if (positive) rep.hypothesis_notes.push_back("R(0) or S(0) is positive somewhere");
  rep.integral_u1 = integral * s0.grid.dx();

  const SpeedModel model = SpeedModel::power(a);
  rep.threshold = -2.0 * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                             [&](double th) { return model.c_unchecked(th); }, -1.0, 0.0);
  rep.threshold_closed = -2.0 / (a + 1.0);
  rep.below_threshold = rep.integral_u1 < rep.threshold;

  std::vector<double> mins;
  mins.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    double m = std::numeric_limits<double>::infinity();
    for (double u : s.u) m = std::min(m, 1.0 + u);
    mins.push_back(m);
  }
  rep.initial_min_one_plus_u = mins.front();
  rep.min_one_plus_u = *std::min_element(mins.begin(), mins.end());
  rep.degenerated = traj.event == TerminalEvent::degeneracy;
  rep.declining = true;
  for (std::size_t k = mins.size() / 2 + 1; k < mins.size(); ++k)
    if (mins[k] > mins[k - 1] + 1e-12) rep.declining = false;
  rep.consistent = rep.below_threshold ? (rep.degenerated || rep.declining) : !rep.degenerated;
  return rep;
}

RunConfig degeneracy_preset(double a, double fraction, std::size_t n, double t_max) {
  if (!(a > 0.0)) throw ValidationError("degeneracy_preset: a must be positive");
  // int_{-1}^{1} exp(1/(y^2-1)) dy
  const double bump_mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double y) { return std::abs(y) < 1.0 ? std::exp(1.0 / (y * y - 1.0)) : 0.0; }, -1.0, 1.0,
      10, 1e-13);
  RunConfig cfg;
  cfg.lambda = 2.0;
  cfg.eps = 1.0;
  cfg.model = SpeedModel::power(a);
  cfg.data.kind = InitialData::Kind::primitive;
  cfg.data.u0 = ProfileModel::bump_x();
  cfg.data.u0_amplitude = 0.0;
  cfg.data.u1 = ProfileModel::poly_bump({-1.0});
  cfg.data.u1_amplitude = fraction * (2.0 / (a + 1.0)) / bump_mass;
  const double reach = t_max + 1.5;
  cfg.grid = {-reach, reach, n};
  cfg.t_max = t_max;
  return cfg;
}

RunConfig degeneracy_preset_above(double a) { return degeneracy_preset(a, 0.25); }
RunConfig degeneracy_preset_below(double a) { return degeneracy_preset(a, 3.0); }

}  // namespace quasiblow
