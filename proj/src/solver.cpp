#include "quasiblow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <sstream>

#include "quasiblow/error.hpp"
#include "quasiblow/format.hpp"
#include "scheme.hpp"

namespace quasiblow {

namespace {

// R_t - c R_x = (c'/4c)(lambda R^2 + 2(1-lambda) R S - (2-lambda) S^2), S symmetric.
struct WavePhysics {
  const SpeedModel* model_;
  double lambda;

  const SpeedModel& model() const { return *model_; }

  void sources(double R, double S, double inv_c, double c_prime, double& fR, double& fS) const {
    const double k = 0.25 * c_prime * inv_c;
    const double cross = 2.0 * (1.0 - lambda) * R * S;
    fR = k * (lambda * R * R + cross - (2.0 - lambda) * S * S);
    fS = k * (lambda * S * S + cross - (2.0 - lambda) * R * R);
  }

  double u_rate(double R, double S) const { return 0.5 * (R + S); }
};

// |x|^p with the common even exponents spelled out.
double abs_pow(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(std::abs(x), p);
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

std::string_view to_string(TerminalEvent event) {
  switch (event) {
    case TerminalEvent::reached_t_max: return "reached_t_max";
    case TerminalEvent::blowup_threshold_crossed: return "blowup_threshold_crossed";
    case TerminalEvent::degeneracy: return "degeneracy";
    case TerminalEvent::nonfinite_value: return "nonfinite_value";
  }
  return "unknown";
}

std::string_view to_string(BoundaryKind kind) {
  return kind == BoundaryKind::quiescent ? "quiescent" : "extrapolate";
}

BoundaryKind boundary_kind_from_string(std::string_view name) {
  if (name == "quiescent") return BoundaryKind::quiescent;
  if (name == "extrapolate") return BoundaryKind::extrapolate;
  throw ValidationError("unknown boundary kind '" + std::string(name) + "'");
}

std::pair<double, double> InitialData::support(double eps) const {
  if (kind == Kind::scaled_profile) return {eps * profile.s_min(), eps * profile.s_max()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (u0_amplitude != 0.0) {
    lo = std::min(lo, u0.s_min());
    hi = std::max(hi, u0.s_max());
  }
  if (u1_amplitude != 0.0) {
    lo = std::min(lo, u1.s_min());
    hi = std::max(hi, u1.s_max());
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

void RunConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 2.0)) throw ValidationError("lambda must lie in (0, 2]");
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(cfl > 0.0 && cfl < 1.0)) throw ValidationError("cfl must lie in (0, 1)");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  if (scheme_order != 1 && scheme_order != 2) throw ValidationError("scheme_order must be 1 or 2");
  if (blowup_threshold && !(*blowup_threshold > 0.0))
    throw ValidationError("blowup_threshold must be positive");
  if (!(blowup_factor > 1.0)) throw ValidationError("blowup_factor must exceed 1");
  if (!std::isfinite(frame_velocity)) throw ValidationError("frame_velocity must be finite");
  if (snapshot_growth != 0.0 && !(snapshot_growth > 1.0))
    throw ValidationError("snapshot_growth must be 0 or exceed 1");
  grid.validate();
}

bool RunConfig::theorem_scenario() const {
  return lambda > 0.0 && lambda <= 1.0 && data.kind == InitialData::Kind::scaled_profile;
}

FieldState initial_state(const RunConfig& cfg) {
  cfg.validate();
  FieldState s = cfg.data.kind == InitialData::Kind::scaled_profile
                     ? build_initial_data(cfg.data.profile, cfg.eps, cfg.model, cfg.grid)
                     : build_primitive_data(cfg.data.u0, cfg.data.u0_amplitude, cfg.data.u1,
                                            cfg.data.u1_amplitude, cfg.model, cfg.grid);
  if (cfg.check_domain_of_dependence) {
    double c_sup = 0.0;
    for (double u : s.u) c_sup = std::max(c_sup, cfg.model.c_unchecked(u));
    const auto [lo, hi] = cfg.data.support(cfg.eps);
    // Grid-relative reach of the right- and left-moving families.
    // A tracking frame starts out near c(0).
    const double v = cfg.track_peak ? cfg.model.c0() : cfg.frame_velocity;
    double c_inf = c_sup;
    for (double u : s.u) c_inf = std::min(c_inf, cfg.model.c_unchecked(u));
    const double reach_right = std::max(c_sup - v, 0.0) * cfg.t_max;
    const double reach_left =
        (v > 0.0 ? std::max(v - c_inf, 0.0) : std::max(c_sup + v, 0.0)) * cfg.t_max;
    if (cfg.grid.x_max - hi < reach_right || lo - cfg.grid.x_min < reach_left) {
      std::ostringstream msg;
      msg << "grid [" << cfg.grid.x_min << ", " << cfg.grid.x_max
          << "] is narrower than the domain of dependence of the data support [" << lo << ", "
          << hi << "] widened by " << reach_left << " to the left and " << reach_right
          << " to the right";
      throw ValidationError(msg.str());
    }
  }
  return s;
}

namespace detail {

DiagnosticSample scan_state(const FieldState& state, const SpeedModel& model, double lambda,
                            double dt, SampleScan& scan) {
  DiagnosticSample smp;
  smp.t = state.t;
  smp.dt = dt;
  const std::size_t n = state.size();
  const double dx = state.grid.dx();
  const double p = 2.0 / lambda;
  scan.c.resize(n);
  scan.c_prime.resize(n);
  model.evaluate(state.u, scan.c, scan.c_prime);
  double min_c = std::numeric_limits<double>::infinity();
  double max_c = -min_c;
  double min_u = min_c;
  double max_u = max_c;
  double max_R = 0.0, max_S = 0.0, dlogc = 0.0, jump_R = 0.0, jump_S = 0.0;
  double lp = 0.0, en = 0.0, mass = 0.0;
  scan.max_S_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double R = state.R[i];
    const double S = state.S[i];
    const double u = state.u[i];
    const double c = scan.c[i];
    mass += std::abs(R) + std::abs(S) + std::abs(u);
    max_R = std::max(max_R, std::abs(R));
    max_S = std::max(max_S, std::abs(S));
    min_c = std::min(min_c, c);
    max_c = std::max(max_c, c);
    min_u = std::min(min_u, u);
    max_u = std::max(max_u, u);
    if (S > state.S[scan.max_S_index]) scan.max_S_index = i;
    dlogc = std::max(dlogc, std::abs(scan.c_prime[i] / c));
    const double w = trapezoid_weight(i, n);
    lp += w * (abs_pow(R, p) + abs_pow(S, p));
    // u_t^2 + c^2 u_x^2 = (R^2 + S^2) / 2
    en += w * 0.5 * (R * R + S * S);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    jump_R = std::max(jump_R, std::abs(state.R[i + 1] - state.R[i]));
    jump_S = std::max(jump_S, std::abs(state.S[i + 1] - state.S[i]));
  }
  scan.finite = std::isfinite(mass);
  scan.min_u = min_u;
  scan.max_u = max_u;
  smp.max_abs_R = max_R;
  smp.max_abs_S = max_S;
  smp.min_c = min_c;
  smp.max_c = max_c;
  smp.max_abs_dlogc = dlogc;
  smp.max_abs_R_jump = jump_R;
  smp.max_abs_S_jump = jump_S;
  smp.lp_sum = lp * dx;
  smp.energy = en * dx;
  return smp;
}

}  // namespace detail

DiagnosticSample sample_state(const FieldState& state, const SpeedModel& model, double lambda,
                              double dt) {
  detail::SampleScan scan;
  return detail::scan_state(state, model, lambda, dt, scan);
}

double Trajectory::resolved_time(double max_jump_ratio) const {
  double t_res = samples.front().t;
  for (const auto& s : samples) {
    const double norm = std::max(s.max_abs_R, s.max_abs_S);
    const double jump = std::max(s.max_abs_R_jump, s.max_abs_S_jump);
    if (norm > 0.0 && jump > max_jump_ratio * norm) break;
    t_res = s.t;
  }
  return t_res;
}

FieldState step(const FieldState& state, const RunConfig& cfg, double* dt_used) {
  for (double u : state.u)
    if (!(cfg.model.in_domain(u))) throw DomainError("step: u outside the positivity domain", u);
  double v = cfg.frame_velocity;
  if (cfg.track_peak) {
    detail::SampleScan scan;
    detail::scan_state(state, cfg.model, cfg.lambda, 0.0, scan);
    v = scan.c[scan.max_S_index];
  }
  detail::UpwindScheme<WavePhysics> scheme(WavePhysics{&cfg.model, cfg.lambda}, cfg.scheme_order, v,
                                           cfg.boundary == BoundaryKind::quiescent);
  const double cmax = scheme.max_speed(state);
  const double dt = cfg.cfl * state.grid.dx() / cmax;
  FieldState next = scheme.advance(state, dt);
  if (dt_used) *dt_used = dt;
  if (!next.all_finite()) throw Error("step produced a non-finite value");
  const double floor = 1e-12 * cfg.model.c0();
  for (double u : next.u) {
    if (!cfg.model.in_domain(u) || !(cfg.model.c_unchecked(u) > floor))
      throw DomainError("step: wave speed degenerated (min c <= 1e-12 c0)", u);
  }
  return next;
}

Trajectory run(const RunConfig& cfg) {
  FieldState s = initial_state(cfg);
  detail::UpwindScheme<WavePhysics> scheme(WavePhysics{&cfg.model, cfg.lambda}, cfg.scheme_order,
                                           cfg.frame_velocity,
                                           cfg.boundary == BoundaryKind::quiescent);
  return detail::run_scheme(cfg, std::move(s), scheme);
}

std::optional<double> crossing_time(const Trajectory& traj, double level) {
  const auto& smp = traj.samples;
  for (std::size_t k = 0; k < smp.size(); ++k) {
    const double m = std::max(smp[k].max_abs_R, smp[k].max_abs_S);
    if (m < level) continue;
    if (k == 0) return smp[0].t;
    const double m_prev = std::max(smp[k - 1].max_abs_R, smp[k - 1].max_abs_S);
    const double a = 1.0 / m_prev;
    const double b = 1.0 / m;
    const double target = 1.0 / level;
    const double frac = (a - b) > 0.0 ? (a - target) / (a - b) : 1.0;
    return smp[k - 1].t + frac * (smp[k].t - smp[k - 1].t);
  }
  return std::nullopt;
}

InverseThresholdFit fit_inverse_threshold(const std::vector<double>& levels,
                                          const std::vector<double>& times) {
  if (levels.size() != times.size() || levels.size() < 2)
    throw ValidationError("threshold fit needs at least two (level, time) pairs");
  const double n = static_cast<double>(levels.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double x = 1.0 / levels[i];
    sx += x;
    sy += times[i];
    sxx += x * x;
    sxy += x * times[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double r = times[i] - (intercept + slope / levels[i]);
    ss += r * r;
  }
  return {intercept, -slope, std::sqrt(ss / n)};
}

BlowupEstimate estimate_blowup_time(const std::vector<const Trajectory*>& runs,
                                    const std::vector<double>& threshold_factors) {
  if (runs.empty()) throw ValidationError("estimate_blowup_time needs at least one run");
  for (std::size_t i = 1; i < threshold_factors.size(); ++i)
    if (!(threshold_factors[i] > threshold_factors[i - 1]))
      throw ValidationError("thresholds must be strictly increasing");
  BlowupEstimate est;
  est.blew_up = true;
  const double base = runs.front()->initial_max_norm;
  for (double f : threshold_factors) est.thresholds.push_back(f * base);
  for (const Trajectory* tr : runs) {
    est.grid_sizes.push_back(tr->config.grid.n);
    est.events.push_back(tr->event);
    std::vector<double> times;
    std::vector<double> levels;
    for (double f : threshold_factors) {
      const auto t = crossing_time(*tr, f * tr->initial_max_norm);
      if (!t) continue;
      levels.push_back(f * tr->initial_max_norm);
      times.push_back(*t);
    }
    est.crossing_times.push_back(times);
    if (tr->event != TerminalEvent::blowup_threshold_crossed || times.size() < 2) {
      est.extrapolated.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const auto fit = fit_inverse_threshold(levels, times);
    est.extrapolated.push_back(fit.t_star);
    est.fit_residual = fit.residual;
  }
  const double finest = est.extrapolated.back();
  if (!std::isfinite(finest)) {
    est.blew_up = false;
    throw NoBlowupError("no blow-up: the finest run ended with " +
                        std::string(to_string(runs.back()->event)));
  }
  est.t_star = finest;
  if (est.extrapolated.size() >= 2) {
    const double coarse = est.extrapolated[est.extrapolated.size() - 2];
    est.refinement_spread = std::abs(finest - coarse) / std::abs(finest);
  }
  return est;
}

BlowupEstimate estimate_blowup_time(const RunConfig& cfg, const std::vector<double>& threshold_factors,
                                    std::size_t refinements, std::size_t workers) {
  if (refinements < 2) throw ValidationError("estimate_blowup_time needs refinements >= 2");
  if (threshold_factors.size() < 2) throw ValidationError("need at least two thresholds");
  std::vector<RunConfig> cfgs;
  for (std::size_t k = 0; k < refinements; ++k) {
    RunConfig c = cfg;
    c.grid = cfg.grid.refined(std::size_t{1} << k);
    c.blowup_threshold.reset();
    c.blowup_factor = threshold_factors.back();
    c.record_every = std::numeric_limits<std::size_t>::max();
    c.snapshot_growth = 0.0;
    cfgs.push_back(std::move(c));
  }
  std::vector<Trajectory> trajs(cfgs.size());
  workers = std::max<std::size_t>(1, workers);
  for (std::size_t start = 0; start < cfgs.size(); start += workers) {
    std::vector<std::future<Trajectory>> jobs;
    for (std::size_t k = start; k < std::min(cfgs.size(), start + workers); ++k)
      jobs.push_back(std::async(std::launch::async, [&cfgs, k] { return run(cfgs[k]); }));
    for (std::size_t j = 0; j < jobs.size(); ++j) trajs[start + j] = jobs[j].get();
  }
  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);
  return estimate_blowup_time(ptrs, threshold_factors);
}

void write_timeseries_csv(std::ostream& out, const Trajectory& traj, std::size_t max_rows) {
  out << "t,dt,max_abs_R,max_abs_S,lp_sum,min_c,max_c,energy\n";
  const std::size_t n = traj.samples.size();
  const std::size_t stride = max_rows > 0 ? std::max<std::size_t>(1, (n + max_rows - 1) / max_rows) : 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k % stride != 0 && k + 1 != n) continue;
    const auto& s = traj.samples[k];
    out << format_double(s.t) << ',' << format_double(s.dt) << ',' << format_double(s.max_abs_R)
        << ',' << format_double(s.max_abs_S) << ',' << format_double(s.lp_sum) << ','
        << format_double(s.min_c) << ',' << format_double(s.max_c) << ','
        << format_double(s.energy) << '\n';
  }
}

}  // namespace quasiblow
