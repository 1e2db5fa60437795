// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,4,...] [--allow-fail 9,...] [--workers k] [--seed s]
//
// Exit status is 0 when every criterion passes or is listed in --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "quasiblow/characteristics.hpp"
#include "quasiblow/companions.hpp"
#include "quasiblow/diagnostics.hpp"
#include "quasiblow/riccati.hpp"
#include "quasiblow/scenario.hpp"
#include "quasiblow/solver.hpp"
#include "quasiblow/verify.hpp"

using namespace quasiblow;

namespace {

// ---- pinned tolerances
constexpr std::size_t kAlgebraicSamples = 100000;
constexpr std::size_t kRiccatiSets = 100;
constexpr std::size_t kConstantsSets = 1000;
constexpr double kTransportOrder = 1.8;
constexpr double kTransportError = 1e-3;
constexpr double kEnergyDrift = 1e-3;
constexpr double kSignExcess = 1e-8;
constexpr double kRefinementSpread = 0.05;
constexpr double kEpsRatio = 1.2;
constexpr double kSlopeTolerance = 0.15;
constexpr double kHolderTolerance = 0.12;
constexpr double kSmoothControl = 0.95;
constexpr double kBalanceRatioLo = 1.4;
constexpr double kBalanceRatioHi = 2.6;
constexpr double kCarlemannConservation = 1e-10;
constexpr double kCarlemannBlowup = 1e-3;
constexpr double kDalembertOrder = 1.0;

// The sweep shared by criteria 7, 8, 9 and 13. Grid bounds are in units of eps;
// the frame follows the S peak so the steepening front stays on the grid.
const char* const kSweepConfig = R"({
  "kind": "sweep",
  "model": {"family": "power", "params": [1]},
  "profile": {"family": "bump_x"},
  "grid": {"x_min": -2, "x_max": 2, "n": 4096},
  "cfl": 0.8,
  "t_max": 14,
  "frame": {"track_peak": true},
  "check_domain_of_dependence": false,
  "thresholds": {"extrapolation_factors": [1.25, 1.5, 1.75, 2.0]},
  "theorem": true,
  "sweep": {"eps": [0.1, 0.2, 0.4], "lambda": [0.5, 1], "n": [4096, 8192], "grid_in_eps_units": true},
  "expect": {"event": "blowup_threshold_crossed"}
})";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct Context {
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  std::optional<ScenarioSpec> sweep_spec;
  std::optional<SweepResult> sweep;
  double sweep_seconds = 0.0;

  const SweepResult& sweep_result() {
    if (!sweep) {
      sweep_spec = parse_config(kSweepConfig);
      const auto t0 = std::chrono::steady_clock::now();
      sweep = run_sweep(*sweep_spec, workers);
      sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return *sweep;
  }
  const SweepGroup* group(double lambda, double eps) {
    for (const auto& g : sweep_result().groups)
      if (g.lambda == lambda && g.eps == eps) return &g;
    return nullptr;
  }
};

// ---- 1-3: exact oracles

Outcome c1_algebraic(Context& ctx) {
  const auto r = algebraic_suite(kAlgebraicSamples, ctx.seed);
  return {r.passed(), std::to_string(r.samples) + " samples, max residual/scale^p " +
                          fmt(r.max_identity_ratio) + ", min margin/scale^p " +
                          fmt(r.min_inequality_ratio)};
}

Outcome c2_riccati(Context& ctx) {
  const auto r = riccati_suite(kRiccatiSets, ctx.seed);
  return {r.passed(), std::to_string(r.sets) + " sets, solution err " + fmt(r.max_solution_error) +
                          ", blow-up err " + fmt(r.max_blowup_error) + ", m->0 err " +
                          fmt(r.limit_error)};
}

Outcome c3_constants(Context& ctx) {
  const auto r = constants_suite(kConstantsSets, ctx.seed);
  return {r.passed(), std::to_string(r.sets) + " sets, max rel diff " + fmt(r.max_relative_difference)};
}

// ---- 4: constant speed against d'Alembert

Outcome c4_transport(Context&) {
  // u0 = phi, u1 = 0 with c = 1: u = (phi(x - t) + phi(x + t)) / 2, R = phi'(x + t),
  // S = -phi'(x - t). The grid is the domain of dependence of the support at t = 1.
  // The order is the least-squares slope over the three grids, judged on u; the
  // minmod limiter clips the smooth extrema of R and S, whose order is reported.
  const ProfileModel phi = ProfileModel::bump_x();
  std::vector<double> dx, err_u, err_rs;
  for (std::size_t n : {1024u, 2048u, 4096u}) {
    RunConfig cfg;
    cfg.lambda = 1.0;
    cfg.model = SpeedModel::affine(1.0, 0.0);
    cfg.data.kind = InitialData::Kind::primitive;
    cfg.data.u0 = phi;
    cfg.data.u0_amplitude = 1.0;
    cfg.data.u1_amplitude = 0.0;
    cfg.grid = {-2.0, 2.0, n};
    cfg.t_max = 1.0;
    cfg.record_every = std::numeric_limits<std::size_t>::max();
    cfg.snapshot_growth = 0.0;
    const Trajectory tr = run(cfg);
    const FieldState& s = tr.final();
    double eu = 0.0, ers = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.x(i);
      eu = std::max(eu, std::abs(s.u[i] - 0.5 * (phi.value(x - s.t) + phi.value(x + s.t))));
      ers = std::max(ers, std::abs(s.R[i] - phi.derivative(x + s.t)));
      ers = std::max(ers, std::abs(s.S[i] + phi.derivative(x - s.t)));
    }
    dx.push_back(cfg.grid.dx());
    err_u.push_back(eu);
    err_rs.push_back(ers);
  }
  const double order_u = loglog_fit(dx, err_u).slope;
  const double order_rs = loglog_fit(dx, err_rs).slope;
  const bool pass = order_u >= kTransportOrder && err_u.back() < kTransportError;
  return {pass, "L_inf(u) " + fmt(err_u[0]) + ", " + fmt(err_u[1]) + ", " + fmt(err_u[2]) +
                    " order " + fmt(order_u, 3) + "; L_inf(R,S) " + fmt(err_rs[0]) + ", " +
                    fmt(err_rs[1]) + ", " + fmt(err_rs[2]) + " order " + fmt(order_rs, 3)};
}

// ---- 5: energy at lambda = 1

Outcome c5_energy(Context& ctx) {
  const ScenarioSpec spec = parse_config(kSweepConfig);
  const BlowupEstimate est = estimate_blowup_time(sweep_cell_config(spec, 1.0, 0.4, 4096),
                                                  spec.extrapolation_factors, 2, ctx.workers);
  const double t_end = 0.9 * est.t_star;
  std::vector<double> drift;
  for (std::size_t n : {4096u, 8192u}) {
    RunConfig cfg = sweep_cell_config(spec, 1.0, 0.4, n);
    cfg.t_max = t_end;
    cfg.blowup_factor = 1e6;
    cfg.record_every = std::numeric_limits<std::size_t>::max();
    cfg.snapshot_growth = 0.0;
    const Trajectory tr = run(cfg);
    drift.push_back(energy_drift(tr, t_end));
  }
  const bool pass = drift[1] < kEnergyDrift && drift[1] < drift[0];
  return {pass, "up to t=" + fmt(t_end) + ": drift n=4096 " + fmt(drift[0]) + ", n=8192 " +
                    fmt(drift[1])};
}

// ---- 6: sign preservation

Outcome c6_sign(Context&) {
  // u0 = 0, u1 = -0.2 exp(1/(y^2-1)) gives R = S = u1 <= 0; c = 1 + u has c' = 1.
  double worst = -std::numeric_limits<double>::infinity();
  std::string detail;
  for (double lambda : {0.5, 1.0}) {
    RunConfig cfg;
    cfg.lambda = lambda;
    cfg.model = SpeedModel::power(1.0);
    cfg.data.kind = InitialData::Kind::primitive;
    cfg.data.u1 = ProfileModel::poly_bump({1.0});
    cfg.data.u1_amplitude = -0.2;
    cfg.data.u0_amplitude = 0.0;
    cfg.grid = {-3.5, 3.5, 4096};
    cfg.t_max = 2.0;
    const Trajectory tr = run(cfg);
    const double e = sign_preservation_excess(tr);
    worst = std::max(worst, e);
    detail += "lambda=" + fmt(lambda) + ": max(R,S)/|S(0)| " + fmt(e) + " (" +
              std::string(to_string(tr.event)) + ", t=" + fmt(tr.t_final) + ") ";
  }
  return {worst <= kSignExcess, detail};
}

// ---- 7-9, 13: the sweep

Outcome c7_blowup(Context& ctx) {
  const SweepResult& res = ctx.sweep_result();
  bool pass = true;
  std::ostringstream d;
  for (const auto& c : res.cells)
    if (!c.error.empty() || c.event != TerminalEvent::blowup_threshold_crossed) {
      pass = false;
      d << "cell lambda=" << c.lambda << " eps=" << c.eps << " n=" << c.n << " ended "
        << (c.error.empty() ? std::string(to_string(c.event)) : c.error) << "; ";
    }
  double worst_spread = 0.0;
  for (const auto& g : res.groups) {
    if (!g.estimate || !std::isfinite(g.estimate->t_star)) {
      pass = false;
      d << "no T_est at lambda=" << g.lambda << " eps=" << g.eps << "; ";
      continue;
    }
    worst_spread = std::max(worst_spread, g.estimate->refinement_spread);
    d << "T(" << g.lambda << "," << g.eps << ")=" << fmt(g.estimate->t_star, 5) << " ";
  }
  pass = pass && worst_spread < kRefinementSpread;
  d << "| max spread " << fmt(worst_spread);
  for (const auto& f : res.fits) {
    d << " | ratio(lambda=" << f.lambda << ")=" << (f.t_est_ratio ? fmt(*f.t_est_ratio) : "n/a");
    if (!f.t_est_ratio || !(*f.t_est_ratio < kEpsRatio)) pass = false;
  }
  d << " | sweep " << fmt(ctx.sweep_seconds, 3) << " s on " << ctx.workers << " worker(s)";
  return {pass, d.str()};
}

Outcome c8_comparison(Context& ctx) {
  const SweepResult& res = ctx.sweep_result();
  bool pass = true;
  std::ostringstream d;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : res.cells) {
    if (!c.comparison) {
      pass = false;
      d << "no comparison at lambda=" << c.lambda << " eps=" << c.eps << "; ";
      continue;
    }
    const auto& r = *c.comparison;
    worst_margin = std::min(worst_margin, r.min_margin / c.constants->sigma_sq);
    if (!r.passed() || !r.onset_before_t_b) {
      pass = false;
      d << "lambda=" << c.lambda << " eps=" << c.eps << " n=" << c.n
        << (r.passed() ? "" : " s < S-bar") << (r.onset_before_t_b ? "" : " onset >= T_b") << "; ";
    }
  }
  for (const auto& c : res.cells)
    if (c.n == res.cells.back().n && c.comparison && c.comparison->onset)
      d << "onset/T_b(" << c.lambda << "," << c.eps << ")=" << fmt(*c.comparison->onset / c.comparison->t_b)
        << " ";
  d << "| min (s - S-bar)/sigma^2 " << fmt(worst_margin);
  return {pass, d.str()};
}

Outcome c9_scaling(Context& ctx) {
  const SweepResult& res = ctx.sweep_result();
  bool pass = true;
  std::ostringstream d;
  for (const auto& f : res.fits) {
    if (!f.sup_R || !f.lp_sum) {
      pass = false;
      d << "lambda=" << f.lambda << ": " << f.error << "; ";
      continue;
    }
    const bool r_ok = std::abs(f.sup_R->slope - f.lambda) <= kSlopeTolerance;
    const bool lp_ok = std::abs(f.lp_sum->slope - 1.0) <= kSlopeTolerance;
    pass = pass && r_ok && lp_ok;
    d << "lambda=" << f.lambda << ": sup|R| slope " << fmt(f.sup_R->slope) << (r_ok ? "" : " (out)")
      << ", lp slope " << fmt(f.lp_sum->slope) << (lp_ok ? "" : " (out)") << "; ";
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const std::size_t finest = ctx.sweep_spec->axes.n.back();
  for (const auto& c : res.cells) {
    if (c.eps > 0.2 || c.n != finest) continue;
    const double c0 = c.constants ? c.constants->c0 : 1.0;
    lo = std::min(lo, c.min_c / c0);
    hi = std::max(hi, c.max_c / c0);
  }
  const bool c_ok = lo >= 0.5 && hi <= 2.0;
  pass = pass && c_ok;
  d << "c/c0 in [" << fmt(lo) << ", " << fmt(hi) << "] for eps <= 0.2";
  return {pass, d.str()};
}

// ---- 10: Hoelder exponent

Outcome c10_holder(Context&) {
  bool pass = true;
  std::ostringstream d;
  for (double lambda : {0.5, 1.0}) {
    ScenarioSpec spec = parse_config(kSweepConfig);
    RunConfig cfg = sweep_cell_config(spec, lambda, 0.4, 8192);
    cfg.blowup_factor = 40.0;
    cfg.snapshot_growth = 1.1;
    const Trajectory tr = run(cfg);
    const double target = 1.0 - lambda / 2.0;
    try {
      const HolderReport h = holder_exponent(tr, 0.0, tr.t_final);
      const HolderReport smooth = holder_exponent(tr, 0.0, 0.0);
      const bool ok = std::abs(h.spatial.slope - target) <= kHolderTolerance &&
                      smooth.spatial.slope >= kSmoothControl;
      pass = pass && ok;
      d << "lambda=" << lambda << ": exponent " << fmt(h.spatial.slope) << " at t=" << fmt(h.t)
        << " (target " << fmt(target) << "), smooth control " << fmt(smooth.spatial.slope) << "; ";
    } catch (const Error& e) {
      pass = false;
      d << "lambda=" << lambda << ": " << e.what() << "; ";
    }
  }
  return {pass, d.str()};
}

// ---- 11: balance-law residual

// Time-integrated |space-integrated residual| on grids n and 2n.
std::pair<double, double> balance_pair(const ScenarioSpec& spec, double lambda, int order) {
  std::vector<double> res;
  for (std::size_t n : {2048u, 4096u}) {
    RunConfig cfg = sweep_cell_config(spec, lambda, 0.4, n);
    cfg.t_max = 2.0 / lambda;
    cfg.blowup_factor = 1e6;
    cfg.scheme_order = order;
    // Snapshot spacing proportional to dt, so it halves with dx.
    cfg.record_every = 8;
    cfg.snapshot_growth = 0.0;
    res.push_back(balance_residual(run(cfg), cfg.lp_exponent()).l1());
  }
  return {res[0], res[1]};
}

Outcome c11_balance(Context&) {
  // A halving residual is first-order convergence, the rate of the first-order
  // scheme. The second-order scheme converges faster; its ratio is reported.
  bool pass = true;
  std::ostringstream d;
  const ScenarioSpec spec = parse_config(kSweepConfig);
  for (double lambda : {0.5, 1.0}) {
    const auto [r1, r2] = balance_pair(spec, lambda, 1);
    const double ratio = r1 / r2;
    const bool ok = ratio >= kBalanceRatioLo && ratio <= kBalanceRatioHi;
    pass = pass && ok;
    const auto [q1, q2] = balance_pair(spec, lambda, 2);
    d << "lambda=" << lambda << ": residual " << fmt(r1) << " -> " << fmt(r2) << ", ratio "
      << fmt(ratio) << " (second-order scheme " << fmt(q1) << " -> " << fmt(q2) << ", ratio "
      << fmt(q1 / q2) << "); ";
  }
  return {pass, d.str()};
}

// ---- 12: companions

Outcome c12_companions(Context&) {
  std::ostringstream d;
  // (a) uniform classical Carlemann: R + S conserved.
  CarlemannConfig a = CarlemannConfig::classical();
  a.R0 = {true, 0.7, ProfileModel::bump_x()};
  a.S0 = {true, -0.3, ProfileModel::bump_x()};
  a.grid = {-1.0, 1.0, 256};
  a.t_max = 1.0;
  const Trajectory ta = carlemann_run(a);
  double drift = 0.0;
  for (const auto& s : ta.snapshots)
    for (std::size_t i = 0; i < s.size(); ++i) drift = std::max(drift, std::abs(s.R[i] + s.S[i] - 0.4));
  const bool pa = drift <= kCarlemannConservation && ta.t_final >= 1.0;
  d << "(a) drift " << fmt(drift) << "; ";

  // (b) R' = R^2, R(0) = 1 blows up at t = 1.
  CarlemannConfig b;
  b.a1 = 1.0;
  b.R0 = {true, 1.0, ProfileModel::bump_x()};
  b.S0 = {true, 0.0, ProfileModel::bump_x()};
  b.grid = {-1.0, 1.0, 1024};
  b.t_max = 2.0;
  const Trajectory tb = carlemann_run(b);
  double t_star = std::numeric_limits<double>::quiet_NaN();
  try {
    t_star = estimate_blowup_time(std::vector<const Trajectory*>{&tb}, {100.0, 1000.0, 10000.0}).t_star;
  } catch (const Error&) {
  }
  const bool pb = std::abs(t_star - 1.0) <= kCarlemannBlowup;
  d << "(b) T* " << fmt(t_star, 7) << "; ";

  // (c) lambda = 2 d'Alembert identity over three grids.
  std::vector<double> res;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    RunConfig cfg;
    cfg.lambda = 2.0;
    cfg.model = SpeedModel::power(1.0);
    cfg.data.kind = InitialData::Kind::primitive;
    cfg.data.u0 = ProfileModel::bump_x();
    cfg.data.u0_amplitude = 0.2;
    cfg.data.u1 = ProfileModel::poly_bump({1.0});
    cfg.data.u1_amplitude = 0.1;
    cfg.grid = {-2.5, 2.5, n};
    cfg.t_max = 1.0;
    res.push_back(dalembert_residual(run(cfg)).max_residual);
  }
  const double o1 = std::log2(res[0] / res[1]);
  const double o2 = std::log2(res[1] / res[2]);
  const bool pc = o1 >= kDalembertOrder && o2 >= kDalembertOrder;
  d << "(c) residual " << fmt(res[0]) << ", " << fmt(res[1]) << ", " << fmt(res[2]) << " orders "
    << fmt(o1, 3) << ", " << fmt(o2, 3) << "; ";

  // (d) degeneracy threshold and presets.
  const Trajectory above = run(degeneracy_preset_above(1.0));
  const Trajectory below = run(degeneracy_preset_below(1.0));
  const DegeneracyReport ra = degeneracy_monitor(above, 1.0);
  const DegeneracyReport rb = degeneracy_monitor(below, 1.0);
  const bool pd = ra.threshold == -1.0 && ra.threshold_closed == -1.0 && ra.consistent &&
                  rb.consistent && !ra.below_threshold && rb.below_threshold;
  d << "(d) threshold " << fmt(ra.threshold, 17) << ", above: " << to_string(above.event)
    << " min(1+u) " << fmt(ra.min_one_plus_u) << ", below: " << to_string(below.event) << " at t="
    << fmt(below.t_final);
  return {pa && pb && pc && pd, d.str()};
}

Outcome c13_determinism(Context& ctx) {
  const SweepResult& first = ctx.sweep_result();
  // Different worker count, same payload.
  const std::size_t w = ctx.workers == 1 ? 2 : 1;
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult second = run_sweep(*ctx.sweep_spec, w);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool same = first.sweep_csv == second.sweep_csv && first.scaling_csv == second.scaling_csv;
  return {same, std::string(same ? "sweep.csv and scaling.csv identical" : "payloads differ") +
                    " (re-run on " + std::to_string(w) + " worker(s), " + fmt(secs, 3) + " s)"};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only, allow;
  Context ctx;
  ctx.workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 4);
  app.add_option("--only", only, "comma-separated criteria to run");
  app.add_option("--allow-fail", allow, "criteria whose failure does not fail the run");
  app.add_option("--workers", ctx.workers, "sweep workers");
  app.add_option("--seed", ctx.seed, "seed of the randomized suites");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected = parse_list(only);
  const std::set<int> allowed = parse_list(allow);

  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria{
      {"algebraic kernel suite", c1_algebraic},
      {"Riccati oracle", c2_riccati},
      {"constants consistency", c3_constants},
      {"linear transport vs d'Alembert", c4_transport},
      {"energy conservation at lambda=1", c5_energy},
      {"sign preservation", c6_sign},
      {"blow-up occurrence and eps-uniformity", c7_blowup},
      {"Riccati comparison", c8_comparison},
      {"eps-scaling fits", c9_scaling},
      {"Hoelder exponent", c10_holder},
      {"balance-law residual", c11_balance},
      {"companions", c12_companions},
      {"determinism", c13_determinism},
  };
  int failures = 0, passes = 0, allowed_failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (o.pass) {
      ++passes;
    } else if (allowed.count(id)) {
      ++allowed_failures;
    } else {
      ++failures;
    }
  }
  std::printf("%d passed, %d failed (%d of them allowed)\n", passes, failures + allowed_failures,
              allowed_failures);
  return failures == 0 ? 0 : 1;
}
