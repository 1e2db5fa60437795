#pragma once

// Semi-discrete upwind machinery for diagonal 2x2 systems
//   R_t - c R_x = f(R, S, u),  S_t + c S_x = g(R, S, u),  u_t = h(R, S),
// shared by the wave solver and the Carlemann companion.
//
// The grid may move with velocity v. In the frame xi = x - v t the speeds
// become -c - v and c - v, and since u_x = (R - S) / (2c) the frame
// derivative of u is h + v (R - S) / (2c), which needs no stencil.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "quasiblow/solver.hpp"
#include "quasiblow/state.hpp"

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace quasiblow::detail {

inline double minmod(double a, double b) {
  // 0 when the signs differ, otherwise the argument of smaller magnitude;
  // written without branches so the face loops vectorize.
  const double same = 0.5 * (std::copysign(1.0, a) + std::copysign(1.0, b));
  return same * std::min(std::abs(a), std::abs(b));
}

struct Rates {
  std::vector<double> R;
  std::vector<double> S;
  std::vector<double> u;

  void resize(std::size_t n) {
    R.resize(n);
    S.resize(n);
    u.resize(n);
  }
};

/// Physics must provide
///   const SpeedModel& model() const;
///   void sources(double R, double S, double inv_c, double c_prime, double& fR, double& fS) const;
///   double u_rate(double R, double S) const;
template <class Physics>
class UpwindScheme {
 public:
  UpwindScheme(Physics physics, int order, double frame_velocity = 0.0, bool quiescent = true)
      : physics_(std::move(physics)), order_(order), v_(frame_velocity), quiescent_(quiescent) {}

  const Physics& physics() const { return physics_; }
  double frame_velocity() const { return v_; }
  void set_frame_velocity(double v) { v_ = v; }

  // Largest grid-relative characteristic speed.
  double max_speed(const FieldState& s) {
    coefficients(s);
    double m = 0.0;
    for (double c : c_) m = std::max(m, std::abs(c) + std::abs(v_));
    return m;
  }

  // Out-of-place step: writes the advanced state into out (which must not alias s).
  void advance(const FieldState& s, double dt, FieldState& out) {
    out.grid = s.grid;
    out.R.resize(s.size());
    out.S.resize(s.size());
    out.u.resize(s.size());
    if (order_ == 1) {
      evaluate(s, k1_);
      axpy(out, s, dt, k1_);
    } else {
      // SSP-RK2: U1 = U + dt L(U); U+ = (U + U1 + dt L(U1)) / 2
      evaluate(s, k1_);
      stage_.grid = s.grid;
      stage_.R.resize(s.size());
      stage_.S.resize(s.size());
      stage_.u.resize(s.size());
      axpy(stage_, s, dt, k1_);
      evaluate(stage_, k2_);
      combine(out, s, &stage_, dt, k2_);
    }
    out.t = s.t + dt;
    out.x_offset = s.x_offset + v_ * dt;
  }

  FieldState advance(const FieldState& s, double dt) {
    FieldState out;
    advance(s, dt, out);
    return out;
  }

 private:
  static void axpy(FieldState& out, const FieldState& s, double dt, const Rates& k) {
    combine(out, s, nullptr, dt, k);
  }

  // out = s + dt k, or (s + mid + dt k) / 2 when mid is given.
  static void combine(FieldState& out, const FieldState& s, const FieldState* mid, double dt,
                      const Rates& k) {
    const std::size_t n = s.size();
    const double* __restrict in[3] = {s.R.data(), s.S.data(), s.u.data()};
    const double* __restrict rate[3] = {k.R.data(), k.S.data(), k.u.data()};
    double* __restrict dst[3] = {out.R.data(), out.S.data(), out.u.data()};
    for (int f = 0; f < 3; ++f) {
      const double* __restrict a = in[f];
      const double* __restrict r = rate[f];
      double* __restrict o = dst[f];
      if (mid) {
        const double* __restrict m = f == 0 ? mid->R.data() : f == 1 ? mid->S.data() : mid->u.data();
        for (std::size_t i = 0; i < n; ++i) o[i] = 0.5 * (a[i] + m[i] + dt * r[i]);
      } else {
        for (std::size_t i = 0; i < n; ++i) o[i] = a[i] + dt * r[i];
      }
    }
  }

  void coefficients(const FieldState& s) {
    c_.resize(s.size());
    cp_.resize(s.size());
    physics_.model().evaluate(s.u, c_, cp_);
  }

  // Face values of q: from_left[i] is the value at face i+1/2 reconstructed
  // from cell i, from_right[i] the value at face i-1/2 reconstructed from cell i.
  // Ghost cells hold zero (quiescent) or repeat the edge value; the edge
  // cells carry no slope.
  void faces(const std::vector<double>& q, std::vector<double>& from_left,
             std::vector<double>& from_right) const {
    const std::size_t n = q.size();
    from_left.resize(n + 2);
    from_right.resize(n + 2);
    // Shifted by one: entries 0 and n+1 are the ghost cells.
    from_left[0] = from_right[0] = quiescent_ ? 0.0 : q[0];
    from_left[n + 1] = from_right[n + 1] = quiescent_ ? 0.0 : q[n - 1];
    from_left[1] = from_right[1] = q[0];
    from_left[n] = from_right[n] = q[n - 1];
    const double* __restrict a = q.data();
    double* __restrict fl = from_left.data() + 1;
    double* __restrict fr = from_right.data() + 1;
    const double limit = order_ == 1 ? 0.0 : 0.5;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double half = limit * minmod(a[i] - a[i - 1], a[i + 1] - a[i]);
      fl[i] = a[i] + half;
      fr[i] = a[i] - half;
    }
  }

  void evaluate(const FieldState& s, Rates& k) {
    const std::size_t n = s.size();
    k.resize(n);
    coefficients(s);
    faces(s.R, rl_, rr_);
    faces(s.S, sl_, sr_);
    const double inv_dx = 1.0 / s.grid.dx();
    const double v = v_;
    const double* __restrict rl = rl_.data() + 1;
    const double* __restrict rr = rr_.data() + 1;
    const double* __restrict sl = sl_.data() + 1;
    const double* __restrict sr = sr_.data() + 1;
    const double* __restrict cs = c_.data();
    const double* __restrict cps = cp_.data();
    const double* __restrict Rs = s.R.data();
    const double* __restrict Ss = s.S.data();
    double* __restrict kR = k.R.data();
    double* __restrict kS = k.S.data();
    double* __restrict ku = k.u.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double c = cs[i];
      const double R = Rs[i];
      const double S = Ss[i];
      const double aR = -c - v;
      const double aS = c - v;
      // Upwind differences; rl[i-1] and rr[i+1] may be ghost entries.
      const double dR_plus = rl[i] - rl[i - 1];
      const double dR_minus = rr[i + 1] - rr[i];
      const double dS_plus = sl[i] - sl[i - 1];
      const double dS_minus = sr[i + 1] - sr[i];
      // a q_x ~ max(a, 0) D+ q + min(a, 0) D- q
      const double transport_R = std::max(aR, 0.0) * dR_plus + std::min(aR, 0.0) * dR_minus;
      const double transport_S = std::max(aS, 0.0) * dS_plus + std::min(aS, 0.0) * dS_minus;
      double fR = 0.0;
      double fS = 0.0;
      const double inv_c = 1.0 / c;
      physics_.sources(R, S, inv_c, cps[i], fR, fS);
      kR[i] = fR - transport_R * inv_dx;
      kS[i] = fS - transport_S * inv_dx;
      ku[i] = physics_.u_rate(R, S) + 0.5 * v * (R - S) * inv_c;
    }
  }

  Physics physics_;
  int order_;
  double v_;
  bool quiescent_;
  Rates k1_;
  Rates k2_;
  FieldState stage_;
  std::vector<double> c_, cp_;
  std::vector<double> rl_, rr_, sl_, sr_;
};


// Flushes subnormal results and operands to zero while alive. The bump
// profile's tails exp(1/(y^2-1)) and their squares underflow into the
// subnormal range, where x86 arithmetic is two orders of magnitude slower.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

// Per-step scan of a state: the diagnostic sample plus what the event logic needs.
struct SampleScan {
  bool finite = true;
  double min_u = 0.0;
  double max_u = 0.0;
  std::size_t max_S_index = 0;  // cell of the largest (signed) S
  std::vector<double> c;
  std::vector<double> c_prime;
};

DiagnosticSample scan_state(const FieldState& state, const SpeedModel& model, double lambda,
                            double dt, SampleScan& scan);

struct Outflow {
  double lp = 0.0;
  double energy = 0.0;
};

// Rate at which int |R|^p + |S|^p (and the energy) leave the grid through its
// end faces. In the frame the density Q = |R|^p + |S|^p obeys, up to sources,
// Q_t = (c P + v Q)_xi with P = |R|^p - |S|^p; edge cells stand in for the faces.
inline Outflow boundary_outflow(const FieldState& s, const SpeedModel& model, double lambda,
                                double v) {
  const double p = 2.0 / lambda;
  auto flux = [&](std::size_t i, double q) {
    const double c = model.c_unchecked(s.u[i]);
    const double a = q == 2.0 ? s.R[i] * s.R[i] : std::pow(std::abs(s.R[i]), q);
    const double b = q == 2.0 ? s.S[i] * s.S[i] : std::pow(std::abs(s.S[i]), q);
    return c * (a - b) + v * (a + b);
  };
  const std::size_t last = s.size() - 1;
  Outflow out;
  out.lp = flux(0, p) - flux(last, p);
  // energy density is (R^2 + S^2) / 2
  out.energy = 0.5 * (flux(0, 2.0) - flux(last, 2.0));
  return out;
}

inline std::size_t auto_record_every(const RunConfig& cfg, double first_dt) {
  if (cfg.record_every > 0) return cfg.record_every;
  const double steps = cfg.t_max / std::max(first_dt, 1e-300);
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps / 256.0));
}

/// Time-stepping loop with the shared event model: stop at t_max, at the
/// blow-up threshold, on degeneracy (min c <= 1e-12 c0 or u outside the
/// positivity domain) or on a non-finite value (the last finite state is kept).
template <class Physics>
Trajectory run_scheme(const RunConfig& cfg, FieldState state, UpwindScheme<Physics>& scheme) {
  FlushDenormals flush;
  Trajectory traj;
  traj.config = cfg;
  const SpeedModel& model = cfg.model;
  const double c0 = model.c0();
  const double dx = state.grid.dx();
  double v = cfg.frame_velocity;

  SampleScan scan;
  traj.samples.push_back(scan_state(state, model, cfg.lambda, 0.0, scan));
  traj.snapshots.push_back(state);
  traj.initial_max_norm = std::max(traj.samples[0].max_abs_R, traj.samples[0].max_abs_S);
  traj.threshold = cfg.blowup_threshold.value_or(
      traj.initial_max_norm > 0.0 ? cfg.blowup_factor * traj.initial_max_norm
                                  : std::numeric_limits<double>::infinity());
  double last_snapshot_norm = traj.initial_max_norm;

  const double growth_coeff = cfg.lambda + 2.0 * std::abs(1.0 - cfg.lambda) + (2.0 - cfg.lambda);
  std::size_t record_every = 0;
  std::size_t since_snapshot = 0;
  FieldState next;

  traj.event = TerminalEvent::reached_t_max;
  const double t_end = cfg.t_max;
  while (state.t < t_end) {
    const DiagnosticSample& prev = traj.samples.back();
    if (cfg.track_peak) {
      v = scan.c[scan.max_S_index];
      scheme.set_frame_velocity(v);
    }
    const Outflow out_before = boundary_outflow(state, model, cfg.lambda, v);
    const double cmax = std::max(std::abs(prev.max_c), std::abs(prev.min_c)) + std::abs(v);
    double dt = cfg.cfl * dx / std::max(cmax, 1e-300);
    if (record_every == 0) record_every = auto_record_every(cfg, dt);
    bool last = false;
    if (state.t + dt >= t_end) {
      dt = t_end - state.t;
      last = true;
    }

    scheme.advance(state, dt, next);
    if (last) next.t = t_end;
    ++traj.steps;

    DiagnosticSample smp = scan_state(next, model, cfg.lambda, dt, scan);
    if (!scan.finite) {
      traj.event = TerminalEvent::nonfinite_value;
      if (traj.snapshots.back().t != state.t) traj.snapshots.push_back(state);
      break;
    }
    const bool degenerate = !model.in_domain(scan.min_u) || !model.in_domain(scan.max_u) ||
                            !(smp.min_c > 1e-12 * c0);

    const double norm = std::max(smp.max_abs_R, smp.max_abs_S);
    if (cfg.check_growth_bound) {
      const double m = std::max(prev.max_abs_R, prev.max_abs_S);
      const double bound = m + dt * prev.max_abs_dlogc / 4.0 * growth_coeff * m * m;
      if (norm > bound * (1.0 + 1e-12) + 1e-300) ++traj.growth_bound_violations;
    }

    const Outflow out_after = boundary_outflow(next, model, cfg.lambda, v);
    smp.lp_outflow = prev.lp_outflow + 0.5 * dt * (out_before.lp + out_after.lp);
    smp.energy_outflow = prev.energy_outflow + 0.5 * dt * (out_before.energy + out_after.energy);
    traj.samples.push_back(smp);
    std::swap(state, next);

    if (degenerate) {
      traj.event = TerminalEvent::degeneracy;
      traj.snapshots.push_back(state);
      break;
    }
    if (norm >= traj.threshold) {
      traj.event = TerminalEvent::blowup_threshold_crossed;
      traj.snapshots.push_back(state);
      break;
    }

    ++since_snapshot;
    const bool grew = cfg.snapshot_growth > 0.0 && norm >= cfg.snapshot_growth * last_snapshot_norm;
    if (since_snapshot >= record_every || grew || state.t >= t_end) {
      traj.snapshots.push_back(state);
      since_snapshot = 0;
      last_snapshot_norm = norm;
    }
  }
  traj.t_final = traj.samples.back().t;
  return traj;
}

}  // namespace quasiblow::detail
