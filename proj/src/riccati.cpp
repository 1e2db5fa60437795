#include "quasiblow/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "quasiblow/error.hpp"
#include "quasiblow/solver.hpp"

namespace quasiblow {

double Constants::hypotenuse_bound() const {
  return std::pow(2.0, 4.0 / lambda) * std::pow(c0, 2.0 / lambda) * phi_x_norm_p + 1.0;
}

double profile_derivative_norm_p(const ProfileModel& profile, double p) {
  auto f = [&](double s) { return std::pow(std::abs(profile.derivative(s)), p); };
  // Split at the centre so the kernel sees the interior maximum of phi'.
  const double mid = 0.5 * (profile.s_min() + profile.s_max());
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return GK::integrate(f, profile.s_min(), mid, 15, 1e-10) +
         GK::integrate(f, mid, profile.s_max(), 15, 1e-10);
}

Constants compute_constants(double lambda, const SpeedModel& model, const ProfileModel& profile) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw HypothesisError("blow-up constants need lambda in (0, 1]");
  Constants k;
  k.lambda = lambda;
  k.c0 = model.c0();
  k.c1 = model.c1();
  k.phi_x_zero = profile.derivative(0.0);
  if (!(k.phi_x_zero < 0.0)) {
    std::ostringstream msg;
    msg << "blow-up constants need phi'(0) < 0, got " << k.phi_x_zero;
    throw HypothesisError(msg.str());
  }
  if (!(k.c1 > 0.0)) {
    std::ostringstream msg;
    msg << "blow-up constants need c'(0) > 0, got " << k.c1;
    throw HypothesisError(msg.str());
  }
  const double p = 2.0 / lambda;
  const double c0 = k.c0;
  const double c1 = k.c1;
  k.phi_x_norm_p = profile_derivative_norm_p(profile, p);
  k.cstar1 = (c1 / c0) * std::pow((2.0 / c0) * k.hypotenuse_bound(), lambda);
  k.cstar2 = std::pow(2.0, (4.0 + lambda) / lambda) * std::pow(c0, 2.0 / lambda);
  k.cstar3 = lambda * c1 * std::pow(c0, -(lambda + 1.0) / 2.0);
  k.cstar4 = 2.0 * (2.0 - lambda) * c1 * std::pow(c0, (lambda - 3.0) / 2.0) * k.cstar1 * k.cstar1;
  k.sigma_sq = -std::pow(2.0, (lambda - 1.0) / 2.0) * std::pow(c0, (lambda + 1.0) / 2.0) * k.phi_x_zero;
  k.t_b = -std::pow(2.0, (3.0 - lambda) / 2.0) /
          (k.cstar3 * std::pow(c0, (lambda + 1.0) / 2.0) * k.phi_x_zero);
  k.t_b_identity = 2.0 / (k.cstar3 * k.sigma_sq);
  return k;
}

Constants compute_constants(const RunConfig& cfg) {
  if (cfg.data.kind != InitialData::Kind::scaled_profile)
    throw HypothesisError("blow-up constants need the scaled data family");
  return compute_constants(cfg.lambda, cfg.model, cfg.data.profile);
}

void RiccatiParams::validate() const {
  if (!(a_sq > 0.0) || !std::isfinite(a_sq)) throw ValidationError("Riccati a^2 must be positive");
  if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("Riccati m must be >= 0");
  if (!std::isfinite(y0)) throw ValidationError("Riccati y0 must be finite");
}

double RiccatiParams::a() const { return std::sqrt(a_sq); }

bool RiccatiParams::blowup_branch() const { return a() * y0 > m; }

RiccatiParams riccati_params(const Constants& k, double eps) {
  RiccatiParams p;
  p.a_sq = k.cstar3;
  p.m = std::sqrt(k.cstar4) * std::pow(k.t_b, 1.0 - k.lambda) * std::pow(eps, k.lambda);
  p.y0 = k.sigma_sq;
  return p;
}

double riccati_blowup_time(const RiccatiParams& p) {
  p.validate();
  const double a = p.a();
  if (!(a * p.y0 > p.m)) return std::numeric_limits<double>::infinity();
  if (p.m == 0.0) return 1.0 / (p.a_sq * p.y0);
  // tanh(a m T) = m / (a y0)
  return std::atanh(p.m / (a * p.y0)) / (a * p.m);
}

double riccati_solve(const RiccatiParams& p, double t) {
  p.validate();
  if (!(t >= 0.0)) throw OutOfRangeError("riccati_solve: t must be >= 0");
  const double t_star = riccati_blowup_time(p);
  if (!(t < t_star)) {
    std::ostringstream msg;
    msg << "riccati_solve: t = " << t << " is not before the blow-up time " << t_star;
    throw OutOfRangeError(msg.str());
  }
  const double x = p.a() * p.m * t;
  const double g = x < 1e-8 ? 1.0 - x * x / 3.0 : std::tanh(x) / x;
  return (p.y0 - p.m * p.m * t * g) / (1.0 - p.a_sq * p.y0 * t * g);
}

ComparisonReport comparison_certificate(const std::vector<double>& t, const std::vector<double>& s,
                                        const RiccatiParams& params, double t_b, double tolerance,
                                        double t_limit, std::optional<double> onset) {
  if (t.size() != s.size()) throw ValidationError("comparison_certificate: length mismatch");
  ComparisonReport rep;
  rep.tolerance = tolerance;
  rep.riccati_blowup = riccati_blowup_time(params);
  rep.t_b = t_b;
  rep.onset = onset;
  rep.onset_before_t_b = onset.has_value() && *onset < t_b;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > t_limit || !(t[i] < rep.riccati_blowup)) continue;
    const double margin = s[i] - riccati_solve(params, t[i]);
    ++rep.samples_used;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.min_margin_time = t[i];
    }
    if (!rep.first_violation && margin < -tolerance) rep.first_violation = t[i];
  }
  return rep;
}

}  // namespace quasiblow
