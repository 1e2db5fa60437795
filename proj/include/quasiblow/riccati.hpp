#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "quasiblow/coeffs.hpp"
#include "quasiblow/state.hpp"

namespace quasiblow {

struct RunConfig;

/// Constants of the blow-up argument for a given (lambda, c, phi).
struct Constants {
  double lambda = 1.0;
  double c0 = 1.0;  // c(0)
  double c1 = 1.0;  // c'(0)
  double cstar1 = 0.0;
  double cstar2 = 0.0;
  double cstar3 = 0.0;
  double cstar4 = 0.0;
  double sigma_sq = 0.0;
  double t_b = 0.0;          // from the defining formula
  double t_b_identity = 0.0;  // 2 / (cstar3 sigma_sq)
  double phi_x_norm_p = 0.0;  // int |phi'|^p, p = 2 / lambda
  double phi_x_zero = 0.0;    // phi'(0)
  // Bound on the hypotenuse integrals of |R|^p, |S|^p divided by eps.
  double hypotenuse_bound() const;
};

/// Throws HypothesisError unless lambda in (0, 1], phi'(0) < 0 and c'(0) > 0.
Constants compute_constants(double lambda, const SpeedModel& model, const ProfileModel& profile);
Constants compute_constants(const RunConfig& cfg);

// int |phi'(s)|^p ds over the profile support (adaptive Gauss-Kronrod, tol 1e-10).
double profile_derivative_norm_p(const ProfileModel& profile, double p);

/// y' = a^2 y^2 - m^2, y(0) = y0.
struct RiccatiParams {
  double a_sq = 1.0;
  double m = 0.0;
  double y0 = 1.0;

  void validate() const;
  double a() const;
  bool blowup_branch() const;
};

// a^2 = cstar3, m = sqrt(cstar4) t_b^(1-lambda) eps^lambda, y0 = sigma^2.
RiccatiParams riccati_params(const Constants& k, double eps);

// Closed form, written as y = (y0 - m^2 t g) / (1 - a^2 y0 t g) with
// g = tanh(a m t) / (a m t), which covers m = 0 and both branches without
// overflow. Throws OutOfRangeError for t < 0 or t >= blow-up time.
double riccati_solve(const RiccatiParams& p, double t);

// Infinity when a y0 <= m.
double riccati_blowup_time(const RiccatiParams& p);

struct ComparisonReport {
  double min_margin = std::numeric_limits<double>::infinity();  // min s(t) - y(t)
  double min_margin_time = 0.0;
  std::optional<double> first_violation;  // first t with s - y < -tolerance
  double tolerance = 0.0;
  std::size_t samples_used = 0;
  double riccati_blowup = 0.0;
  double t_b = 0.0;
  std::optional<double> onset;  // observed blow-up onset, if known
  bool onset_before_t_b = false;
  bool passed() const { return !first_violation.has_value(); }
};

/// Compares traced s(t) samples against the closed form on t <= t_limit
/// (samples past the Riccati blow-up are skipped).
ComparisonReport comparison_certificate(const std::vector<double>& t, const std::vector<double>& s,
                                        const RiccatiParams& params, double t_b, double tolerance,
                                        double t_limit = std::numeric_limits<double>::infinity(),
                                        std::optional<double> onset = std::nullopt);

}  // namespace quasiblow
