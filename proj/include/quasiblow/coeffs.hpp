#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quasiblow {

enum class SpeedFamily { power, affine, trigonometric, polynomial };

std::string_view to_string(SpeedFamily family);
SpeedFamily speed_family_from_string(std::string_view name);

// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

/// Wave speed c(u) of the quasilinear wave equation together with its
/// derivative and real powers.
///
/// Families and parameter layout:
///   power          {a}             c(u) = (1+u)^a
///   affine         {c0, c1}        c(u) = c0 + c1 u
///   trigonometric  {alpha, beta}   c(u) = alpha cos^2 u + beta sin^2 u
///   polynomial     {k0, k1, ...}   c(u) = sum_j k_j u^j
///
/// The model is immutable after construction. The positivity domain, the
/// largest open interval around 0 on which c > 0, is computed once at
/// construction; evaluating outside it throws DomainError.
class SpeedModel {
 public:
  static SpeedModel power(double exponent);
  static SpeedModel affine(double c0, double c1);
  static SpeedModel trigonometric(double alpha, double beta);
  static SpeedModel polynomial(std::vector<double> coefficients);
  static SpeedModel from_params(SpeedFamily family, std::vector<double> params);

  SpeedFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }

  double c(double u) const;
  double c_prime(double u) const;
  double c_power(double u, double q) const;

  // Evaluation without the domain check, for inner loops that track
  // degeneracy themselves.
  double c_unchecked(double u) const;
  double c_prime_unchecked(double u) const;

  // Unchecked c and c' over a whole array (outputs must have the input's size).
  void evaluate(std::span<const double> u, std::span<double> c, std::span<double> c_prime) const;

  double c0() const { return c_unchecked(0.0); }
  double c1() const { return c_prime_unchecked(0.0); }

  const Interval& domain() const { return domain_; }
  bool in_domain(double u) const { return domain_.contains(u); }

  // True when c' vanishes identically (constant-speed transport).
  bool is_constant() const;

 private:
  SpeedModel(SpeedFamily family, std::vector<double> params);
  void check_domain(double u) const;
  Interval compute_domain() const;

  SpeedFamily family_;
  std::vector<double> params_;
  Interval domain_;
};

}  // namespace quasiblow
