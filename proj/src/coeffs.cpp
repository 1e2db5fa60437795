#include "quasiblow/coeffs.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "quasiblow/error.hpp"

namespace quasiblow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketTol = 1e-10;
// Sign scan covers |u| <= kScanLimit; beyond that the domain is unbounded.
constexpr double kScanLimit = 1e4;

double horner(const std::vector<double>& k, double u) {
  double acc = 0.0;
  for (auto it = k.rbegin(); it != k.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double horner_derivative(const std::vector<double>& k, double u) {
  double acc = 0.0;
  for (std::size_t j = k.size(); j-- > 1;) acc = acc * u + static_cast<double>(j) * k[j];
  return acc;
}

std::size_t expected_params(SpeedFamily family) {
  switch (family) {
    case SpeedFamily::power: return 1;
    case SpeedFamily::affine: return 2;
    case SpeedFamily::trigonometric: return 2;
    case SpeedFamily::polynomial: return 0;
  }
  return 0;
}

}  // namespace

std::string_view to_string(SpeedFamily family) {
  switch (family) {
    case SpeedFamily::power: return "power";
    case SpeedFamily::affine: return "affine";
    case SpeedFamily::trigonometric: return "trigonometric";
    case SpeedFamily::polynomial: return "polynomial";
  }
  return "unknown";
}

SpeedFamily speed_family_from_string(std::string_view name) {
  if (name == "power") return SpeedFamily::power;
  if (name == "affine") return SpeedFamily::affine;
  if (name == "trigonometric") return SpeedFamily::trigonometric;
  if (name == "polynomial") return SpeedFamily::polynomial;
  throw ValidationError("unknown speed family '" + std::string(name) + "'");
}

SpeedModel::SpeedModel(SpeedFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  const auto need = expected_params(family_);
  if (need != 0 && params_.size() != need) {
    std::ostringstream msg;
    msg << "speed family " << to_string(family_) << " takes " << need << " parameter(s), got "
        << params_.size();
    throw ValidationError(msg.str());
  }
  if (family_ == SpeedFamily::polynomial && params_.empty())
    throw ValidationError("polynomial speed model needs at least one coefficient");
  for (double p : params_)
    if (!std::isfinite(p)) throw ValidationError("speed model parameters must be finite");
  if (!(c_unchecked(0.0) > 0.0)) throw ValidationError("speed model requires c(0) > 0");
  domain_ = compute_domain();
}

SpeedModel SpeedModel::power(double exponent) { return {SpeedFamily::power, {exponent}}; }

SpeedModel SpeedModel::affine(double c0, double c1) { return {SpeedFamily::affine, {c0, c1}}; }

SpeedModel SpeedModel::trigonometric(double alpha, double beta) {
  return {SpeedFamily::trigonometric, {alpha, beta}};
}

SpeedModel SpeedModel::polynomial(std::vector<double> coefficients) {
  return {SpeedFamily::polynomial, std::move(coefficients)};
}

SpeedModel SpeedModel::from_params(SpeedFamily family, std::vector<double> params) {
  return {family, std::move(params)};
}

double SpeedModel::c_unchecked(double u) const {
  switch (family_) {
    case SpeedFamily::power:
      if (params_[0] == 1.0) return 1.0 + u;
      return std::pow(1.0 + u, params_[0]);
    case SpeedFamily::affine:
      return params_[0] + params_[1] * u;
    case SpeedFamily::trigonometric: {
      const double co = std::cos(u);
      const double si = std::sin(u);
      return params_[0] * co * co + params_[1] * si * si;
    }
    case SpeedFamily::polynomial:
      return horner(params_, u);
  }
  return 0.0;
}

double SpeedModel::c_prime_unchecked(double u) const {
  switch (family_) {
    case SpeedFamily::power: {
      const double a = params_[0];
      if (a == 0.0) return 0.0;
      if (a == 1.0) return 1.0;
      return a * std::pow(1.0 + u, a - 1.0);
    }
    case SpeedFamily::affine:
      return params_[1];
    case SpeedFamily::trigonometric:
      // d/du (alpha cos^2 + beta sin^2) = (beta - alpha) sin(2u)
      return (params_[1] - params_[0]) * std::sin(2.0 * u);
    case SpeedFamily::polynomial:
      return horner_derivative(params_, u);
  }
  return 0.0;
}

void SpeedModel::evaluate(std::span<const double> u, std::span<double> c,
                          std::span<double> c_prime) const {
  const std::size_t n = u.size();
  if (family_ == SpeedFamily::power && params_[0] == 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = 1.0 + u[i];
      c_prime[i] = 1.0;
    }
    return;
  }
  if (family_ == SpeedFamily::affine) {
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = params_[0] + params_[1] * u[i];
      c_prime[i] = params_[1];
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = c_unchecked(u[i]);
    c_prime[i] = c_prime_unchecked(u[i]);
  }
}

void SpeedModel::check_domain(double u) const {
  if (!domain_.contains(u)) {
    std::ostringstream msg;
    msg << "u = " << u << " lies outside the positivity domain (" << domain_.lo << ", "
        << domain_.hi << ") of the " << to_string(family_) << " speed model";
    throw DomainError(msg.str(), u);
  }
}

double SpeedModel::c(double u) const {
  check_domain(u);
  return c_unchecked(u);
}

double SpeedModel::c_prime(double u) const {
  check_domain(u);
  return c_prime_unchecked(u);
}

double SpeedModel::c_power(double u, double q) const {
  check_domain(u);
  if (q == 0.0) return 1.0;
  const double cu = c_unchecked(u);
  if (q == 1.0) return cu;
  return std::pow(cu, q);
}

bool SpeedModel::is_constant() const {
  switch (family_) {
    case SpeedFamily::power: return params_[0] == 0.0;
    case SpeedFamily::affine: return params_[1] == 0.0;
    case SpeedFamily::trigonometric: return params_[0] == params_[1];
    case SpeedFamily::polynomial:
      for (std::size_t j = 1; j < params_.size(); ++j)
        if (params_[j] != 0.0) return false;
      return true;
  }
  return false;
}

Interval SpeedModel::compute_domain() const {
  switch (family_) {
    case SpeedFamily::power:
      if (params_[0] == 0.0) return {};
      return {-1.0, kInf};
    case SpeedFamily::affine: {
      const double c0 = params_[0];
      const double c1 = params_[1];
      if (c1 > 0.0) return {-c0 / c1, kInf};
      if (c1 < 0.0) return {-kInf, -c0 / c1};
      return {};
    }
    case SpeedFamily::trigonometric:
      if (params_[0] > 0.0 && params_[1] > 0.0) return {};
      break;
    case SpeedFamily::polynomial:
      break;
  }

  // Generic bracket: scan outward from 0 for the first sign change, then bisect.
  auto first_zero = [this](double direction) {
    double prev = 0.0;
    double step = 1e-2;
    while (std::abs(prev) < kScanLimit) {
      const double next = prev + direction * step;
      if (c_unchecked(next) <= 0.0) {
        auto f = [this](double u) { return c_unchecked(u); };
        auto tol = [](double a, double b) { return std::abs(b - a) < kBracketTol; };
        const auto [lo, hi] = direction > 0 ? boost::math::tools::bisect(f, prev, next, tol)
                                            : boost::math::tools::bisect(f, next, prev, tol);
        return direction > 0 ? lo : hi;
      }
      prev = next;
      if (std::abs(prev) > 1.0) step = std::min(step * 1.5, 1.0);
    }
    return direction * kInf;
  };
  return {first_zero(-1.0), first_zero(1.0)};
}

}  // namespace quasiblow
