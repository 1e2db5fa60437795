#include <cmath>

#include "doctest.h"

#include "quasiblow/coeffs.hpp"
#include "quasiblow/error.hpp"

using namespace quasiblow;

TEST_CASE("power model and its derivative") {
  const SpeedModel m = SpeedModel::power(1.5);
  CHECK(m.c(0.0) == doctest::Approx(1.0));
  CHECK(m.c(0.44) == doctest::Approx(std::pow(1.44, 1.5)));
  CHECK(m.c_prime(0.44) == doctest::Approx(1.5 * std::sqrt(1.44)));
  CHECK(m.c_power(0.44, -0.5) == doctest::Approx(std::pow(1.44, -0.75)));
  CHECK(m.domain().lo == -1.0);
  CHECK(std::isinf(m.domain().hi));
  CHECK_THROWS_AS(m.c(-1.0), DomainError);
  CHECK(m.c_unchecked(-0.5) == doctest::Approx(std::pow(0.5, 1.5)));
}

TEST_CASE("affine model domain is where c0 + c1 u > 0") {
  const SpeedModel m = SpeedModel::affine(2.0, 0.5);
  CHECK(m.c0() == 2.0);
  CHECK(m.c1() == 0.5);
  CHECK(m.domain().lo == doctest::Approx(-4.0));
  CHECK(m.in_domain(-3.9));
  CHECK_FALSE(m.in_domain(-4.1));
  CHECK(SpeedModel::affine(1.0, 0.0).is_constant());
  CHECK_FALSE(m.is_constant());
}

TEST_CASE("trigonometric model") {
  const SpeedModel m = SpeedModel::trigonometric(1.0, 3.0);
  const double u = 0.3;
  CHECK(m.c(u) == doctest::Approx(std::cos(u) * std::cos(u) + 3.0 * std::sin(u) * std::sin(u)));
  // d/du (alpha cos^2 + beta sin^2) = (beta - alpha) sin 2u
  CHECK(m.c_prime(u) == doctest::Approx(2.0 * std::sin(2.0 * u)));
  CHECK(std::isinf(m.domain().lo));
}

TEST_CASE("polynomial model domain stops at the nearest root") {
  // c = 1 - u^2 vanishes at +-1.
  const SpeedModel m = SpeedModel::polynomial({1.0, 0.0, -1.0});
  CHECK(m.domain().lo == doctest::Approx(-1.0));
  CHECK(m.domain().hi == doctest::Approx(1.0));
  CHECK(m.c_prime(0.5) == doctest::Approx(-1.0));
}

TEST_CASE("array evaluation matches pointwise evaluation") {
  const SpeedModel m = SpeedModel::power(2.0);
  const std::vector<double> u{-0.5, 0.0, 0.25, 1.0};
  std::vector<double> c(u.size()), cp(u.size());
  m.evaluate(u, c, cp);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(c[i] == doctest::Approx(m.c(u[i])));
    CHECK(cp[i] == doctest::Approx(m.c_prime(u[i])));
  }
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(SpeedModel::affine(-1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(SpeedModel::polynomial({}), ValidationError);
  CHECK_THROWS_AS(SpeedModel::from_params(SpeedFamily::power, {1.0, 2.0}), ValidationError);
  CHECK(speed_family_from_string("trigonometric") == SpeedFamily::trigonometric);
  CHECK_THROWS_AS(speed_family_from_string("cubic"), ValidationError);
}
