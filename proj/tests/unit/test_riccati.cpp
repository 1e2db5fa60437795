#include <cmath>
#include <limits>

#include "doctest.h"

#include "quasiblow/error.hpp"
#include "quasiblow/riccati.hpp"

using namespace quasiblow;

TEST_CASE("m = 0 reduces to y0 / (1 - a^2 y0 t)") {
  RiccatiParams p{4.0, 0.0, 0.5};
  CHECK(riccati_blowup_time(p) == doctest::Approx(0.5));
  for (double t : {0.0, 0.1, 0.3, 0.49})
    CHECK(riccati_solve(p, t) == doctest::Approx(0.5 / (1.0 - 2.0 * t)));
  CHECK_THROWS_AS(riccati_solve(p, 0.5), OutOfRangeError);
  CHECK_THROWS_AS(riccati_solve(p, -0.1), OutOfRangeError);
}

TEST_CASE("closed form satisfies the ODE and blows up on time") {
  // For a y0 > m, 1/y vanishes at T = log((a y0 + m) / (a y0 - m)) / (2 a m).
  RiccatiParams p{2.25, 0.6, 1.0};
  const double a = 1.5;
  const double T = std::log((a * p.y0 + p.m) / (a * p.y0 - p.m)) / (2.0 * a * p.m);
  CHECK(riccati_blowup_time(p) == doctest::Approx(T));
  const double h = 1e-6;
  for (double t : {0.1, 0.4, 0.8 * T}) {
    const double y = riccati_solve(p, t);
    const double dy = (riccati_solve(p, t + h) - riccati_solve(p, t - h)) / (2 * h);
    CHECK(dy == doctest::Approx(p.a_sq * y * y - p.m * p.m).epsilon(1e-6));
  }
  CHECK(p.blowup_branch());
}

TEST_CASE("below the branch the solution decays towards m / a") {
  RiccatiParams p{1.0, 2.0, 1.0};
  CHECK_FALSE(p.blowup_branch());
  CHECK(std::isinf(riccati_blowup_time(p)));
  CHECK(riccati_solve(p, 50.0) == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("constants of the affine model") {
  // c = 1 + u, lambda = 1: C3 = lambda c1 c0^{-(lambda+1)/2} = 1,
  // sigma^2 = -2^{(lambda-1)/2} c0^{(lambda+1)/2} phi'(0) = 1/e, t_b = 2/(C3 sigma^2) = 2e.
  const Constants k = compute_constants(1.0, SpeedModel::affine(1.0, 1.0), ProfileModel::bump_x());
  CHECK(k.cstar3 == doctest::Approx(1.0));
  CHECK(k.sigma_sq == doctest::Approx(1.0 / std::exp(1.0)));
  CHECK(k.t_b == doctest::Approx(2.0 * std::exp(1.0)));
  CHECK(k.t_b_identity == doctest::Approx(k.t_b));
  CHECK_THROWS_AS(compute_constants(1.5, SpeedModel::affine(1.0, 1.0), ProfileModel::bump_x()),
                  HypothesisError);
  CHECK_THROWS_AS(compute_constants(1.0, SpeedModel::affine(1.0, -1.0), ProfileModel::bump_x()),
                  HypothesisError);
}

TEST_CASE("derivative norm of the bump") {
  // p = 2: int phi'^2 against a midpoint sum.
  const ProfileModel phi = ProfileModel::bump_x();
  const std::size_t n = 200000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = -1.0 + (i + 0.5) * 2.0 / n;
    sum += std::pow(phi.derivative(y), 2) * 2.0 / n;
  }
  CHECK(profile_derivative_norm_p(phi, 2.0) == doctest::Approx(sum).epsilon(1e-8));
}

TEST_CASE("comparison certificate flags the first violation") {
  RiccatiParams p{1.0, 0.0, 1.0};
  std::vector<double> t{0.0, 0.2, 0.4, 0.6};
  std::vector<double> s;
  for (double x : t) s.push_back(riccati_solve(p, x) + 0.01);
  s[2] -= 0.1;
  const ComparisonReport r = comparison_certificate(t, s, p, 2.0, 1e-3, 1.0, 0.9);
  REQUIRE(r.first_violation.has_value());
  CHECK(*r.first_violation == doctest::Approx(0.4));
  CHECK_FALSE(r.passed());
  CHECK(r.onset_before_t_b);
}
