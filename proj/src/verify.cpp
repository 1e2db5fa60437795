#include "quasiblow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "quasiblow/diagnostics.hpp"
#include "quasiblow/riccati.hpp"

namespace quasiblow {

AlgebraicSuiteReport algebraic_suite(std::size_t samples, std::uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-range, range);
  std::uniform_real_distribution<double> exponent(2.0, 20.0);
  AlgebraicSuiteReport rep;
  rep.samples = samples;
  rep.min_inequality_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double R = val(rng);
    const double S = val(rng);
    const double p = exponent(rng);
    const double scale_p = std::pow(std::max({std::abs(R), std::abs(S), 1.0}), p);
    const double id = key_identity_residual(R, S, p) / scale_p;
    const double margin = key_inequality_margin(R, S, p) / scale_p;
    rep.max_identity_ratio = std::max(rep.max_identity_ratio, id);
    rep.min_inequality_ratio = std::min(rep.min_inequality_ratio, margin);
    if (!(id < 1e-12)) ++rep.identity_failures;
    if (!(margin >= 0.0)) ++rep.inequality_failures;
  }
  return rep;
}

namespace {

using State = std::array<double, 1>;

struct RiccatiRhs {
  double a_sq, m_sq;
  void operator()(const State& y, State& dy, double) const { dy[0] = a_sq * y[0] * y[0] - m_sq; }
};

}  // namespace

RiccatiSuiteReport riccati_suite(std::size_t sets, std::uint64_t seed) {
  namespace ode = boost::numeric::odeint;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.5, 2.0);
  std::uniform_real_distribution<double> uy(0.2, 2.0);
  std::uniform_real_distribution<double> ufrac(0.0, 0.95);
  RiccatiSuiteReport rep;
  rep.sets = sets;
  for (std::size_t k = 0; k < sets; ++k) {
    RiccatiParams p;
    const double a = ua(rng);
    p.a_sq = a * a;
    p.y0 = uy(rng);
    p.m = ufrac(rng) * a * p.y0;
    const double T = riccati_blowup_time(p);
    const RiccatiRhs rhs{p.a_sq, p.m * p.m};

    // Dense comparison on [0, 0.9 T].
    auto stepper = ode::make_dense_output(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    State y{p.y0};
    const std::size_t checks = 50;
    std::vector<double> times{0.0};  // the first entry is the start time
    for (std::size_t j = 1; j <= checks; ++j) times.push_back(0.9 * T * static_cast<double>(j) / checks);
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-4 * T,
                         [&](const State& s, double t) {
                           const double exact = riccati_solve(p, t);
                           rep.max_solution_error =
                               std::max(rep.max_solution_error, std::abs(s[0] - exact) / std::abs(exact));
                         });

    // Integrate until y reaches 1e8; the crossing time is interpolated in 1/y.
    auto controlled = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    State z{p.y0};
    double t = 0.0;
    double dt = 1e-3 * T;
    double t_prev = 0.0;
    double z_prev = z[0];
    while (z[0] < 1e8) {
      t_prev = t;
      z_prev = z[0];
      while (controlled.try_step(rhs, z, t, dt) == ode::fail) {
      }
    }
    const double inv0 = 1.0 / z_prev;
    const double inv1 = 1.0 / z[0];
    const double crossing = t_prev + (inv0 - 1e-8) / (inv0 - inv1) * (t - t_prev);
    rep.max_blowup_error = std::max(rep.max_blowup_error, std::abs(crossing - T) / T);

    RiccatiParams lim = p;
    lim.m = 1e-9;
    const double limit = 1.0 / (p.a_sq * p.y0);
    rep.limit_error = std::max(rep.limit_error, std::abs(riccati_blowup_time(lim) - limit) / limit);
  }
  return rep;
}

ConstantsSuiteReport constants_suite(std::size_t sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ulam(0.05, 1.0);
  std::uniform_real_distribution<double> uc0(0.5, 2.0);
  std::uniform_real_distribution<double> uc1(0.1, 2.0);
  std::uniform_real_distribution<double> uphi(-2.0, -0.1);
  ConstantsSuiteReport rep;
  rep.sets = sets;
  for (std::size_t k = 0; k < sets; ++k) {
    const double lambda = ulam(rng);
    const double c0 = uc0(rng);
    const double c1 = uc1(rng);
    const double phi0 = uphi(rng);
    // phi(y) = k y exp(1/(y^2-1)) has phi'(0) = k / e.
    const ProfileModel profile = ProfileModel::poly_bump({0.0, phi0 * std::exp(1.0)});
    const Constants kst = compute_constants(lambda, SpeedModel::affine(c0, c1), profile);
    const double diff = std::abs(kst.t_b - kst.t_b_identity) / std::abs(kst.t_b_identity);
    rep.max_relative_difference = std::max(rep.max_relative_difference, diff);
  }
  return rep;
}

}  // namespace quasiblow
