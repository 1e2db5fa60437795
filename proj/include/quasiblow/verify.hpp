#pragma once

#include <cstddef>
#include <cstdint>

namespace quasiblow {

// Randomized checks of the exact algebraic kernels:
// key_identity_residual / scale^p and key_inequality_margin / scale^p for
// (R, S) uniform in [-range, range]^2 and p uniform in [2, 20].
struct AlgebraicSuiteReport {
  std::size_t samples = 0;
  double max_identity_ratio = 0.0;     // max residual / scale^p
  double min_inequality_ratio = 0.0;   // min margin / scale^p
  std::size_t identity_failures = 0;   // residual >= 1e-12 scale^p
  std::size_t inequality_failures = 0;  // margin < 0
  bool passed() const { return identity_failures == 0 && inequality_failures == 0; }
};

AlgebraicSuiteReport algebraic_suite(std::size_t samples, std::uint64_t seed, double range = 10.0);

// Closed-form Riccati solution against adaptive Runge-Kutta integration.
struct RiccatiSuiteReport {
  std::size_t sets = 0;
  double max_solution_error = 0.0;  // relative, on [0, 0.9 T*]
  double max_blowup_error = 0.0;    // relative, vs integration up to y = 1e8
  double limit_error = 0.0;         // m -> 0 against 1/(a^2 y0), relative
  bool passed() const {
    return max_solution_error < 1e-8 && max_blowup_error < 1e-4 && limit_error < 1e-5;
  }
};

RiccatiSuiteReport riccati_suite(std::size_t sets, std::uint64_t seed);

// t_b from its defining formula against 2 / (cstar3 sigma^2) over random
// (lambda, c0, c1, phi'(0)).
struct ConstantsSuiteReport {
  std::size_t sets = 0;
  double max_relative_difference = 0.0;
  bool passed() const { return max_relative_difference < 1e-12; }
};

ConstantsSuiteReport constants_suite(std::size_t sets, std::uint64_t seed);

}  // namespace quasiblow
