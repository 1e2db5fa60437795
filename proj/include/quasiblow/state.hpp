#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quasiblow/coeffs.hpp"

namespace quasiblow {

/// Uniform cell-centred grid on [x_min, x_max] with n cells.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 16;

  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  double x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
  std::vector<double> nodes() const;

  // Throws ValidationError unless n >= 16 and dx > 0.
  void validate() const;
  Grid1D refined(std::size_t factor) const { return {x_min, x_max, n * factor}; }
};

enum class ProfileFamily { bump_x, poly_bump };

std::string_view to_string(ProfileFamily family);
ProfileFamily profile_family_from_string(std::string_view name);

/// Compactly supported smooth profile phi(x) = P(y) exp(1/(y^2-1)) for |y| < 1,
/// with y the affine map of [s_min, s_max] onto [-1, 1] and P a polynomial.
/// bump_x is the default P(y) = -y on [-1, 1].
class ProfileModel {
 public:
  static ProfileModel bump_x();
  static ProfileModel poly_bump(std::vector<double> poly, double s_min = -1.0, double s_max = 1.0);

  ProfileFamily family() const { return family_; }
  const std::vector<double>& poly() const { return poly_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }

  double value(double x) const;
  double derivative(double x) const;
  // The same profile reflected about the support centre.
  ProfileModel mirrored() const;

 private:
  ProfileModel(ProfileFamily family, std::vector<double> poly, double s_min, double s_max);

  ProfileFamily family_;
  std::vector<double> poly_;
  double s_min_;
  double s_max_;
};

/// Grid-sampled Riemann-type variables R = u_t + c u_x, S = u_t - c u_x and u.
/// Node i sits at the physical position grid.x(i) + x_offset; the offset is
/// nonzero only for runs computed in a moving frame.
struct FieldState {
  Grid1D grid;
  double t = 0.0;
  double x_offset = 0.0;
  std::vector<double> R;
  std::vector<double> S;
  std::vector<double> u;

  static FieldState zeros(const Grid1D& grid, double t = 0.0);
  std::size_t size() const { return u.size(); }
  double x(std::size_t i) const { return grid.x(i) + x_offset; }
  double x_first() const { return x(0); }
  double x_last() const { return x(size() - 1); }
  bool all_finite() const;
};

// Data u0(x) = eps phi(x/eps), u1 = -c(u0) u0_x, giving R(0) = 0 exactly.
// Throws ValidationError if the scaled support does not fit inside the grid.
FieldState build_initial_data(const ProfileModel& profile, double eps, const SpeedModel& model,
                              const Grid1D& grid);

// Generic Cauchy data (u0, u1) with u0, u1 given as profiles scaled by amplitudes.
FieldState build_primitive_data(const ProfileModel& u0, double u0_amplitude,
                                const ProfileModel& u1, double u1_amplitude,
                                const SpeedModel& model, const Grid1D& grid);

std::pair<std::vector<double>, std::vector<double>> rs_from_primitive(
    std::span<const double> u_t, std::span<const double> u_x, std::span<const double> u,
    const SpeedModel& model);

// Inverse of rs_from_primitive: returns (u_t, u_x).
std::pair<std::vector<double>, std::vector<double>> primitive_from_rs(
    std::span<const double> R, std::span<const double> S, std::span<const double> u,
    const SpeedModel& model);

// max_i |D_x u - (R - S) / (2 c(u))| over interior nodes, D_x centred.
double consistency_residual(const FieldState& state, const SpeedModel& model);

struct SnapshotHeader {
  double lambda = 1.0;
  double eps = 0.0;
};

// CSV with a "# t=... lambda=... eps=..." comment line and columns x,R,S,u.
void write_snapshot_csv(std::ostream& out, const FieldState& state, const SnapshotHeader& header);

}  // namespace quasiblow
