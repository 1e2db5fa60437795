#include "quasiblow/state.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "quasiblow/error.hpp"
#include "quasiblow/format.hpp"

namespace quasiblow {

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

void Grid1D::validate() const {
  if (n < 16) throw ValidationError("grid needs n >= 16 cells");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw ValidationError("grid needs finite x_min < x_max");
}

std::string_view to_string(ProfileFamily family) {
  return family == ProfileFamily::bump_x ? "bump_x" : "poly_bump";
}

ProfileFamily profile_family_from_string(std::string_view name) {
  if (name == "bump_x") return ProfileFamily::bump_x;
  if (name == "poly_bump") return ProfileFamily::poly_bump;
  throw ValidationError("unknown profile family '" + std::string(name) + "'");
}

ProfileModel::ProfileModel(ProfileFamily family, std::vector<double> poly, double s_min,
                           double s_max)
    : family_(family), poly_(std::move(poly)), s_min_(s_min), s_max_(s_max) {
  if (!(s_max_ > s_min_)) throw ValidationError("profile support needs s_min < s_max");
  if (poly_.empty()) throw ValidationError("profile polynomial needs at least one coefficient");
}

ProfileModel ProfileModel::bump_x() { return {ProfileFamily::bump_x, {0.0, -1.0}, -1.0, 1.0}; }

ProfileModel ProfileModel::poly_bump(std::vector<double> poly, double s_min, double s_max) {
  return {ProfileFamily::poly_bump, std::move(poly), s_min, s_max};
}

double ProfileModel::value(double x) const {
  const double y = (2.0 * x - (s_min_ + s_max_)) / (s_max_ - s_min_);
  if (std::abs(y) >= 1.0) return 0.0;
  double p = 0.0;
  for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) p = p * y + *it;
  return p * std::exp(1.0 / (y * y - 1.0));
}

double ProfileModel::derivative(double x) const {
  const double scale = 2.0 / (s_max_ - s_min_);
  const double y = (2.0 * x - (s_min_ + s_max_)) / (s_max_ - s_min_);
  if (std::abs(y) >= 1.0) return 0.0;
  double p = 0.0;
  double dp = 0.0;
  for (std::size_t j = poly_.size(); j-- > 0;) {
    dp = dp * y + p;
    p = p * y + poly_[j];
  }
  const double q = y * y - 1.0;
  const double bump = std::exp(1.0 / q);
  const double dbump = bump * (-2.0 * y / (q * q));
  return scale * (dp * bump + p * dbump);
}

ProfileModel ProfileModel::mirrored() const {
  std::vector<double> flipped = poly_;
  for (std::size_t j = 1; j < flipped.size(); j += 2) flipped[j] = -flipped[j];
  return {ProfileFamily::poly_bump, std::move(flipped), s_min_, s_max_};
}

FieldState FieldState::zeros(const Grid1D& grid, double t) {
  FieldState s;
  s.grid = grid;
  s.t = t;
  s.R.assign(grid.n, 0.0);
  s.S.assign(grid.n, 0.0);
  s.u.assign(grid.n, 0.0);
  return s;
}

bool FieldState::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
  };
  return finite(R) && finite(S) && finite(u);
}

FieldState build_initial_data(const ProfileModel& profile, double eps, const SpeedModel& model,
                              const Grid1D& grid) {
  grid.validate();
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (eps * profile.s_min() < grid.x_min || eps * profile.s_max() > grid.x_max) {
    std::ostringstream msg;
    msg << "scaled support [" << eps * profile.s_min() << ", " << eps * profile.s_max()
        << "] exceeds the grid [" << grid.x_min << ", " << grid.x_max << "]";
    throw ValidationError(msg.str());
  }
  FieldState state = FieldState::zeros(grid);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y = grid.x(i) / eps;
    const double u0 = eps * profile.value(y);
    state.u[i] = u0;
    state.S[i] = -2.0 * model.c(u0) * profile.derivative(y);
  }
  return state;
}

FieldState build_primitive_data(const ProfileModel& u0, double u0_amplitude,
                                const ProfileModel& u1, double u1_amplitude,
                                const SpeedModel& model, const Grid1D& grid) {
  grid.validate();
  for (const auto* p : {&u0, &u1}) {
    if (p->s_min() < grid.x_min || p->s_max() > grid.x_max)
      throw ValidationError("initial-data support exceeds the grid");
  }
  FieldState state = FieldState::zeros(grid);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    const double u = u0_amplitude * u0.value(x);
    const double ux = u0_amplitude * u0.derivative(x);
    const double ut = u1_amplitude * u1.value(x);
    const double c = model.c(u);
    state.u[i] = u;
    state.R[i] = ut + c * ux;
    state.S[i] = ut - c * ux;
  }
  return state;
}

std::pair<std::vector<double>, std::vector<double>> rs_from_primitive(
    std::span<const double> u_t, std::span<const double> u_x, std::span<const double> u,
    const SpeedModel& model) {
  if (u_t.size() != u_x.size() || u_t.size() != u.size())
    throw ValidationError("rs_from_primitive: array lengths differ");
  std::vector<double> R(u.size());
  std::vector<double> S(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = model.c(u[i]);
    R[i] = u_t[i] + c * u_x[i];
    S[i] = u_t[i] - c * u_x[i];
  }
  return {std::move(R), std::move(S)};
}

std::pair<std::vector<double>, std::vector<double>> primitive_from_rs(
    std::span<const double> R, std::span<const double> S, std::span<const double> u,
    const SpeedModel& model) {
  if (R.size() != S.size() || R.size() != u.size())
    throw ValidationError("primitive_from_rs: array lengths differ");
  std::vector<double> u_t(u.size());
  std::vector<double> u_x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = model.c(u[i]);
    u_t[i] = 0.5 * (R[i] + S[i]);
    u_x[i] = (R[i] - S[i]) / (2.0 * c);
  }
  return {std::move(u_t), std::move(u_x)};
}

double consistency_residual(const FieldState& state, const SpeedModel& model) {
  const std::size_t n = state.size();
  if (n < 3) return 0.0;
  const double inv2dx = 1.0 / (2.0 * state.grid.dx());
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dudx = (state.u[i + 1] - state.u[i - 1]) * inv2dx;
    const double c = model.c_unchecked(state.u[i]);
    worst = std::max(worst, std::abs(dudx - (state.R[i] - state.S[i]) / (2.0 * c)));
  }
  return worst;
}

void write_snapshot_csv(std::ostream& out, const FieldState& state, const SnapshotHeader& header) {
  out << "# t=" << format_double(state.t) << " lambda=" << format_double(header.lambda)
      << " eps=" << format_double(header.eps) << "\n";
  out << "x,R,S,u\n";
  for (std::size_t i = 0; i < state.size(); ++i) {
    out << format_double(state.x(i)) << ',' << format_double(state.R[i]) << ','
        << format_double(state.S[i]) << ',' << format_double(state.u[i]) << '\n';
  }
}

}  // namespace quasiblow
