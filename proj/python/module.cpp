#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "quasiblow/error.hpp"
#include "quasiblow/riccati.hpp"
#include "quasiblow/scenario.hpp"
#include "quasiblow/solver.hpp"
#include "quasiblow/verify.hpp"

namespace py = pybind11;
using namespace quasiblow;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

template <class F>
py::array_t<double> sample_column(const Trajectory& tr, F f) {
  std::vector<double> out;
  out.reserve(tr.samples.size());
  for (const auto& s : tr.samples) out.push_back(f(s));
  return as_array(out);
}

py::dict snapshot_dict(const FieldState& s) {
  std::vector<double> x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = s.x(i);
  py::dict d;
  d["t"] = s.t;
  d["x"] = as_array(x);
  d["R"] = as_array(s.R);
  d["S"] = as_array(s.S);
  d["u"] = as_array(s.u);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation core of quasiblow";

  static py::exception<Error> base(m, "QuasiblowError", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<ConfigError> config(m, "ConfigError", validation.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const ValidationError& e) {
      validation(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<SpeedModel>(m, "SpeedModel")
      .def_static("power", &SpeedModel::power, py::arg("a"))
      .def_static("affine", &SpeedModel::affine, py::arg("c0"), py::arg("c1"))
      .def_static("trigonometric", &SpeedModel::trigonometric, py::arg("alpha"), py::arg("beta"))
      .def_static("polynomial", &SpeedModel::polynomial, py::arg("coefficients"))
      .def("c", &SpeedModel::c)
      .def("c_prime", &SpeedModel::c_prime)
      .def_property_readonly("family", [](const SpeedModel& s) { return std::string(to_string(s.family())); })
      .def_property_readonly("params", &SpeedModel::params)
      .def_property_readonly("domain", [](const SpeedModel& s) { return py::make_tuple(s.domain().lo, s.domain().hi); });

  py::class_<ProfileModel>(m, "ProfileModel")
      .def_static("bump_x", &ProfileModel::bump_x)
      .def_static("poly_bump", &ProfileModel::poly_bump, py::arg("poly"), py::arg("s_min") = -1.0,
                  py::arg("s_max") = 1.0)
      .def("value", &ProfileModel::value)
      .def("derivative", &ProfileModel::derivative);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      // `lambda` is a Python keyword.
      .def_readwrite("lam", &RunConfig::lambda)
      .def_readwrite("eps", &RunConfig::eps)
      .def_readwrite("model", &RunConfig::model)
      .def_property(
          "profile", [](const RunConfig& c) { return c.data.profile; },
          [](RunConfig& c, const ProfileModel& p) { c.data.profile = p; })
      .def_readwrite("cfl", &RunConfig::cfl)
      .def_readwrite("t_max", &RunConfig::t_max)
      .def_readwrite("blowup_factor", &RunConfig::blowup_factor)
      .def_readwrite("record_every", &RunConfig::record_every)
      .def_readwrite("scheme_order", &RunConfig::scheme_order)
      .def_readwrite("track_peak", &RunConfig::track_peak)
      .def_readwrite("frame_velocity", &RunConfig::frame_velocity)
      .def_readwrite("check_domain_of_dependence", &RunConfig::check_domain_of_dependence)
      .def("set_grid",
           [](RunConfig& c, double x_min, double x_max, std::size_t n) { c.grid = {x_min, x_max, n}; },
           py::arg("x_min"), py::arg("x_max"), py::arg("n"))
      .def_property_readonly("grid", [](const RunConfig& c) { return py::make_tuple(c.grid.x_min, c.grid.x_max, c.grid.n); })
      .def("validate", &RunConfig::validate);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("event", [](const Trajectory& t) { return std::string(to_string(t.event)); })
      .def_readonly("t_final", &Trajectory::t_final)
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("initial_max_norm", &Trajectory::initial_max_norm)
      .def_readonly("threshold", &Trajectory::threshold)
      .def("resolved_time", [](const Trajectory& t) { return t.resolved_time(); })
      .def_property_readonly("snapshot_count", [](const Trajectory& t) { return t.snapshots.size(); })
      .def("snapshot", [](const Trajectory& t, long k) {
        const long n = static_cast<long>(t.snapshots.size());
        if (k < 0) k += n;
        if (k < 0 || k >= n) throw py::index_error("snapshot index out of range");
        return snapshot_dict(t.snapshots[static_cast<std::size_t>(k)]);
      })
      .def("samples", [](const Trajectory& tr) {
        py::dict d;
        d["t"] = sample_column(tr, [](const DiagnosticSample& s) { return s.t; });
        d["max_abs_R"] = sample_column(tr, [](const DiagnosticSample& s) { return s.max_abs_R; });
        d["max_abs_S"] = sample_column(tr, [](const DiagnosticSample& s) { return s.max_abs_S; });
        d["lp_sum"] = sample_column(tr, [](const DiagnosticSample& s) { return s.lp_sum; });
        d["min_c"] = sample_column(tr, [](const DiagnosticSample& s) { return s.min_c; });
        d["max_c"] = sample_column(tr, [](const DiagnosticSample& s) { return s.max_c; });
        d["energy"] = sample_column(tr, [](const DiagnosticSample& s) { return s.energy; });
        return d;
      });

  m.def("run", [](const RunConfig& cfg) {
    py::gil_scoped_release release;
    return run(cfg);
  }, py::arg("config"));

  m.def("estimate_blowup_time",
        [](const RunConfig& cfg, const std::vector<double>& factors, std::size_t refinements) {
          BlowupEstimate e;
          {
            py::gil_scoped_release release;
            e = estimate_blowup_time(cfg, factors, refinements);
          }
          py::dict d;
          d["t_star"] = e.t_star;
          d["extrapolated"] = e.extrapolated;
          d["refinement_spread"] = e.refinement_spread;
          d["grid_sizes"] = e.grid_sizes;
          d["crossing_times"] = e.crossing_times;
          return d;
        },
        py::arg("config"), py::arg("factors") = std::vector<double>{1.25, 1.5, 1.75, 2.0},
        py::arg("refinements") = 2);

  py::class_<Constants>(m, "Constants")
      .def_readonly("lam", &Constants::lambda)
      .def_readonly("c0", &Constants::c0)
      .def_readonly("c1", &Constants::c1)
      .def_readonly("cstar1", &Constants::cstar1)
      .def_readonly("cstar2", &Constants::cstar2)
      .def_readonly("cstar3", &Constants::cstar3)
      .def_readonly("cstar4", &Constants::cstar4)
      .def_readonly("sigma_sq", &Constants::sigma_sq)
      .def_readonly("t_b", &Constants::t_b);
  m.def("compute_constants",
        py::overload_cast<double, const SpeedModel&, const ProfileModel&>(&compute_constants),
        py::arg("lam"), py::arg("model"), py::arg("profile") = ProfileModel::bump_x());

  py::class_<RiccatiParams>(m, "RiccatiParams")
      .def(py::init([](double a_sq, double m_, double y0) { return RiccatiParams{a_sq, m_, y0}; }),
           py::arg("a_sq"), py::arg("m"), py::arg("y0"))
      .def_readwrite("a_sq", &RiccatiParams::a_sq)
      .def_readwrite("m", &RiccatiParams::m)
      .def_readwrite("y0", &RiccatiParams::y0);
  m.def("riccati_solve", &riccati_solve, py::arg("params"), py::arg("t"));
  m.def("riccati_blowup_time", &riccati_blowup_time, py::arg("params"));

  m.def("parse_config", [](const std::string& text) { return echo_config(parse_config(text)); },
        py::arg("text"), "Validates a configuration document and returns it with defaults filled in.");
  m.def("run_config_file",
        [](const std::filesystem::path& path, const std::filesystem::path& out_dir, std::size_t workers,
           std::optional<std::uint64_t> seed) {
          const ScenarioSpec spec = load_config(path);
          RunOptions opt;
          opt.out_dir = out_dir;
          opt.workers = workers;
          opt.seed = seed;
          py::gil_scoped_release release;
          return run_scenario(spec, opt);
        },
        py::arg("path"), py::arg("out_dir"), py::arg("workers") = 1, py::arg("seed") = py::none(),
        "Runs a configuration file like the command-line tool; returns its exit code.");

  m.def("verify", [](std::size_t samples, std::size_t sets, std::uint64_t seed) {
    py::gil_scoped_release release;
    const auto a = algebraic_suite(samples, seed);
    const auto r = riccati_suite(sets, seed);
    const auto c = constants_suite(sets, seed);
    py::gil_scoped_acquire acquire;
    py::dict d;
    d["algebraic"] = a.passed();
    d["max_identity_ratio"] = a.max_identity_ratio;
    d["riccati"] = r.passed();
    d["max_solution_error"] = r.max_solution_error;
    d["constants"] = c.passed();
    d["max_constants_difference"] = c.max_relative_difference;
    return d;
  }, py::arg("samples") = 10000, py::arg("sets") = 20, py::arg("seed") = 1);
}
