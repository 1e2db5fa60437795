#include "quasiblow/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "quasiblow/characteristics.hpp"
#include "quasiblow/format.hpp"
#include "quasiblow/verify.hpp"
#include "svg.hpp"

namespace quasiblow {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::simulate: return "simulate";
    case ScenarioKind::sweep: return "sweep";
    case ScenarioKind::riccati: return "riccati";
    case ScenarioKind::carlemann: return "carlemann";
    case ScenarioKind::psystem: return "psystem";
    case ScenarioKind::verify: return "verify";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (auto k : {ScenarioKind::simulate, ScenarioKind::sweep, ScenarioKind::riccati,
                 ScenarioKind::carlemann, ScenarioKind::psystem, ScenarioKind::verify})
    if (name == to_string(k)) return k;
  throw ConfigError("/kind", "unknown scenario kind '" + std::string(name) + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- reading

std::string line_column(std::string_view doc, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, doc.size()); ++i) {
    if (doc[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the byte after the offending token.
  if (col > 1) --col;
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Object view that remembers which keys were read, so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
  }

  std::string where() const { return path_.empty() ? "/" : path_; }
  std::string key(const std::string& k) const { return path_ + "/" + k; }

  bool has(const std::string& k) {
    used_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& at(const std::string& k) {
    if (!has(k)) throw ConfigError(key(k), "missing required key");
    return j_.at(k);
  }
  Reader child(const std::string& k) { return Reader(at(k), key(k)); }

  double number(const std::string& k, double def) { return has(k) ? as_number(at(k), key(k)) : def; }
  std::optional<double> opt_number(const std::string& k) {
    if (!has(k)) return std::nullopt;
    return as_number(at(k), key(k));
  }
  std::size_t count(const std::string& k, std::size_t def) {
    return has(k) ? as_count(at(k), key(k)) : def;
  }
  bool flag(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_number(v[i], key(k) + "/" + std::to_string(i)));
    return out;
  }
  std::vector<std::size_t> counts(const std::string& k, std::vector<std::size_t> def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_count(v[i], key(k) + "/" + std::to_string(i)));
    return out;
  }
  std::vector<std::string> texts(const std::string& k, std::vector<std::string> def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ConfigError(key(k) + "/" + std::to_string(i), "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "expected a finite number");
    return x;
  }
  static std::size_t as_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw ConfigError(where, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// Rethrows library validation errors with the key they came from.
template <class F>
auto at_key(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const HypothesisError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(where, e.what());
  }
}

SpeedModel parse_model(Reader r) {
  const std::string family = r.text("family", "power");
  const std::vector<double> params = r.numbers("params", {1.0});
  r.finish();
  return at_key(r.where(), [&] {
    return SpeedModel::from_params(speed_family_from_string(family), params);
  });
}

ProfileModel parse_profile(Reader r) {
  const std::string family = r.text("family", "bump_x");
  const bool has_params = r.has("params");
  const std::vector<double> params = r.numbers("params", {});
  const std::vector<double> support = r.numbers("support", {-1.0, 1.0});
  r.finish();
  return at_key(r.where(), [&] {
    const ProfileFamily fam = profile_family_from_string(family);
    if (support.size() != 2) throw ValidationError("support must be [s_min, s_max]");
    if (fam == ProfileFamily::bump_x) {
      if (has_params && !params.empty()) throw ValidationError("bump_x takes no params");
      if (support[0] != -1.0 || support[1] != 1.0)
        throw ValidationError("bump_x has the fixed support [-1, 1]");
      return ProfileModel::bump_x();
    }
    return ProfileModel::poly_bump(params, support[0], support[1]);
  });
}

Grid1D parse_grid(Reader r) {
  Grid1D g;
  g.x_min = r.number("x_min", g.x_min);
  g.x_max = r.number("x_max", g.x_max);
  g.n = r.count("n", g.n);
  r.finish();
  at_key(r.where(), [&] {
    g.validate();
    return 0;
  });
  return g;
}

CarlemannProfile parse_carlemann_profile(Reader r) {
  CarlemannProfile p;
  p.uniform = r.flag("uniform", false);
  p.amplitude = r.number("amplitude", 0.0);
  if (r.has("profile")) p.profile = parse_profile(r.child("profile"));
  r.finish();
  return p;
}

std::pair<ProfileModel, double> parse_component(Reader r) {
  ProfileModel p = ProfileModel::bump_x();
  if (r.has("profile")) p = parse_profile(r.child("profile"));
  const double amp = r.number("amplitude", 0.0);
  r.finish();
  return {p, amp};
}

InitialData parse_data(Reader r, const ProfileModel& profile) {
  InitialData d;
  d.profile = profile;
  const std::string kind = r.text("kind", "scaled_profile");
  if (kind == "scaled_profile") {
    d.kind = InitialData::Kind::scaled_profile;
  } else if (kind == "primitive") {
    d.kind = InitialData::Kind::primitive;
    if (r.has("u0")) std::tie(d.u0, d.u0_amplitude) = parse_component(r.child("u0"));
    if (r.has("u1")) std::tie(d.u1, d.u1_amplitude) = parse_component(r.child("u1"));
  } else {
    throw ConfigError(r.key("kind"), "expected scaled_profile or primitive");
  }
  r.finish();
  return d;
}

// ---------------------------------------------------------------- echo

json profile_json(const ProfileModel& p) {
  json j;
  j["family"] = std::string(to_string(p.family()));
  if (p.family() == ProfileFamily::poly_bump) {
    j["params"] = p.poly();
    j["support"] = {p.s_min(), p.s_max()};
  }
  return j;
}

json model_json(const SpeedModel& m) {
  json j;
  j["family"] = std::string(to_string(m.family()));
  j["params"] = m.params();
  return j;
}

json grid_json(const Grid1D& g) { return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}}; }

json carlemann_profile_json(const CarlemannProfile& p) {
  return {{"uniform", p.uniform}, {"amplitude", p.amplitude}, {"profile", profile_json(p.profile)}};
}

json spec_json(const ScenarioSpec& spec) {
  const RunConfig& c = spec.run;
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["seed"] = spec.seed;
  j["lambda"] = c.lambda;
  j["eps"] = c.eps;
  j["model"] = model_json(c.model);
  j["profile"] = profile_json(c.data.profile);
  json data;
  if (c.data.kind == InitialData::Kind::scaled_profile) {
    data["kind"] = "scaled_profile";
  } else {
    data["kind"] = "primitive";
    data["u0"] = {{"profile", profile_json(c.data.u0)}, {"amplitude", c.data.u0_amplitude}};
    data["u1"] = {{"profile", profile_json(c.data.u1)}, {"amplitude", c.data.u1_amplitude}};
  }
  j["data"] = data;
  j["grid"] = grid_json(c.grid);
  j["cfl"] = c.cfl;
  j["t_max"] = c.t_max;
  j["scheme_order"] = c.scheme_order;
  j["record_every"] = c.record_every;
  j["frame"] = {{"velocity", c.frame_velocity}, {"track_peak", c.track_peak}};
  j["check_domain_of_dependence"] = c.check_domain_of_dependence;
  j["boundary"] = std::string(to_string(c.boundary));
  json th;
  th["blowup_factor"] = c.blowup_factor;
  th["blowup_threshold"] = c.blowup_threshold ? json(*c.blowup_threshold) : json(nullptr);
  th["snapshot_growth"] = c.snapshot_growth;
  th["extrapolation_factors"] = spec.extrapolation_factors;
  j["thresholds"] = th;
  j["theorem"] = spec.theorem;
  j["expect"] = {{"event", spec.expect_event ? json(*spec.expect_event) : json(nullptr)}};
  switch (spec.kind) {
    case ScenarioKind::sweep:
      j["sweep"] = {{"eps", spec.axes.eps},
                    {"lambda", spec.axes.lambda},
                    {"n", spec.axes.n},
                    {"grid_in_eps_units", spec.axes.grid_in_eps_units}};
      break;
    case ScenarioKind::riccati:
      j["riccati"] = {{"from_constants", spec.riccati.from_constants},
                      {"a", spec.riccati.a},
                      {"y0", spec.riccati.y0},
                      {"m", spec.riccati.m},
                      {"samples", spec.riccati.samples}};
      break;
    case ScenarioKind::carlemann: {
      const CarlemannConfig& k = spec.carlemann;
      j["carlemann"] = {{"preset", spec.carlemann_preset},
                        {"a1", k.a1}, {"b1", k.b1}, {"c1", k.c1},
                        {"a2", k.a2}, {"b2", k.b2}, {"c2", k.c2},
                        {"R0", carlemann_profile_json(k.R0)},
                        {"S0", carlemann_profile_json(k.S0)}};
      break;
    }
    case ScenarioKind::psystem:
      j["psystem"] = {{"a", spec.psystem.a},
                      {"preset_fraction", spec.psystem.preset_fraction
                                              ? json(*spec.psystem.preset_fraction)
                                              : json(nullptr)},
                      {"dalembert_snapshots", spec.psystem.dalembert_snapshots},
                      {"dalembert_points", spec.psystem.dalembert_points}};
      break;
    case ScenarioKind::verify:
      j["verify"] = {{"suites", spec.verify.suites},
                     {"samples", spec.verify.samples},
                     {"sets", spec.verify.sets}};
      break;
    case ScenarioKind::simulate: break;
  }
  const OutputSpec& o = spec.outputs;
  j["outputs"] = {{"timeseries", o.timeseries}, {"timeseries_rows", o.timeseries_rows},
                  {"snapshots", o.snapshots},   {"plots", o.plots},
                  {"curves", o.curves},         {"cells", o.cells}};
  return j;
}

}  // namespace

// ---------------------------------------------------------------- parse

ScenarioSpec parse_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("column"); pos != std::string::npos) {
      if (const auto colon = msg.find(": ", pos); colon != std::string::npos)
        msg = msg.substr(colon + 2);
    }
    throw ConfigError(line_column(document, e.byte), msg);
  }

  Reader top(doc, "");
  ScenarioSpec spec;
  spec.kind = scenario_kind_from_string(top.text("kind", ""));
  const bool psystem_preset = spec.kind == ScenarioKind::psystem && top.has("psystem") &&
                              doc.at("psystem").contains("preset_fraction") &&
                              !doc.at("psystem").at("preset_fraction").is_null();
  const bool needs_run = spec.kind == ScenarioKind::simulate || spec.kind == ScenarioKind::sweep ||
                         spec.kind == ScenarioKind::carlemann ||
                         (spec.kind == ScenarioKind::psystem && !psystem_preset);

  spec.seed = top.has("seed") ? top.count("seed", 0) : spec.seed;
  RunConfig& cfg = spec.run;
  cfg.lambda = top.number("lambda", cfg.lambda);
  cfg.eps = top.number("eps", cfg.eps);
  if (top.has("model")) cfg.model = parse_model(top.child("model"));
  ProfileModel profile = ProfileModel::bump_x();
  if (top.has("profile")) profile = parse_profile(top.child("profile"));
  cfg.data.profile = profile;
  if (top.has("data")) cfg.data = parse_data(top.child("data"), profile);
  if (top.has("grid") || needs_run) cfg.grid = parse_grid(top.child("grid"));
  cfg.cfl = top.number("cfl", cfg.cfl);
  cfg.t_max = needs_run ? top.number("t_max", kNaN) : top.number("t_max", cfg.t_max);
  if (std::isnan(cfg.t_max)) throw ConfigError("/t_max", "missing required key");
  cfg.scheme_order = static_cast<int>(top.count("scheme_order", 2));
  cfg.record_every = top.count("record_every", 0);
  cfg.check_domain_of_dependence = top.flag("check_domain_of_dependence", true);
  if (top.has("boundary"))
    cfg.boundary = at_key("/boundary", [&] { return boundary_kind_from_string(top.text("boundary", "")); });
  if (top.has("frame")) {
    Reader f = top.child("frame");
    cfg.frame_velocity = f.number("velocity", 0.0);
    cfg.track_peak = f.flag("track_peak", false);
    f.finish();
  }
  if (top.has("thresholds")) {
    Reader t = top.child("thresholds");
    cfg.blowup_factor = t.number("blowup_factor", cfg.blowup_factor);
    cfg.blowup_threshold = t.opt_number("blowup_threshold");
    cfg.snapshot_growth = t.number("snapshot_growth", cfg.snapshot_growth);
    spec.extrapolation_factors = t.numbers("extrapolation_factors", spec.extrapolation_factors);
    t.finish();
  }
  spec.theorem = top.flag("theorem", false);
  if (top.has("expect")) {
    Reader e = top.child("expect");
    if (e.has("event")) {
      spec.expect_event = e.text("event", "");
      static const std::set<std::string> events{"reached_t_max", "blowup_threshold_crossed",
                                                "degeneracy", "nonfinite_value"};
      if (!events.count(*spec.expect_event)) throw ConfigError("/expect/event", "unknown event");
    }
    e.finish();
  }

  if (spec.kind == ScenarioKind::sweep) {
    Reader s = top.child("sweep");
    spec.axes.eps = s.numbers("eps", {cfg.eps});
    spec.axes.lambda = s.numbers("lambda", {cfg.lambda});
    spec.axes.n = s.counts("n", {cfg.grid.n});
    spec.axes.grid_in_eps_units = s.flag("grid_in_eps_units", false);
    s.finish();
  } else if (top.has("sweep")) {
    throw ConfigError("/sweep", "only valid with kind sweep");
  }

  if (top.has("riccati")) {
    Reader r = top.child("riccati");
    spec.riccati.from_constants = r.flag("from_constants", false);
    spec.riccati.a = r.number("a", spec.riccati.a);
    spec.riccati.y0 = r.number("y0", spec.riccati.y0);
    spec.riccati.m = r.number("m", spec.riccati.m);
    spec.riccati.samples = r.count("samples", spec.riccati.samples);
    r.finish();
  }

  if (spec.kind == ScenarioKind::carlemann) {
    CarlemannConfig& k = spec.carlemann;
    if (top.has("carlemann")) {
      Reader r = top.child("carlemann");
      spec.carlemann_preset = r.text("preset", "");
      if (spec.carlemann_preset == "classical") {
        k = CarlemannConfig::classical();
      } else if (spec.carlemann_preset == "original") {
        k = CarlemannConfig::original();
      } else if (!spec.carlemann_preset.empty()) {
        throw ConfigError("/carlemann/preset", "expected classical or original");
      }
      k.a1 = r.number("a1", k.a1);
      k.b1 = r.number("b1", k.b1);
      k.c1 = r.number("c1", k.c1);
      k.a2 = r.number("a2", k.a2);
      k.b2 = r.number("b2", k.b2);
      k.c2 = r.number("c2", k.c2);
      if (r.has("R0")) k.R0 = parse_carlemann_profile(r.child("R0"));
      if (r.has("S0")) k.S0 = parse_carlemann_profile(r.child("S0"));
      r.finish();
    }
    k.grid = cfg.grid;
    k.cfl = cfg.cfl;
    k.t_max = cfg.t_max;
    k.blowup_threshold = cfg.blowup_threshold;
    k.blowup_factor = cfg.blowup_factor;
    k.scheme_order = cfg.scheme_order;
    k.record_every = cfg.record_every;
    at_key("/carlemann", [&] {
      k.validate();
      return 0;
    });
  } else if (top.has("carlemann")) {
    throw ConfigError("/carlemann", "only valid with kind carlemann");
  }

  if (top.has("psystem")) {
    Reader r = top.child("psystem");
    spec.psystem.a = r.number("a", spec.psystem.a);
    spec.psystem.preset_fraction = r.opt_number("preset_fraction");
    spec.psystem.dalembert_snapshots = r.count("dalembert_snapshots", spec.psystem.dalembert_snapshots);
    spec.psystem.dalembert_points = r.count("dalembert_points", spec.psystem.dalembert_points);
    r.finish();
  }
  if (spec.kind == ScenarioKind::psystem && spec.psystem.preset_fraction) {
    const bool has_grid = doc.contains("grid");
    const std::size_t n = has_grid ? cfg.grid.n : 2048;
    const double t_max = doc.contains("t_max") ? cfg.t_max : 4.0;
    RunConfig preset = at_key("/psystem", [&] {
      return degeneracy_preset(spec.psystem.a, *spec.psystem.preset_fraction, n, t_max);
    });
    // Numerical settings stay as configured; model, data and grid come from the preset.
    cfg.lambda = preset.lambda;
    cfg.model = preset.model;
    cfg.data = preset.data;
    cfg.grid = preset.grid;
    cfg.t_max = preset.t_max;
  }

  if (top.has("verify")) {
    Reader r = top.child("verify");
    spec.verify.suites = r.texts("suites", spec.verify.suites);
    spec.verify.samples = r.count("samples", spec.verify.samples);
    spec.verify.sets = r.count("sets", spec.verify.sets);
    r.finish();
    for (const auto& s : spec.verify.suites)
      if (s != "algebraic" && s != "riccati" && s != "constants")
        throw ConfigError("/verify/suites", "unknown suite '" + s + "'");
  }

  if (top.has("outputs")) {
    Reader r = top.child("outputs");
    OutputSpec& o = spec.outputs;
    o.timeseries = r.flag("timeseries", o.timeseries);
    o.timeseries_rows = r.count("timeseries_rows", o.timeseries_rows);
    o.snapshots = r.count("snapshots", o.snapshots);
    o.plots = r.flag("plots", o.plots);
    o.curves = r.flag("curves", o.curves);
    o.cells = r.flag("cells", o.cells);
    r.finish();
  }
  top.finish();

  // ---- invariants
  const auto& f = spec.extrapolation_factors;
  if (f.size() < 2) throw ConfigError("/thresholds/extrapolation_factors", "need at least two factors");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 1.0)) throw ConfigError("/thresholds/extrapolation_factors", "factors must exceed 1");
    if (i > 0 && !(f[i] > f[i - 1]))
      throw ConfigError("/thresholds/extrapolation_factors", "factors must be strictly increasing");
  }

  if (spec.kind == ScenarioKind::sweep) {
    auto check_axis = [](auto& v, const std::string& where) {
      if (v.empty()) throw ConfigError(where, "sweep axis must be nonempty");
      std::sort(v.begin(), v.end());
      if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw ConfigError(where, "sweep axis has duplicate values");
    };
    check_axis(spec.axes.eps, "/sweep/eps");
    check_axis(spec.axes.lambda, "/sweep/lambda");
    check_axis(spec.axes.n, "/sweep/n");
    for (double l : spec.axes.lambda)
      for (double e : spec.axes.eps)
        for (std::size_t n : spec.axes.n) {
          const RunConfig c = sweep_cell_config(spec, l, e, n);
          at_key("/sweep", [&] {
            c.validate();
            return 0;
          });
          if (spec.theorem) compute_constants(c);
        }
  } else if (needs_run || spec.kind == ScenarioKind::psystem) {
    at_key("", [&] {
      cfg.validate();
      return 0;
    });
    if (spec.theorem) compute_constants(cfg);
  } else if (spec.theorem) {
    compute_constants(cfg);
  }
  if (spec.kind == ScenarioKind::psystem && !(cfg.lambda == 2.0))
    throw ConfigError("/lambda", "psystem needs lambda = 2");
  if (spec.kind == ScenarioKind::riccati && !spec.riccati.from_constants) {
    RiccatiParams p{spec.riccati.a * spec.riccati.a, spec.riccati.m, spec.riccati.y0};
    at_key("/riccati", [&] {
      if (!(spec.riccati.a > 0.0)) throw ValidationError("a must be positive");
      p.validate();
      return 0;
    });
  }
  return spec;
}

ScenarioSpec load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read configuration " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const ScenarioSpec& spec) { return spec_json(spec).dump(2); }

RunConfig sweep_cell_config(const ScenarioSpec& spec, double lambda, double eps, std::size_t n) {
  RunConfig c = spec.run;
  c.lambda = lambda;
  c.eps = eps;
  c.grid.n = n;
  if (spec.axes.grid_in_eps_units) {
    c.grid.x_min = spec.run.grid.x_min * eps;
    c.grid.x_max = spec.run.grid.x_max * eps;
  }
  // The run stops once the last extrapolation level is crossed unless a
  // larger stop was configured.
  if (!c.blowup_threshold) c.blowup_factor = std::min(c.blowup_factor, spec.extrapolation_factors.back());
  return c;
}

// ---------------------------------------------------------------- reports

namespace {

json bound_json(const BoundReport& b) {
  return {{"id", b.id},         {"left", b.left},
          {"right", b.right},   {"margin", b.margin},
          {"tolerance", b.tolerance}, {"pass", b.pass}};
}

json constants_json(const Constants& k) {
  return {{"lambda", k.lambda},       {"c0", k.c0},
          {"c1", k.c1},               {"cstar1", k.cstar1},
          {"cstar2", k.cstar2},       {"cstar3", k.cstar3},
          {"cstar4", k.cstar4},       {"sigma_sq", k.sigma_sq},
          {"t_b", k.t_b},             {"t_b_identity", k.t_b_identity},
          {"phi_x_norm_p", k.phi_x_norm_p}, {"phi_x_zero", k.phi_x_zero},
          {"hypotenuse_bound", k.hypotenuse_bound()}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json comparison_json(const ComparisonReport& c) {
  return {{"passed", c.passed()},
          {"min_margin", c.min_margin},
          {"min_margin_time", c.min_margin_time},
          {"first_violation", opt_json(c.first_violation)},
          {"tolerance", c.tolerance},
          {"samples_used", c.samples_used},
          {"riccati_blowup", std::isfinite(c.riccati_blowup) ? json(c.riccati_blowup) : json("inf")},
          {"t_b", c.t_b},
          {"onset", opt_json(c.onset)},
          {"onset_before_t_b", c.onset_before_t_b}};
}

json fit_json(const ScalingFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual},
          {"abscissae", f.abscissae}, {"ordinates", f.ordinates}};
}

json sign_json(const SignReport& s) {
  return {{"t", s.t},     {"x", s.x},     {"R", s.R},
          {"S", s.S},     {"u_t", s.u_t}, {"u_x", s.u_x},
          {"sign_u_t", s.sign_u_t}, {"sign_u_x", s.sign_u_x},
          {"driver", std::string(1, s.driver)}};
}

json estimate_json(const BlowupEstimate& e) {
  json events = json::array();
  for (auto ev : e.events) events.push_back(std::string(to_string(ev)));
  return {{"t_star", e.t_star},
          {"refinement_spread", e.refinement_spread},
          {"fit_residual", e.fit_residual},
          {"thresholds", e.thresholds},
          {"grid_sizes", e.grid_sizes},
          {"crossing_times", e.crossing_times},
          {"extrapolated", e.extrapolated},
          {"events", events}};
}

json event_json(const Trajectory& tr) {
  return {{"event", std::string(to_string(tr.event))}, {"t_final", tr.t_final}, {"steps", tr.steps}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

// At most `cap` evenly spaced indices of [0, n).
std::vector<std::size_t> spread_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> out;
  if (n == 0 || cap == 0) return out;
  if (cap >= n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t j = 0; j < cap; ++j) {
    const std::size_t i = cap == 1 ? n - 1 : (j * (n - 1) + (cap - 1) / 2) / (cap - 1);
    if (out.empty() || out.back() != i) out.push_back(i);
  }
  return out;
}

void write_trajectory_artifacts(const Trajectory& tr, const OutputSpec& o, const fs::path& dir,
                                double lambda, double eps) {
  fs::create_directories(dir);
  if (o.timeseries) {
    std::ostringstream ts;
    write_timeseries_csv(ts, tr, o.timeseries_rows);
    write_text(dir / "timeseries.csv", ts.str());
  }
  const auto idx = spread_indices(tr.snapshots.size(), o.snapshots);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    std::ostringstream ss;
    write_snapshot_csv(ss, tr.snapshots[idx[j]], {lambda, eps});
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", j);
    write_text(dir / "snapshots" / name, ss.str());
  }
  if (o.plots && !tr.samples.empty()) {
    const auto pick = spread_indices(tr.samples.size(), 2000);
    detail::PlotSeries r{"max |R|", {}, {}, false}, s{"max |S|", {}, {}, false};
    detail::PlotSeries lp{"int |R|^p + |S|^p", {}, {}, false};
    for (std::size_t i : pick) {
      const auto& smp = tr.samples[i];
      r.x.push_back(smp.t);
      r.y.push_back(smp.max_abs_R);
      s.x.push_back(smp.t);
      s.y.push_back(smp.max_abs_S);
      lp.x.push_back(smp.t);
      lp.y.push_back(smp.lp_sum);
    }
    write_text(dir / "plots" / "norms.svg",
               detail::svg_plot({"Sup norms of R and S", "t", "max norm", false, true}, {r, s}));
    write_text(dir / "plots" / "lp.svg",
               detail::svg_plot({"L^p mass", "t", "int |R|^p + |S|^p", false, true}, {lp}));
  }
}

// Riccati comparison along the plus characteristic from (0, 0).
ComparisonReport riccati_comparison(const Trajectory& tr, const Constants& k, double eps,
                                    std::optional<double> onset, CharCurve* curve_out) {
  TraceOptions topt;
  topt.backward = false;
  CharCurve curve = trace_scaled_riemann(tr, tr.initial().t, 0.0, Direction::plus, topt);
  std::vector<double> t, s;
  for (const auto& p : curve.points) {
    t.push_back(p.t);
    s.push_back(p.scaled_value);
  }
  const RiccatiParams params = riccati_params(k, eps);
  const double T = riccati_blowup_time(params);
  const double limit = std::isfinite(T) ? 0.95 * T : std::numeric_limits<double>::infinity();
  auto rep = comparison_certificate(t, s, params, k.t_b, 1e-3 * k.sigma_sq, limit, onset);
  if (curve_out) *curve_out = std::move(curve);
  return rep;
}

std::vector<double> crossing_times_for(const Trajectory& tr, const std::vector<double>& factors) {
  std::vector<double> out;
  for (double f : factors) {
    const auto t = crossing_time(tr, f * tr.initial_max_norm);
    out.push_back(t ? *t : kNaN);
  }
  return out;
}

std::optional<double> single_run_extrapolation(const Trajectory& tr,
                                               const std::vector<double>& factors) {
  if (tr.event != TerminalEvent::blowup_threshold_crossed) return std::nullopt;
  try {
    return estimate_blowup_time(std::vector<const Trajectory*>{&tr}, factors).t_star;
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool expectation_met(const ScenarioSpec& spec, TerminalEvent ev) {
  return !spec.expect_event || *spec.expect_event == to_string(ev);
}

// ---------------------------------------------------------------- kinds

bool run_simulate(const ScenarioSpec& spec, const fs::path& dir, json& report) {
  const RunConfig& cfg = spec.run;
  const Trajectory tr = run(cfg);
  write_trajectory_artifacts(tr, spec.outputs, dir, cfg.lambda, cfg.eps);

  report["run"] = event_json(tr);
  report["initial_max_norm"] = tr.initial_max_norm;
  report["threshold"] = tr.threshold;
  report["resolved_time"] = tr.resolved_time();
  report["gronwall"] = bound_json(gronwall_check(tr));
  if (tr.snapshots.size() >= 3) {
    const auto bal = balance_residual(tr, cfg.lp_exponent());
    report["balance"] = {{"max_abs", bal.max_abs()},
                         {"l1", bal.l1()},
                         {"max_abs_difference", bal.max_abs_difference()},
                         {"l1_difference", bal.l1_difference()}};
  }
  if (cfg.lambda == 1.0) report["energy_drift"] = energy_drift(tr, tr.t_final);
  report["crossing_times"] = {{"factors", spec.extrapolation_factors},
                              {"times", crossing_times_for(tr, spec.extrapolation_factors)}};
  const auto t_est = single_run_extrapolation(tr, spec.extrapolation_factors);
  report["t_extrapolated"] = opt_json(t_est);

  if (cfg.theorem_scenario()) {
    try {
      const Constants k = compute_constants(cfg);
      report["constants"] = constants_json(k);
      json bounds = json::array();
      for (const auto& b : theorem_bounds_check(tr, k, cfg.eps)) bounds.push_back(bound_json(b));
      report["bounds"] = bounds;
      const RiccatiParams rp = riccati_params(k, cfg.eps);
      report["riccati"] = {{"a_sq", rp.a_sq}, {"m", rp.m}, {"y0", rp.y0},
                           {"blowup_branch", rp.blowup_branch()}};
      try {
        CharCurve curve;
        const auto cmp = riccati_comparison(tr, k, cfg.eps, t_est, &curve);
        report["comparison"] = comparison_json(cmp);
        if (spec.outputs.curves) {
          std::ostringstream cs;
          write_curve_csv(cs, curve);
          write_text(dir / "curves" / "plus_x0.csv", cs.str());
        }
      } catch (const Error& e) {
        report["comparison"] = {{"error", e.what()}};
      }
    } catch (const HypothesisError& e) {
      report["constants"] = {{"error", e.what()}};
    }
  }
  if (tr.event == TerminalEvent::blowup_threshold_crossed) {
    report["sign"] = sign_json(blowup_sign_monitor(tr));
    try {
      const auto h = holder_exponent(tr, 0.0, tr.t_final);
      json hj = {{"t", h.t}, {"x_peak", h.x_peak}, {"spatial", fit_json(h.spatial)}};
      hj["temporal"] = h.temporal ? fit_json(*h.temporal) : json(nullptr);
      report["holder"] = hj;
    } catch (const Error& e) {
      report["holder"] = {{"error", e.what()}};
    }
  }
  return expectation_met(spec, tr.event);
}

json cell_json(const SweepCell& c) {
  json j;
  j["lambda"] = c.lambda;
  j["eps"] = c.eps;
  j["n"] = c.n;
  j["event"] = std::string(to_string(c.event));
  j["t_final"] = c.t_final;
  j["steps"] = c.steps;
  j["initial_max_norm"] = c.initial_max_norm;
  j["resolved_time"] = c.resolved_time;
  j["sup_R"] = c.sup_R;
  j["lp_sum"] = c.lp_sum;
  j["min_c"] = c.min_c;
  j["max_c"] = c.max_c;
  j["crossing_times"] = c.crossing_times;
  j["t_extrapolated"] = opt_json(c.t_extrapolated);
  if (c.constants) j["constants"] = constants_json(*c.constants);
  json b = json::array();
  for (const auto& r : c.bounds) b.push_back(bound_json(r));
  j["bounds"] = b;
  j["riccati_blowup"] = std::isfinite(c.riccati_blowup) ? json(c.riccati_blowup) : json("inf");
  j["comparison"] = c.comparison ? comparison_json(*c.comparison) : json(nullptr);
  j["sign"] = c.sign ? sign_json(*c.sign) : json(nullptr);
  j["error"] = c.error;
  return j;
}

std::string cell_dir_name(const SweepCell& c) {
  return "eps" + format_double(c.eps) + "_lambda" + format_double(c.lambda) + "_n" +
         std::to_string(c.n);
}

bool run_sweep_kind(const ScenarioSpec& spec, const RunOptions& opt, json& report, bool& invalid) {
  const fs::path dir = opt.out_dir;
  const bool single = spec.axes.eps.size() == 1 && spec.axes.lambda.size() == 1 &&
                      spec.axes.n.size() == 1;
  CellCallback on_cell;
  if (spec.outputs.cells) {
    on_cell = [&](const SweepCell& c, const Trajectory& tr) {
      // A single-cell sweep writes the same artifacts as simulate, at the top level.
      const fs::path cd = single ? dir : dir / "cells" / cell_dir_name(c);
      write_trajectory_artifacts(tr, spec.outputs, cd, c.lambda, c.eps);
      if (!single) write_text(cd / "cell.json", cell_json(c).dump(2) + "\n");
    };
  }
  const SweepResult res = run_sweep(spec, opt.workers, on_cell);
  write_text(dir / "sweep.csv", res.sweep_csv);
  write_text(dir / "scaling.csv", res.scaling_csv);

  json cells = json::array();
  json failed = json::array();
  bool ok = true;
  for (const auto& c : res.cells) {
    cells.push_back(cell_json(c));
    if (!c.error.empty()) {
      failed.push_back({{"lambda", c.lambda}, {"eps", c.eps}, {"n", c.n}, {"error", c.error}});
      ok = false;
      if (c.invalid) invalid = true;
    } else if (!expectation_met(spec, c.event)) {
      ok = false;
    }
  }
  report["cells"] = cells;
  report["failed_cells"] = failed;
  json groups = json::array();
  for (const auto& g : res.groups) {
    json gj = {{"lambda", g.lambda}, {"eps", g.eps}};
    gj["estimate"] = g.estimate ? estimate_json(*g.estimate) : json(nullptr);
    gj["error"] = g.error;
    groups.push_back(gj);
  }
  report["groups"] = groups;
  json fits = json::array();
  for (const auto& f : res.fits) {
    json fj = {{"lambda", f.lambda}};
    fj["sup_R"] = f.sup_R ? fit_json(*f.sup_R) : json(nullptr);
    fj["lp_sum"] = f.lp_sum ? fit_json(*f.lp_sum) : json(nullptr);
    fj["t_est_ratio"] = opt_json(f.t_est_ratio);
    fj["error"] = f.error;
    fits.push_back(fj);
  }
  report["fits"] = fits;

  if (spec.outputs.plots) {
    std::vector<detail::PlotSeries> series;
    for (const auto& f : res.fits) {
      for (const auto& [q, fit] : {std::pair{"sup|R|", &f.sup_R}, std::pair{"lp_sum", &f.lp_sum}}) {
        if (!*fit) continue;
        const ScalingFit& sf = **fit;
        const std::string tag = std::string(q) + " lambda=" + format_double(f.lambda);
        detail::PlotSeries pts{tag, sf.abscissae, sf.ordinates, true};
        detail::PlotSeries line{tag + " fit", sf.abscissae, {}, false};
        for (double e : sf.abscissae) line.y.push_back(std::exp(sf.intercept) * std::pow(e, sf.slope));
        series.push_back(std::move(pts));
        series.push_back(std::move(line));
      }
    }
    if (!series.empty())
      write_text(dir / "plots" / "scaling.svg",
                 detail::svg_plot({"Scaling in eps", "eps", "measured", true, true}, series));
  }
  return ok;
}

bool run_riccati_kind(const ScenarioSpec& spec, const fs::path& dir, json& report) {
  RiccatiParams p;
  if (spec.riccati.from_constants) {
    const Constants k = compute_constants(spec.run);
    report["constants"] = constants_json(k);
    p = riccati_params(k, spec.run.eps);
  } else {
    p.a_sq = spec.riccati.a * spec.riccati.a;
    p.m = spec.riccati.m;
    p.y0 = spec.riccati.y0;
  }
  p.validate();
  const double T = riccati_blowup_time(p);
  report["params"] = {{"a", p.a()}, {"a_sq", p.a_sq}, {"m", p.m}, {"y0", p.y0}};
  report["blowup_branch"] = p.blowup_branch();
  report["blowup_time"] = std::isfinite(T) ? json(T) : json("inf");

  const double t_end = std::isfinite(T) ? 0.99 * T : spec.run.t_max;
  const std::size_t n = std::max<std::size_t>(spec.riccati.samples, 2);
  std::ostringstream csv;
  csv << "t,y\n";
  detail::PlotSeries s{"y(t)", {}, {}, false};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = riccati_solve(p, t);
    csv << format_double(t) << ',' << format_double(y) << '\n';
    s.x.push_back(t);
    s.y.push_back(y);
  }
  write_text(dir / "riccati.csv", csv.str());
  if (spec.outputs.plots)
    write_text(dir / "plots" / "riccati.svg",
               detail::svg_plot({"Riccati solution", "t", "y", false, false}, {s}));
  return true;
}

bool run_carlemann_kind(const ScenarioSpec& spec, const fs::path& dir, json& report) {
  const CarlemannConfig& k = spec.carlemann;
  const Trajectory tr = carlemann_run(k);
  write_trajectory_artifacts(tr, spec.outputs, dir, 1.0, 0.0);
  report["coefficients"] = {{"a1", k.a1}, {"b1", k.b1}, {"c1", k.c1},
                            {"a2", k.a2}, {"b2", k.b2}, {"c2", k.c2}};
  report["run"] = event_json(tr);
  report["initial_max_norm"] = tr.initial_max_norm;
  report["threshold"] = tr.threshold;
  report["crossing_times"] = {{"factors", spec.extrapolation_factors},
                              {"times", crossing_times_for(tr, spec.extrapolation_factors)}};
  report["t_extrapolated"] = opt_json(single_run_extrapolation(tr, spec.extrapolation_factors));
  // R + S is transported without source when the quadratic terms cancel in the sum.
  if (k.a1 + k.c2 == 0.0 && k.b1 + k.b2 == 0.0 && k.c1 + k.a2 == 0.0) {
    const FieldState& s0 = tr.initial();
    double drift = 0.0;
    for (const auto& s : tr.snapshots)
      for (std::size_t i = 0; i < s.size(); ++i)
        drift = std::max(drift, std::abs((s.R[i] + s.S[i]) - (s0.R[i] + s0.S[i])));
    report["sum_drift"] = drift;
  } else {
    report["sum_drift"] = nullptr;
  }
  return expectation_met(spec, tr.event);
}

bool run_psystem_kind(const ScenarioSpec& spec, const fs::path& dir, json& report) {
  const RunConfig& cfg = spec.run;
  const Trajectory tr = run(cfg);
  write_trajectory_artifacts(tr, spec.outputs, dir, cfg.lambda, cfg.eps);
  report["run"] = event_json(tr);
  const double a = cfg.model.family() == SpeedFamily::power ? cfg.model.params()[0] : spec.psystem.a;
  try {
    const auto d = dalembert_residual(tr, spec.psystem.dalembert_snapshots, spec.psystem.dalembert_points);
    report["dalembert"] = {{"max_residual", d.max_residual}, {"samples", d.samples}, {"skipped", d.skipped}};
  } catch (const Error& e) {
    report["dalembert"] = {{"error", e.what()}};
  }
  const DegeneracyReport dr = degeneracy_monitor(tr, a);
  report["degeneracy"] = {{"a", dr.a},
                          {"integral_u1", dr.integral_u1},
                          {"threshold", dr.threshold},
                          {"threshold_closed", dr.threshold_closed},
                          {"below_threshold", dr.below_threshold},
                          {"initial_min_one_plus_u", dr.initial_min_one_plus_u},
                          {"min_one_plus_u", dr.min_one_plus_u},
                          {"degenerated", dr.degenerated},
                          {"declining", dr.declining},
                          {"consistent", dr.consistent},
                          {"hypothesis_notes", dr.hypothesis_notes}};
  if (cfg.model.family() == SpeedFamily::power && !tr.snapshots.empty()) {
    try {
      const PsystemState ps = PsystemState::from_field(tr.final(), a);
      std::ostringstream csv;
      csv << "x,u,u_t,w_plus,w_minus\n";
      for (std::size_t i = 0; i < ps.u.size(); ++i)
        csv << format_double(tr.final().x(i)) << ',' << format_double(ps.u[i]) << ','
            << format_double(ps.u_t[i]) << ',' << format_double(ps.w_plus[i]) << ','
            << format_double(ps.w_minus[i]) << '\n';
      write_text(dir / "invariants.csv", csv.str());
    } catch (const Error& e) {
      report["invariants_error"] = e.what();
    }
  }
  bool ok = expectation_met(spec, tr.event);
  if (spec.psystem.preset_fraction) ok = ok && dr.consistent;
  return ok;
}

bool run_verify_kind(const ScenarioSpec& spec, json& report) {
  bool ok = true;
  json suites;
  for (const auto& name : spec.verify.suites) {
    if (name == "algebraic") {
      const auto r = algebraic_suite(spec.verify.samples, spec.seed);
      suites["algebraic"] = {{"samples", r.samples},
                             {"max_identity_ratio", r.max_identity_ratio},
                             {"min_inequality_ratio", r.min_inequality_ratio},
                             {"identity_failures", r.identity_failures},
                             {"inequality_failures", r.inequality_failures},
                             {"passed", r.passed()}};
      ok = ok && r.passed();
    } else if (name == "riccati") {
      const auto r = riccati_suite(spec.verify.sets, spec.seed);
      suites["riccati"] = {{"sets", r.sets},
                           {"max_solution_error", r.max_solution_error},
                           {"max_blowup_error", r.max_blowup_error},
                           {"limit_error", r.limit_error},
                           {"passed", r.passed()}};
      ok = ok && r.passed();
    } else if (name == "constants") {
      const auto r = constants_suite(spec.verify.sets, spec.seed);
      suites["constants"] = {{"sets", r.sets},
                             {"max_relative_difference", r.max_relative_difference},
                             {"passed", r.passed()}};
      ok = ok && r.passed();
    }
  }
  report["suites"] = suites;
  report["passed"] = ok;
  return ok;
}

}  // namespace

// ---------------------------------------------------------------- sweep

SweepResult run_sweep(const ScenarioSpec& spec, std::size_t workers, const CellCallback& on_cell) {
  if (spec.kind != ScenarioKind::sweep) throw ValidationError("run_sweep needs kind sweep");
  const auto& factors = spec.extrapolation_factors;
  SweepResult res;
  for (double e : spec.axes.eps)
    for (double l : spec.axes.lambda)
      for (std::size_t n : spec.axes.n) {
        SweepCell c;
        c.lambda = l;
        c.eps = e;
        c.n = n;
        res.cells.push_back(c);
      }
  std::vector<Trajectory> trajs(res.cells.size());

  // Most expensive cells first; results land by index, so the order of
  // completion does not matter.
  std::vector<std::size_t> order(res.cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto cost = [&](std::size_t i) {
    const auto& c = res.cells[i];
    const double n = static_cast<double>(c.n);
    return n * n / (spec.axes.grid_in_eps_units ? c.eps * c.lambda : c.lambda);
  };
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cost(a) > cost(b); });

  auto work = [&](std::size_t idx) {
    SweepCell& c = res.cells[idx];
    try {
      const RunConfig cfg = sweep_cell_config(spec, c.lambda, c.eps, c.n);
      Trajectory tr = run(cfg);
      c.event = tr.event;
      c.t_final = tr.t_final;
      c.steps = tr.steps;
      c.initial_max_norm = tr.initial_max_norm;
      c.resolved_time = tr.resolved_time();
      c.min_c = std::numeric_limits<double>::infinity();
      for (const auto& s : tr.samples) {
        c.min_c = std::min(c.min_c, s.min_c);
        c.max_c = std::max(c.max_c, s.max_c);
        if (s.t <= c.resolved_time) {
          c.sup_R = std::max(c.sup_R, s.max_abs_R);
          c.lp_sum = std::max(c.lp_sum, s.lp_sum);
        }
      }
      c.crossing_times = crossing_times_for(tr, factors);
      c.t_extrapolated = single_run_extrapolation(tr, factors);
      if (cfg.theorem_scenario()) {
        try {
          const Constants k = compute_constants(cfg);
          c.constants = k;
          c.bounds = theorem_bounds_check(tr, k, c.eps);
          c.riccati_blowup = riccati_blowup_time(riccati_params(k, c.eps));
          c.comparison = riccati_comparison(tr, k, c.eps, c.t_extrapolated, nullptr);
        } catch (const HypothesisError&) {
          // Outside the theorem's hypotheses: no constants, no bounds.
        }
      }
      if (tr.event == TerminalEvent::blowup_threshold_crossed) c.sign = blowup_sign_monitor(tr);
      if (on_cell) on_cell(c, tr);
      tr.snapshots.clear();
      tr.snapshots.shrink_to_fit();
      trajs[idx] = std::move(tr);
    } catch (const ValidationError& e) {
      c.error = e.what();
      c.invalid = true;
    } catch (const Error& e) {
      c.error = e.what();
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(res.cells.size(), 1));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) work(order[k]);
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }

  // Refinement groups per (eps, lambda).
  const std::size_t nn = spec.axes.n.size();
  for (std::size_t g = 0; g * nn < res.cells.size(); ++g) {
    SweepGroup grp;
    grp.eps = res.cells[g * nn].eps;
    grp.lambda = res.cells[g * nn].lambda;
    std::vector<const Trajectory*> runs;
    for (std::size_t j = 0; j < nn; ++j) {
      const SweepCell& c = res.cells[g * nn + j];
      if (c.error.empty()) runs.push_back(&trajs[g * nn + j]);
    }
    try {
      if (runs.empty()) throw Error("no successful runs");
      grp.estimate = estimate_blowup_time(runs, factors);
    } catch (const Error& e) {
      grp.error = e.what();
    }
    res.groups.push_back(std::move(grp));
  }

  // eps-scaling per lambda on the finest grid.
  const std::size_t nl = spec.axes.lambda.size();
  for (std::size_t li = 0; li < nl; ++li) {
    SweepResult::LambdaFits f;
    f.lambda = spec.axes.lambda[li];
    std::vector<double> eps, supr, lp, test;
    bool all_t = true;
    for (std::size_t ei = 0; ei < spec.axes.eps.size(); ++ei) {
      const SweepCell& c = res.cells[(ei * nl + li) * nn + nn - 1];
      const SweepGroup& g = res.groups[ei * nl + li];
      if (c.error.empty()) {
        eps.push_back(c.eps);
        supr.push_back(c.sup_R);
        lp.push_back(c.lp_sum);
      }
      if (g.estimate) {
        test.push_back(g.estimate->t_star);
      } else {
        all_t = false;
      }
    }
    try {
      f.sup_R = loglog_fit(eps, supr);
      f.lp_sum = loglog_fit(eps, lp);
    } catch (const Error& e) {
      f.error = e.what();
    }
    if (all_t && !test.empty())
      f.t_est_ratio = *std::max_element(test.begin(), test.end()) /
                      *std::min_element(test.begin(), test.end());
    res.fits.push_back(std::move(f));
  }

  std::ostringstream sw;
  sw << "eps,lambda,n,event,t_final,steps,T_est,sup_R,lp_sum,min_c,max_c,"
        "sup_R_bound,lp_sum_bound,c_range_bound,riccati_comparison\n";
  auto flag = [](const SweepCell& c, const std::string& id) -> std::string {
    for (const auto& b : c.bounds)
      if (b.id == id) return b.pass ? "1" : "0";
    return "";
  };
  for (const auto& c : res.cells) {
    sw << format_double(c.eps) << ',' << format_double(c.lambda) << ',' << c.n << ','
       << (c.error.empty() ? std::string(to_string(c.event)) : std::string("failed")) << ','
       << format_double(c.t_final) << ',' << c.steps << ','
       << (c.t_extrapolated ? format_double(*c.t_extrapolated) : std::string()) << ','
       << format_double(c.sup_R) << ',' << format_double(c.lp_sum) << ','
       << format_double(c.min_c) << ',' << format_double(c.max_c) << ',' << flag(c, "sup_R")
       << ',' << flag(c, "lp_sum") << ',' << flag(c, "c_range") << ','
       << (c.comparison ? (c.comparison->passed() ? "1" : "0") : "") << '\n';
  }
  res.sweep_csv = sw.str();

  std::ostringstream sc;
  sc << "lambda,quantity,eps,measured,fitted\n";
  for (const auto& f : res.fits) {
    for (const auto& [name, fit] : {std::pair{"sup_R", &f.sup_R}, std::pair{"lp_sum", &f.lp_sum}}) {
      if (!*fit) continue;
      const ScalingFit& s = **fit;
      for (std::size_t i = 0; i < s.abscissae.size(); ++i)
        sc << format_double(f.lambda) << ',' << name << ',' << format_double(s.abscissae[i]) << ','
           << format_double(s.ordinates[i]) << ','
           << format_double(std::exp(s.intercept) * std::pow(s.abscissae[i], s.slope)) << '\n';
    }
  }
  res.scaling_csv = sc.str();
  return res;
}

// ---------------------------------------------------------------- driver

int run_scenario(const ScenarioSpec& spec_in, const RunOptions& options) {
  ScenarioSpec spec = spec_in;
  if (options.seed) spec.seed = *options.seed;
  const fs::path dir = options.out_dir;
  json report;
  report["kind"] = std::string(to_string(spec.kind));
  report["timestamp"] = timestamp();
  report["config"] = spec_json(spec);
  int code = 0;
  try {
    fs::create_directories(dir);
    bool ok = true;
    bool invalid = false;
    switch (spec.kind) {
      case ScenarioKind::simulate: ok = run_simulate(spec, dir, report); break;
      case ScenarioKind::sweep: ok = run_sweep_kind(spec, options, report, invalid); break;
      case ScenarioKind::riccati: ok = run_riccati_kind(spec, dir, report); break;
      case ScenarioKind::carlemann: ok = run_carlemann_kind(spec, dir, report); break;
      case ScenarioKind::psystem: ok = run_psystem_kind(spec, dir, report); break;
      case ScenarioKind::verify: ok = run_verify_kind(spec, report); break;
    }
    code = invalid ? 2 : (ok ? 0 : 3);
    report["status"] = invalid ? "invalid" : (ok ? "ok" : "expectation_failed");
  } catch (const ValidationError& e) {
    report["status"] = "invalid";
    report["error"] = e.what();
    std::cerr << "quasiblow: validation error: " << e.what() << '\n';
    code = 2;
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["error"] = e.what();
    std::cerr << "quasiblow: " << e.what() << '\n';
    code = 3;
  }
  try {
    write_text(dir / "run.json", report.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "quasiblow: " << e.what() << '\n';
    return 3;
  }
  return code;
}

}  // namespace quasiblow
