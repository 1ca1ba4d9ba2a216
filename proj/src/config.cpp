#include "chemolab/config.hpp"
#include "chemolab/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace chemolab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& object_at(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(join(path, key), "unknown key");
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) fail(join(path, key), "missing required key");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

/// Scalar broadcast to every axis, or an array with exactly `dim` entries.
template <typename T, typename Get>
std::array<T, 3> per_axis(const json& v, const std::string& path, int dim, T fill, Get get) {
  std::array<T, 3> out{fill, fill, fill};
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != dim) fail(path, "expected " + std::to_string(dim) + " entries");
    for (int a = 0; a < dim; ++a) out[a] = get(v[a], path + "[" + std::to_string(a) + "]");
  } else {
    const T x = get(v, path);
    for (int a = 0; a < dim; ++a) out[a] = x;
  }
  return out;
}

InitialSpec parse_initial(const json& j, const std::string& path, int dim, const std::filesystem::path& base) {
  object_at(j, path);
  const json& type = require(j, path, "type");
  if (!type.is_string()) fail(join(path, "type"), "expected a string");
  const std::string kind = type.get<std::string>();
  InitialSpec s;
  if (kind == "constant") {
    reject_unknown(j, path, {"type", "value"});
    s.kind = InitialKind::constant;
    s.value = number(require(j, path, "value"), join(path, "value"));
  } else if (kind == "cosine_bump") {
    reject_unknown(j, path, {"type", "base", "amplitude", "modes"});
    s.kind = InitialKind::cosine_bump;
    s.base = number(require(j, path, "base"), join(path, "base"));
    s.amplitude = number(require(j, path, "amplitude"), join(path, "amplitude"));
    s.modes = {1, 1, 1};
    if (const json* m = find(j, "modes")) {
      s.modes = per_axis<int>(*m, join(path, "modes"), dim, 0, [](const json& v, const std::string& p) {
        const int k = integer(v, p);
        if (k < 0) fail(p, "must be nonnegative");
        return k;
      });
    }
    for (int a = dim; a < 3; ++a) s.modes[a] = 0;
  } else if (kind == "gaussian") {
    reject_unknown(j, path, {"type", "center", "width", "amplitude", "floor"});
    s.kind = InitialKind::gaussian;
    s.center = per_axis<double>(require(j, path, "center"), join(path, "center"), dim, 0.0, number);
    s.width = positive(require(j, path, "width"), join(path, "width"));
    s.amplitude = number(require(j, path, "amplitude"), join(path, "amplitude"));
    s.floor = number(require(j, path, "floor"), join(path, "floor"));
  } else if (kind == "file") {
    reject_unknown(j, path, {"type", "path"});
    s.kind = InitialKind::file;
    const json& p = require(j, path, "path");
    if (!p.is_string()) fail(join(path, "path"), "expected a string");
    std::filesystem::path fp = p.get<std::string>();
    if (fp.is_relative() && !base.empty()) fp = base / fp;
    s.path = fp;
  } else {
    fail(join(path, "type"), "unknown initial data type '" + kind + "'");
  }
  return s;
}

json initial_to_json(const InitialSpec& s, int dim) {
  const auto axes = [dim](const auto& arr) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(arr[i]);
    return a;
  };
  switch (s.kind) {
    case InitialKind::constant: return {{"type", "constant"}, {"value", s.value}};
    case InitialKind::cosine_bump:
      return {{"type", "cosine_bump"}, {"base", s.base}, {"amplitude", s.amplitude}, {"modes", axes(s.modes)}};
    case InitialKind::gaussian:
      return {{"type", "gaussian"},
              {"center", axes(s.center)},
              {"width", s.width},
              {"amplitude", s.amplitude},
              {"floor", s.floor}};
    case InitialKind::file: return {{"type", "file"}, {"path", s.path.string()}};
  }
  return {};
}

/// Parser callback state: rejects a key repeated within one object.
struct DuplicateKeyGuard {
  std::vector<std::set<std::string>> stack;

  bool operator()(int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: stack.emplace_back(); break;
      case json::parse_event_t::object_end: stack.pop_back(); break;
      case json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!stack.back().insert(key).second) throw ConfigError("syntax error: duplicate key '" + key + "'");
        break;
      }
      default: break;
    }
    return true;
  }
};

}  // namespace

const char* to_string(Advection a) { return a == Advection::upwind ? "upwind" : "central"; }

ScenarioConfig config_from_json(const json& root, const std::filesystem::path& base_dir) {
  object_at(root, "<root>");
  reject_unknown(root, "", {"params", "grid", "initial", "time", "output", "scheme", "weight"});
  ScenarioConfig cfg;

  {
    const json& p = object_at(require(root, "", "params"), "params");
    reject_unknown(p, "params", {"chi1", "chi2", "alpha", "beta"});
    const double chi1 = positive(require(p, "params", "chi1"), "params.chi1");
    const double chi2 = positive(require(p, "params", "chi2"), "params.chi2");
    const double alpha = positive(require(p, "params", "alpha"), "params.alpha");
    const double beta = positive(require(p, "params", "beta"), "params.beta");
    cfg.params = ModelParamsd::make(chi1, chi2, alpha, beta);
  }

  int dim = 1;
  {
    const json& g = object_at(require(root, "", "grid"), "grid");
    reject_unknown(g, "grid", {"dim", "lengths", "cells"});
    dim = integer(require(g, "grid", "dim"), "grid.dim");
    if (dim < 1 || dim > 3) fail("grid.dim", "must be 1, 2 or 3");
    const auto lengths = per_axis<double>(require(g, "grid", "lengths"), "grid.lengths", dim, 1.0, positive);
    const auto cells = per_axis<int>(require(g, "grid", "cells"), "grid.cells", dim, 1,
                                     [](const json& v, const std::string& p) {
                                       const int c = integer(v, p);
                                       if (c < 2) fail(p, "need at least 2 cells per axis");
                                       return c;
                                     });
    cfg.grid = Gridd::make(dim, lengths, cells);
  }

  {
    const json& in = object_at(require(root, "", "initial"), "initial");
    reject_unknown(in, "initial", {"u", "v", "w"});
    cfg.u0 = parse_initial(require(in, "initial", "u"), "initial.u", dim, base_dir);
    cfg.v0 = parse_initial(require(in, "initial", "v"), "initial.v", dim, base_dir);
    cfg.w0 = parse_initial(require(in, "initial", "w"), "initial.w", dim, base_dir);
  }

  {
    const json& t = object_at(require(root, "", "time"), "time");
    reject_unknown(t, "time", {"t_end", "dt_max", "cfl_safety"});
    cfg.t_end = positive(require(t, "time", "t_end"), "time.t_end");
    cfg.dt_max = cfg.t_end;
    if (const json* v = find(t, "dt_max")) cfg.dt_max = positive(*v, "time.dt_max");
    if (const json* v = find(t, "cfl_safety")) {
      cfg.cfl_safety = number(*v, "time.cfl_safety");
      if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) fail("time.cfl_safety", "must lie in (0,1]");
    }
  }

  cfg.output_every = cfg.t_end / 200.0;
  if (const json* o = find(root, "output")) {
    object_at(*o, "output");
    reject_unknown(*o, "output", {"every"});
    if (const json* v = find(*o, "every")) cfg.output_every = positive(*v, "output.every");
  }

  if (const json* s = find(root, "scheme")) {
    object_at(*s, "scheme");
    reject_unknown(*s, "scheme", {"advection", "blowup_linf"});
    if (const json* v = find(*s, "advection")) {
      if (!v->is_string()) fail("scheme.advection", "expected a string");
      const auto name = v->get<std::string>();
      if (name == "central") cfg.scheme = Advection::central;
      else if (name == "upwind") cfg.scheme = Advection::upwind;
      else fail("scheme.advection", "must be 'central' or 'upwind'");
    }
    if (const json* v = find(*s, "blowup_linf")) cfg.blowup_linf = positive(*v, "scheme.blowup_linf");
  }

  if (const json* w = find(root, "weight")) {
    object_at(*w, "weight");
    reject_unknown(*w, "weight", {"p", "eps"});
    if (const json* v = find(*w, "p")) {
      cfg.weight_p = number(*v, "weight.p");
      if (!(*cfg.weight_p > 1.0)) fail("weight.p", "must exceed 1");
    }
    if (const json* v = find(*w, "eps")) {
      cfg.weight_eps = number(*v, "weight.eps");
      if (!(*cfg.weight_eps > 0.0 && *cfg.weight_eps < 1.0)) fail("weight.eps", "must lie in (0,1)");
    }
    if (cfg.weight_p.has_value() != cfg.weight_eps.has_value())
      fail("weight", "p and eps must be given together");
  }
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text, DuplicateKeyGuard{});
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  return config_from_json(j, base_dir);
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

json config_to_json(const ScenarioConfig& cfg) {
  const int dim = cfg.grid.dim();
  json lengths = json::array(), cells = json::array();
  for (int a = 0; a < dim; ++a) {
    lengths.push_back(cfg.grid.length(a));
    cells.push_back(cfg.grid.cells(a));
  }
  json j = {
      {"params",
       {{"chi1", cfg.params.chi1}, {"chi2", cfg.params.chi2}, {"alpha", cfg.params.alpha}, {"beta", cfg.params.beta}}},
      {"grid", {{"dim", dim}, {"lengths", lengths}, {"cells", cells}}},
      {"initial",
       {{"u", initial_to_json(cfg.u0, dim)}, {"v", initial_to_json(cfg.v0, dim)}, {"w", initial_to_json(cfg.w0, dim)}}},
      {"time", {{"t_end", cfg.t_end}, {"dt_max", cfg.dt_max}, {"cfl_safety", cfg.cfl_safety}}},
      {"output", {{"every", cfg.output_every}}},
      {"scheme", {{"advection", to_string(cfg.scheme)}, {"blowup_linf", cfg.blowup_linf}}},
  };
  if (cfg.weight_p) j["weight"] = {{"p", *cfg.weight_p}, {"eps", *cfg.weight_eps}};
  return j;
}

ScenarioConfig refined(const ScenarioConfig& cfg, int factor) {
  ScenarioConfig out = cfg;
  out.grid = cfg.grid.refined(factor);
  return out;
}

Fieldd materialize(const InitialSpec& spec, const Gridd& grid) {
  constexpr double pi = std::numbers::pi;
  switch (spec.kind) {
    case InitialKind::constant: return Fieldd::Constant(grid.size(), spec.value);
    case InitialKind::cosine_bump:
      return grid.sample([&](double x, double y, double z) {
        const double xs[3] = {x, y, z};
        double prod = 1.0;
        for (int a = 0; a < grid.dim(); ++a) prod *= std::cos(spec.modes[a] * pi * xs[a] / grid.length(a));
        return spec.base + spec.amplitude * prod;
      });
    case InitialKind::gaussian:
      return grid.sample([&](double x, double y, double z) {
        const double xs[3] = {x, y, z};
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += (xs[a] - spec.center[a]) * (xs[a] - spec.center[a]);
        return spec.floor + spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
      });
    case InitialKind::file: return read_field(spec.path, grid);
  }
  return {};
}

}  // namespace chemolab
