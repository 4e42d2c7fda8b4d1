#pragma once

// JSON scenario files: ambient model, reference point, chart, k range and
// tolerances, and the patch they describe.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "curvest/charts.hpp"
#include "curvest/errors.hpp"
#include "curvest/immersion.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

enum class Expectation { equality, strict };

struct ScenarioConfig {
  std::string name;
  std::filesystem::path source;  // file the config came from, for relative paths
  Signature signature = Signature::riemannian;
  double curvature = 0.0;
  int dimension = 3;
  ModelKind model_kind = ModelKind::euclidean;
  std::optional<std::vector<double>> center;
  std::optional<double> radius;
  std::string chart;
  nlohmann::json chart_params = nlohmann::json::object();
  std::optional<Orientation> orientation;
  int k_min = 0;
  int k_max = 0;
  int resolution = 12;
  std::optional<double> tol_equality;
  double tol_inequality = 1e-6;
  Expectation expect = Expectation::strict;
  JetMode jets = JetMode::analytic;
  std::vector<std::string> checks;  // empty: all checks that apply

  int n() const { return dimension - 1; }
  double equality_tolerance() const {
    if (tol_equality) return *tol_equality;
    return jets == JetMode::analytic ? 1e-6 : 1e-3;
  }
  bool wants(const std::string& check) const {
    return checks.empty() || std::find(checks.begin(), checks.end(), check) != checks.end();
  }
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field '" + path + key + "'");
  return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("field '" + path + "' must be a number");
  return j.get<double>();
}

inline int integer(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError("field '" + path + "' must be an integer");
  return j.get<int>();
}

inline std::string text(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("field '" + path + "' must be a string");
  return j.get<std::string>();
}

inline std::vector<double> numbers(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("field '" + path + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

/// Parses and validates a scenario. Errors name the offending field.
inline ScenarioConfig parse_scenario(const nlohmann::json& j, std::filesystem::path source = {}) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig c;
  c.source = std::move(source);
  c.name = text(field(j, "name", ""), "name");
  const auto& amb = field(j, "ambient", "");
  c.signature = parse_signature(text(field(amb, "signature", "ambient."), "ambient.signature"));
  c.curvature = number(field(amb, "curvature", "ambient."), "ambient.curvature");
  c.dimension = integer(field(amb, "dimension", "ambient."), "ambient.dimension");
  if (amb.contains("model_kind")) {
    c.model_kind = parse_model_kind(text(amb["model_kind"], "ambient.model_kind"));
  } else if (c.signature == Signature::riemannian) {
    c.model_kind = c.curvature > 0 ? ModelKind::sphere_embedded
                   : c.curvature < 0 ? ModelKind::hyperboloid_embedded : ModelKind::euclidean;
  } else {
    c.model_kind = c.curvature == 0 ? ModelKind::minkowski : ModelKind::lorentz_spaceform;
  }
  if (c.dimension < 2) throw ConfigError("field 'ambient.dimension' must be >= 2");
  if (j.contains("center")) c.center = numbers(j["center"], "center");
  if (j.contains("radius")) {
    c.radius = number(j["radius"], "radius");
    if (!(*c.radius > 0)) throw ConfigError("field 'radius' must be positive");
  }
  const auto& ch = field(j, "chart", "");
  c.chart = text(field(ch, "name", "chart."), "chart.name");
  if (ch.contains("params")) {
    if (!ch["params"].is_object()) throw ConfigError("field 'chart.params' must be an object");
    c.chart_params = ch["params"];
  }
  if (j.contains("orientation")) c.orientation = parse_orientation(text(j["orientation"], "orientation"));

  const int n = c.n();
  if (j.contains("k")) {
    const auto& k = j["k"];
    if (k.is_number_integer()) {
      c.k_min = c.k_max = k.get<int>();
    } else if (k.is_array() && k.size() == 2) {
      c.k_min = integer(k[0], "k[0]");
      c.k_max = integer(k[1], "k[1]");
    } else {
      throw ConfigError("field 'k' must be an integer or a [min, max] pair");
    }
  }
  if (c.k_min < 0 || c.k_max > n - 1 || c.k_min > c.k_max)
    throw ConfigError("field 'k': range [" + std::to_string(c.k_min) + ", " + std::to_string(c.k_max) +
                      "] is outside the valid range [0, " + std::to_string(n - 1) + "] for n = " + std::to_string(n));
  if (j.contains("resolution")) c.resolution = integer(j["resolution"], "resolution");
  if (c.resolution < 8) throw ConfigError("field 'resolution' must be >= 8 for estimate scenarios");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("equality")) c.tol_equality = number(t["equality"], "tolerances.equality");
    if (t.contains("inequality")) c.tol_inequality = number(t["inequality"], "tolerances.inequality");
  }
  if (j.contains("expect")) {
    const std::string e = text(j["expect"], "expect");
    if (e == "equality") c.expect = Expectation::equality;
    else if (e == "strict") c.expect = Expectation::strict;
    else throw ConfigError("field 'expect' must be 'equality' or 'strict'");
  }
  if (j.contains("jets")) {
    const std::string s = text(j["jets"], "jets");
    if (s == "analytic") c.jets = JetMode::analytic;
    else if (s == "fd") c.jets = JetMode::finite_difference;
    else throw ConfigError("field 'jets' must be 'analytic' or 'fd'");
  }
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw ConfigError("field 'checks' must be an array of strings");
    for (std::size_t i = 0; i < j["checks"].size(); ++i)
      c.checks.push_back(text(j["checks"][i], "checks[" + std::to_string(i) + "]"));
  }
  return c;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_scenario(j, path);
}

/// Bundled scenario directory, overridable by CURVEST_SCENARIO_DIR in the environment.
inline std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("CURVEST_SCENARIO_DIR")) return env;
#ifdef CURVEST_SCENARIO_DIR
  return CURVEST_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

/// A file path, or the name of a bundled scenario with or without ".json".
inline std::filesystem::path resolve_scenario(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  for (const fs::path& p : {scenario_dir() / name, scenario_dir() / (name + ".json")})
    if (fs::exists(p)) return p;
  throw ConfigError("no scenario file or bundled scenario named '" + name + "'");
}

inline std::vector<std::string> list_scenarios() {
  std::vector<std::string> names;
  namespace fs = std::filesystem;
  if (!fs::is_directory(scenario_dir())) return names;
  for (const auto& e : fs::directory_iterator(scenario_dir()))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

/// Model, reference point and either a parametric patch or tabulated samples.
struct Scenario {
  ScenarioConfig config;
  AmbientModel model;
  Vec center;
  std::optional<HypersurfacePatch> patch;
  std::optional<TabulatedChart> table;
  Orientation orientation;
};

namespace detail {

inline double param_or(const nlohmann::json& p, const std::string& key, double fallback) {
  return p.contains(key) ? number(p[key], "chart.params." + key) : fallback;
}

inline ParameterBox param_box(const nlohmann::json& p, const ParameterBox& fallback) {
  if (p.contains("margin")) return charts::angular_box(fallback.dim(), number(p["margin"], "chart.params.margin"));
  if (p.contains("half_width")) return charts::cube(fallback.dim(), number(p["half_width"], "chart.params.half_width"));
  return fallback;
}

inline Chart build_chart(const ScenarioConfig& c, const AmbientModel& m, const Vec& center) {
  const nlohmann::json& p = c.chart_params;
  const int n = c.n();
  const std::optional<double> r =
      p.contains("radius") ? std::optional<double>(number(p["radius"], "chart.params.radius")) : c.radius;
  auto need_radius = [&]() {
    if (!r) throw ConfigError("chart '" + c.chart + "' needs 'chart.params.radius' or a scenario 'radius'");
    return *r;
  };
  auto vec_param = [&](const std::string& key, const Vec& fallback) {
    if (!p.contains(key)) return fallback;
    Vec v = to_vec(numbers(p[key], "chart.params." + key));
    if (v.size() != fallback.size())
      throw ConfigError("field 'chart.params." + key + "' must have " + std::to_string(fallback.size()) + " entries");
    return v;
  };
  if (c.chart == "sphere")
    return charts::sphere(n, need_radius(), vec_param("center", center), param_box(p, charts::angular_box(n)));
  if (c.chart == "ellipsoid") {
    if (!p.contains("axes")) throw ConfigError("missing field 'chart.params.axes'");
    return charts::ellipsoid(vec_param("axes", Vec::Ones(n + 1)), vec_param("center", center),
                             param_box(p, charts::angular_box(n)));
  }
  if (c.chart == "cylinder") return charts::cylinder(n, need_radius(), param_or(p, "half_length", 1.0));
  if (c.chart == "graph") {
    charts::Polynomial poly;
    if (!p.contains("terms") || !p["terms"].is_array()) throw ConfigError("field 'chart.params.terms' must be an array");
    for (std::size_t i = 0; i < p["terms"].size(); ++i) {
      const auto& t = p["terms"][i];
      const std::string path = "chart.params.terms[" + std::to_string(i) + "]";
      charts::Polynomial::Term term{number(field(t, "coef", path + "."), path + ".coef"), {}};
      for (double e : numbers(field(t, "exponents", path + "."), path + ".exponents"))
        term.exponents.push_back(static_cast<int>(e));
      poly.terms.push_back(std::move(term));
    }
    return charts::graph(std::move(poly), param_box(p, charts::cube(n, 1.0)), m.lorentzian());
  }
  if (c.chart == "geodesic_sphere") {
    const ParameterBox fallback = m.lorentzian() ? charts::cube(n, 1.0) : charts::angular_box(n);
    return charts::geodesic_sphere(m, center, need_radius(), param_box(p, fallback));
  }
  if (c.chart == "hyperboloid") {
    if (m.kind() != ModelKind::minkowski) throw ConfigError("chart 'hyperboloid' needs a minkowski ambient");
    return charts::hyperboloid(n, need_radius(), vec_param("center", center), param_box(p, charts::cube(n, 1.0)));
  }
  if (c.chart == "perturbed_hyperboloid") {
    if (m.kind() != ModelKind::minkowski) throw ConfigError("chart 'perturbed_hyperboloid' needs a minkowski ambient");
    return charts::perturbed_hyperboloid(n, need_radius(), param_or(p, "eps", 0.01), param_box(p, charts::cube(n, 2.0)));
  }
  throw ConfigError("unknown chart '" + c.chart +
                    "' (expected sphere, ellipsoid, cylinder, graph, geodesic_sphere, hyperboloid, "
                    "perturbed_hyperboloid or tabulated)");
}

}  // namespace detail

inline Scenario build_scenario(const ScenarioConfig& c) {
  AmbientModel m(c.signature, c.model_kind, c.curvature, c.dimension);
  Vec center = c.center ? detail::to_vec(*c.center) : canonical_origin(m);
  if (center.size() != m.embedding_dimension())
    throw ConfigError("field 'center' must have " + std::to_string(m.embedding_dimension()) + " coordinates");
  try {
    m.require_point(center, "center");
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field 'center': ") + e.what());
  }
  if (c.radius) {
    try {
      ReferenceBall{center, *c.radius}.validate(m);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("field 'radius': ") + e.what());
    }
  }
  const Orientation orient = c.orientation.value_or(m.lorentzian() ? Orientation::future : Orientation::inner);
  Scenario s{c, m, center, std::nullopt, std::nullopt, orient};
  if (c.chart == "tabulated") {
    if (!c.chart_params.contains("path")) throw ConfigError("missing field 'chart.params.path'");
    std::filesystem::path path = detail::text(c.chart_params["path"], "chart.params.path");
    if (path.is_relative() && !c.source.empty()) path = c.source.parent_path() / path;
    s.table = read_tabulated_chart(path.string());
    if (s.table->n != c.n()) throw ConfigError("tabulated chart has " + std::to_string(s.table->n) + " parameters, expected " + std::to_string(c.n()));
  } else {
    s.patch.emplace(detail::build_chart(c, m, center), m, orient, std::optional<Vec>(center), c.jets);
  }
  return s;
}

}  // namespace curvest
