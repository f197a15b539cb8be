#include "henon/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "henon/error.hpp"

namespace henon {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

void read_int(const json& j, const char* key, int& out, const std::string& where) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  out = v.get<int>();
}

GridConfig grid_from_json(const json& j) {
  only_keys(j, {"radial_cells", "rho_cells", "theta_cells", "grading", "toward"}, "grid");
  GridConfig g;
  read_int(j, "radial_cells", g.radial_cells, "grid");
  read_int(j, "rho_cells", g.rho_cells, "grid");
  read_int(j, "theta_cells", g.theta_cells, "grid");
  read(j, "grading", g.grading, "grid");
  if (j.contains("toward")) g.toward = grading_from_string(j.at("toward").get<std::string>());
  return g;
}

DescentConfig descent_from_json(const json& j) {
  only_keys(j,
            {"max_iterations", "armijo", "initial_step", "max_step", "min_step", "energy_tol", "energy_window",
             "residual_tol", "gradient_tol", "interpolate", "conjugate", "random_starts"},
            "descent");
  DescentConfig d;
  read_int(j, "max_iterations", d.max_iterations, "descent");
  read(j, "armijo", d.armijo, "descent");
  read(j, "initial_step", d.initial_step, "descent");
  read(j, "max_step", d.max_step, "descent");
  read(j, "min_step", d.min_step, "descent");
  read(j, "energy_tol", d.energy_tol, "descent");
  read_int(j, "energy_window", d.energy_window, "descent");
  read(j, "residual_tol", d.residual_tol, "descent");
  read(j, "gradient_tol", d.gradient_tol, "descent");
  read(j, "interpolate", d.interpolate, "descent");
  read(j, "conjugate", d.conjugate, "descent");
  read_int(j, "random_starts", d.random_starts, "descent");
  return d;
}

}  // namespace

Nonlinearity RunConfig::make_nonlinearity() const { return nonlinearity_from_json(nonlinearity, ambient.n, ambient.l); }

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.grid = grid;
  o.descent = descent;
  o.descent.seed = seed;
  o.test_function = test_function;
  o.refine = refine;
  o.jobs = jobs;
  return o;
}

void RunConfig::validate() const {
  (void)make_nonlinearity();
  for (int cells : {grid.radial_cells, grid.rho_cells, grid.theta_cells}) {
    if (cells < kMinGridCells) throw ConfigError("grid cell counts must be >= " + std::to_string(kMinGridCells));
  }
  if (!(grid.grading >= 1.0)) throw ConfigError("grid.grading must be >= 1");
  DescentConfig d = descent;
  d.jobs = 1;
  d.validate();
  test_function.validate();
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("alphas must be finite and nonnegative");
  }
  if (refine < 1) throw ConfigError("refine must be >= 1");
  if (!(margin >= 0.0 && margin < 1.0)) throw ConfigError("margin must lie in [0, 1)");
  if (!(shooting_tol > 0.0 && shooting_tol < 1e-2)) throw ConfigError("shooting_tol must lie in (0, 1e-2)");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (embedding.fields < 1 || embedding.cells < kMinGridCells) {
    throw ConfigError("embedding needs fields >= 1 and cells >= " + std::to_string(kMinGridCells));
  }
}

json RunConfig::to_json() const {
  json d = descent.to_json();
  d.erase("seed");  // the top-level seed governs
  return {{"ambient", {{"n", ambient.n}, {"l", ambient.l}}},
          {"nonlinearity", nonlinearity},
          {"alphas", alphas},
          {"grid", grid.to_json()},
          {"descent", d},
          {"test_function",
           {{"theta1", test_function.theta1}, {"theta2", test_function.theta2}, {"amplitude", test_function.amplitude}}},
          {"embedding",
           {{"kind", to_string(embedding_kind)},
            {"fields", embedding.fields},
            {"cells", embedding.cells},
            {"grading", embedding.grading},
            {"toward", to_string(embedding.toward)},
            {"q", embedding.q},
            {"weight", embedding.weight}}},
          {"refine", refine},
          {"margin", margin},
          {"shooting_tol", shooting_tol},
          {"out", out},
          {"seed", seed},
          {"jobs", jobs}};
}

RunConfig run_config_from_json(const json& j) {
  only_keys(j,
            {"ambient", "nonlinearity", "alphas", "grid", "descent", "test_function", "embedding", "refine", "margin",
             "shooting_tol", "out", "seed", "jobs"},
            "config");
  RunConfig c;
  if (j.contains("ambient")) {
    const auto& a = j.at("ambient");
    only_keys(a, {"n", "l"}, "ambient");
    int n = 4;
    read_int(a, "n", n, "ambient");
    std::optional<int> l;
    if (a.contains("l") && !a.at("l").is_null()) {
      int lv = 0;
      read_int(a, "l", lv, "ambient");
      l = lv;
    }
    c.ambient = AmbientSpec::make(n, l);
  }
  if (j.contains("nonlinearity")) c.nonlinearity = j.at("nonlinearity");
  read(j, "alphas", c.alphas, "config");
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  if (j.contains("descent")) c.descent = descent_from_json(j.at("descent"));
  if (j.contains("test_function")) {
    const auto& t = j.at("test_function");
    only_keys(t, {"theta1", "theta2", "amplitude"}, "test_function");
    read(t, "theta1", c.test_function.theta1, "test_function");
    read(t, "theta2", c.test_function.theta2, "test_function");
    read(t, "amplitude", c.test_function.amplitude, "test_function");
  }
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    only_keys(e, {"kind", "fields", "cells", "grading", "toward", "q", "weight"}, "embedding");
    if (e.contains("kind")) c.embedding_kind = embedding_kind_from_string(e.at("kind").get<std::string>());
    read_int(e, "fields", c.embedding.fields, "embedding");
    read_int(e, "cells", c.embedding.cells, "embedding");
    read(e, "grading", c.embedding.grading, "embedding");
    if (e.contains("toward")) c.embedding.toward = grading_from_string(e.at("toward").get<std::string>());
    read(e, "q", c.embedding.q, "embedding");
    read(e, "weight", c.embedding.weight, "embedding");
  }
  read_int(j, "refine", c.refine, "config");
  read(j, "margin", c.margin, "config");
  read(j, "shooting_tol", c.shooting_tol, "config");
  read(j, "out", c.out, "config");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  read_int(j, "jobs", c.jobs, "config");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse alpha '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ConfigError("cannot parse alpha '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty alpha list");
  return out;
}

}  // namespace henon
