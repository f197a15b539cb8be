#include "henon/field.hpp"

#include <algorithm>
#include <cmath>

#include "henon/error.hpp"

namespace henon {

double RadialField::at(double r) const {
  const auto& x = grid->nodes;
  if (r < 0.0 || r > 1.0) return 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), r);
  if (it == x.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - x.begin());
  const double s = (r - x[k - 1]) / (x[k] - x[k - 1]);
  return (1.0 - s) * values[k - 1] + s * values[k];
}

RadialField sample_radial(std::shared_ptr<const RadialGrid> grid, const AmbientSpec& ambient,
                          const std::function<double(double)>& u) {
  RadialField f{grid, ambient, {}};
  f.values.reserve(grid->nodes.size());
  for (double r : grid->nodes) f.values.push_back(u(r));
  f.values.back() = 0.0;
  return f;
}

PolarField sample_polar(std::shared_ptr<const PolarGrid> grid, const AmbientSpec& ambient,
                        const std::function<double(double, double)>& v) {
  PolarField f{grid, ambient, std::vector<double>(grid->node_count(), 0.0)};
  const std::size_t nr = grid->rho.size(), nt = grid->theta.size();
  const double center = v(0.0, 0.0);
  for (std::size_t j = 0; j < nt; ++j) f(0, j) = center;
  for (std::size_t i = 1; i + 1 < nr; ++i) {
    for (std::size_t j = 0; j < nt; ++j) f(i, j) = v(grid->rho[i], grid->theta[j]);
  }
  return f;
}

PolarField radial_to_polar(const RadialField& u, std::shared_ptr<const PolarGrid> grid) {
  return sample_polar(std::move(grid), u.ambient, [&](double rho, double) { return u.at(rho); });
}

double anisotropy(const PolarField& v) {
  const std::size_t nr = v.grid->rho.size(), nt = v.grid->theta.size();
  double peak = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    double lo = v(i, 0), hi = v(i, 0);
    for (std::size_t j = 1; j < nt; ++j) {
      lo = std::min(lo, v(i, j));
      hi = std::max(hi, v(i, j));
    }
    spread = std::max(spread, hi - lo);
    peak = std::max(peak, std::abs(hi));
    peak = std::max(peak, std::abs(lo));
  }
  return peak > 0.0 ? spread / peak : 0.0;
}

nlohmann::json snapshot(const RadialField& u, const std::string& provenance) {
  nlohmann::json j{{"space", "radial"},
                   {"n", u.ambient.n},
                   {"l", u.ambient.l},
                   {"grid", u.grid->to_json()},
                   {"nodes", u.grid->nodes},
                   {"values", u.values}};
  if (!provenance.empty()) j["provenance"] = provenance;
  return j;
}

nlohmann::json snapshot(const PolarField& v, const std::string& provenance) {
  nlohmann::json j{{"space", "polar"},
                   {"n", v.ambient.n},
                   {"l", v.ambient.l},
                   {"grid", v.grid->to_json()},
                   {"nodes", {{"rho", v.grid->rho}, {"theta", v.grid->theta}}},
                   {"values", v.values}};
  if (!provenance.empty()) j["provenance"] = provenance;
  return j;
}

namespace {

void expect_space(const nlohmann::json& j, const char* space) {
  if (!j.is_object() || j.value("space", std::string{}) != space) {
    throw ConfigError(std::string("snapshot is not a ") + space + " field");
  }
}

AmbientSpec ambient_of(const nlohmann::json& j) {
  return AmbientSpec::make(j.at("n").get<int>(), j.at("l").get<int>());
}

void check_increasing(const std::vector<double>& x, const char* what) {
  if (x.size() < 2 || x.front() != 0.0 || !std::is_sorted(x.begin(), x.end()) ||
      std::adjacent_find(x.begin(), x.end()) != x.end()) {
    throw ConfigError(std::string("snapshot ") + what + " nodes are not strictly increasing from 0");
  }
}

}  // namespace

RadialField radial_from_snapshot(const nlohmann::json& j) {
  expect_space(j, "radial");
  auto grid = std::make_shared<RadialGrid>();
  grid->nodes = j.at("nodes").get<std::vector<double>>();
  check_increasing(grid->nodes, "radial");
  if (j.contains("grid")) {
    grid->grading = j["grid"].value("grading", 1.0);
    grid->toward = grading_from_string(j["grid"].value("toward", std::string("origin")));
  }
  RadialField f{grid, ambient_of(j), j.at("values").get<std::vector<double>>()};
  if (f.values.size() != grid->nodes.size()) throw ConfigError("snapshot values/nodes length mismatch");
  return f;
}

PolarField polar_from_snapshot(const nlohmann::json& j) {
  expect_space(j, "polar");
  auto grid = std::make_shared<PolarGrid>();
  grid->rho = j.at("nodes").at("rho").get<std::vector<double>>();
  grid->theta = j.at("nodes").at("theta").get<std::vector<double>>();
  check_increasing(grid->rho, "rho");
  check_increasing(grid->theta, "theta");
  if (j.contains("grid")) {
    grid->grading = j["grid"].value("grading", 1.0);
    grid->toward = grading_from_string(j["grid"].value("toward", std::string("origin")));
  }
  PolarField f{grid, ambient_of(j), j.at("values").get<std::vector<double>>()};
  if (f.values.size() != grid->node_count()) throw ConfigError("snapshot values/nodes length mismatch");
  return f;
}

}  // namespace henon
