#include "henon/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "henon/error.hpp"

namespace henon {

double sphere_measure(int k) {
  const double h = 0.5 * k;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

int default_splitting(int n) { return n % 2 == 0 ? n / 2 : n / 2 + 1; }

AmbientSpec AmbientSpec::make(int n, std::optional<int> l) {
  if (n < 4) throw ConfigError("dimension n = " + std::to_string(n) + " must be >= 4");
  const int split = l.value_or(default_splitting(n));
  if (split < 1 || split > n - 1) {
    throw ConfigError("splitting index l = " + std::to_string(split) + " must lie in [1, n-1]");
  }
  return AmbientSpec{n, split, sphere_measure(n)};
}

double AmbientSpec::polar_measure() const { return sphere_measure(l) * sphere_measure(n - l); }

double AmbientSpec::angular_weight(double theta) const {
  return std::pow(std::sin(theta), n - l - 1) * std::pow(std::cos(theta), l - 1);
}

ScalingParams ScalingParams::make(double alpha, int n) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  ScalingParams s;
  s.alpha = alpha;
  s.beta = n / (alpha + n);
  s.gamma = (n - 2) * (1.0 - s.beta);
  s.a = 0.5 * (n - 2);
  return s;
}

std::vector<double> graded_nodes(int cells, double grading, GradingToward toward) {
  if (cells < kMinGridCells) {
    throw ConfigError("grid needs at least " + std::to_string(kMinGridCells) + " cells, got " +
                      std::to_string(cells));
  }
  if (!(grading >= 1.0)) throw ConfigError("grading exponent must be >= 1");
  std::vector<double> r(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) {
    const double s = static_cast<double>(i) / cells;
    r[static_cast<std::size_t>(i)] =
        toward == GradingToward::origin ? std::pow(s, grading) : 1.0 - std::pow(1.0 - s, grading);
  }
  r.front() = 0.0;
  r.back() = 1.0;
  return r;
}

RadialGrid build_radial_grid(int cells, double grading, GradingToward toward) {
  return RadialGrid{graded_nodes(cells, grading, toward), grading, toward};
}

PolarGrid build_polar_grid(int rho_cells, int theta_cells, double grading, GradingToward toward) {
  if (theta_cells < kMinGridCells) {
    throw ConfigError("polar grid needs at least " + std::to_string(kMinGridCells) + " theta cells");
  }
  PolarGrid g;
  g.rho = graded_nodes(rho_cells, grading, toward);
  g.theta.resize(static_cast<std::size_t>(theta_cells) + 1);
  for (int j = 0; j <= theta_cells; ++j) {
    g.theta[static_cast<std::size_t>(j)] = 0.5 * std::numbers::pi * j / theta_cells;
  }
  g.theta.back() = 0.5 * std::numbers::pi;
  g.grading = grading;
  g.toward = toward;
  return g;
}

GradingToward grading_from_string(const std::string& name) {
  if (name == "origin") return GradingToward::origin;
  if (name == "boundary") return GradingToward::boundary;
  throw ConfigError("grading direction must be 'origin' or 'boundary', got '" + name + "'");
}

const char* to_string(GradingToward toward) { return toward == GradingToward::origin ? "origin" : "boundary"; }

nlohmann::json RadialGrid::to_json() const {
  return {{"cells", cells()}, {"grading", grading}, {"toward", to_string(toward)}};
}

nlohmann::json PolarGrid::to_json() const {
  return {{"rho_cells", rho_cells()}, {"theta_cells", theta_cells()}, {"grading", grading},
          {"toward", to_string(toward)}};
}

}  // namespace henon
