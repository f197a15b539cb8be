#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/grid.hpp"

namespace henon {

/// Nodal values of a radial function on a RadialGrid; values.back() is the Dirichlet node.
struct RadialField {
  std::shared_ptr<const RadialGrid> grid;
  AmbientSpec ambient;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  /// Piecewise-linear interpolation; zero outside [0, 1].
  [[nodiscard]] double at(double r) const;
};

/// Nodal values v(rho_i, theta_j), row-major in rho.
struct PolarField {
  std::shared_ptr<const PolarGrid> grid;
  AmbientSpec ambient;
  std::vector<double> values;

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values[grid->index(i, j)]; }
  [[nodiscard]] double& operator()(std::size_t i, std::size_t j) { return values[grid->index(i, j)]; }
};

/// Samples u at the nodes; the boundary node is set to 0.
RadialField sample_radial(std::shared_ptr<const RadialGrid> grid, const AmbientSpec& ambient,
                          const std::function<double(double)>& u);

/// Samples v(rho, theta); the rho = 1 row is set to 0 and the rho = 0 row to v(0, 0).
PolarField sample_polar(std::shared_ptr<const PolarGrid> grid, const AmbientSpec& ambient,
                        const std::function<double(double, double)>& v);

/// A radial field read as a theta-independent polar field.
PolarField radial_to_polar(const RadialField& u, std::shared_ptr<const PolarGrid> grid);

/// max_i (max_j v_ij - min_j v_ij) / max v; zero for theta-independent fields.
double anisotropy(const PolarField& v);

nlohmann::json snapshot(const RadialField& u, const std::string& provenance = {});
nlohmann::json snapshot(const PolarField& v, const std::string& provenance = {});
RadialField radial_from_snapshot(const nlohmann::json& j);
PolarField polar_from_snapshot(const nlohmann::json& j);

inline constexpr const char* kShootingProvenance = "oracle:shooting";

}  // namespace henon
