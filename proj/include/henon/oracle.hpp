#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "henon/field.hpp"
#include "henon/nonlinearity.hpp"

namespace henon {

/// Trajectory of u'' + (n-1)/r u' + r^alpha f(u) = 0, u(0) = s, u'(0) = 0.
struct ShootResult {
  double s = 0.0;
  std::vector<double> r, u, du;  // samples, r.front() = 0
  double u1 = 0.0;               // u(1)
  std::optional<double> first_zero;
  double start_radius = 0.0;     // end of the series start
  [[nodiscard]] bool positive_before_end() const;
};

inline constexpr double kOverflowGuard = 1e12;

/// Integrates to r = radius with dense-output Dormand-Prince at local tolerance `tol`.
/// Samples at `observe` (sorted, within [0, radius]); by default 513 uniform points.
/// Throws BlowUp if |u| exceeds 1e12.
ShootResult shoot(double s, double alpha, const Nonlinearity& nl, int n, double tol = 1e-10,
                  const std::vector<double>& observe = {}, double radius = 1.0);

struct ShootingGroundState {
  RadialField field;
  double energy = 0.0;
  double s = 0.0;
  double residual = 0.0;  // Nehari residual of the sampled field
  double dirichlet = 0.0;
  std::vector<double> zeros;          // every height s with u(1) = 0 and u > 0 on [0,1)
  std::vector<double> zero_energies;  // I_alpha of each, on the same grid
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Scans s over [1e-6, 1e6] for sign changes of u(1) among positive trajectories, bisects each,
/// samples every zero onto `grid` and keeps the lowest-energy one. Throws NoCrossing if none.
ShootingGroundState shooting_ground_state(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient,
                                          std::shared_ptr<const RadialGrid> grid, double tol = 1e-10);

/// First Dirichlet eigenvalue of -Laplace on the ball of the given radius in R^n (n >= 2), by shooting.
double first_eigenvalue(int n, double tol = 1e-10, double radius = 1.0);

/// sup over sampled t > 0 of (f(t) t - lambda/2 t^2) / t^p: the constant C1 in f(t)t <= lambda/2 t^2 + C1 t^p.
double eigenvalue_split_constant(const Nonlinearity& nl, double lambda, double p, const SampleGrid& grid = {});

}  // namespace henon
