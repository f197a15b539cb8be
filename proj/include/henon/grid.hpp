#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

namespace henon {

/// Surface measure of the unit sphere S^{k-1} in R^k.
double sphere_measure(int k);

/// Default splitting index: n/2 for even n, [n/2] + 1 for odd n.
int default_splitting(int n);

/// Space dimension and the splitting R^n = R^l x R^{n-l} used by the sector subspace.
struct AmbientSpec {
  int n = 4;
  int l = 2;
  double omega_n = 0.0;

  /// Throws ConfigError unless n >= 4 and 1 <= l <= n-1.
  static AmbientSpec make(int n, std::optional<int> l = std::nullopt);

  /// Reference weight exponent (n-2)/2.
  [[nodiscard]] double a() const { return 0.5 * (n - 2); }
  /// omega_l * omega_{n-l}: measure factor of the (|y|, |z|) reduction.
  [[nodiscard]] double polar_measure() const;
  /// sin^{n-l-1}(theta) cos^{l-1}(theta).
  [[nodiscard]] double angular_weight(double theta) const;
};

/// Quantities of the compression r -> r^beta attached to a Henon exponent alpha.
struct ScalingParams {
  double alpha = 0.0;
  double beta = 1.0;   // n / (alpha + n); also the concentration parameter of the sector test functions
  double gamma = 0.0;  // (n-2)(1 - beta)
  double a = 1.0;      // (n-2)/2

  static ScalingParams make(double alpha, int n);
  [[nodiscard]] double epsilon() const { return beta; }
};

enum class GradingToward { origin, boundary };

/// Strictly increasing nodes 0 = r_0 < ... < r_M = 1.
///
/// `origin` grading places r_i = (i/M)^g; `boundary` grading places r_i = 1 - (1 - i/M)^g.
struct RadialGrid {
  std::vector<double> nodes;
  double grading = 1.0;
  GradingToward toward = GradingToward::origin;

  [[nodiscard]] int cells() const { return static_cast<int>(nodes.size()) - 1; }
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Tensor grid on [0,1] x [0, pi/2]; the rho axis is graded like a RadialGrid, theta is uniform.
struct PolarGrid {
  std::vector<double> rho;
  std::vector<double> theta;
  double grading = 1.0;
  GradingToward toward = GradingToward::origin;

  [[nodiscard]] int rho_cells() const { return static_cast<int>(rho.size()) - 1; }
  [[nodiscard]] int theta_cells() const { return static_cast<int>(theta.size()) - 1; }
  [[nodiscard]] std::size_t node_count() const { return rho.size() * theta.size(); }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return i * theta.size() + j; }
  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr int kMinGridCells = 4;

RadialGrid build_radial_grid(int cells, double grading, GradingToward toward = GradingToward::origin);
PolarGrid build_polar_grid(int rho_cells, int theta_cells, double grading,
                           GradingToward toward = GradingToward::origin);

/// Node placement on [0,1] shared by both grid kinds.
std::vector<double> graded_nodes(int cells, double grading, GradingToward toward);

GradingToward grading_from_string(const std::string& name);
const char* to_string(GradingToward toward);

}  // namespace henon
