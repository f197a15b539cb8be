#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/discretization.hpp"

namespace henon {

/// Result of scaling a field onto its Nehari manifold.
struct NehariProjection {
  double t_star = 1.0;
  double residual = 0.0;   // psi(t_star)
  double dirichlet = 0.0;  // Dirichlet term of the unscaled field
  double bracket_lo = 0.0, bracket_hi = 0.0;
  int evaluations = 0;
  /// Every sign-change bracket met while expanding; more than one entry signals several fibering zeros.
  std::vector<std::pair<double, double>> sign_changes;

  [[nodiscard]] nlohmann::json to_json() const;
};

struct NehariResidual {
  double value = 0.0;
  bool trivial = false;  // the zero field; manifolds exclude it
};

/// Scales u so that D(tu) = int w f(tu) tu, taking the smallest root found from t = 1.
/// Throws NoSignChange when no root lies in [1e-8, 1e8].
NehariProjection project(const Problem& problem, const Vec& u);

NehariResidual nehari_residual(const RadialField& u, double alpha, const Nonlinearity& nl, double c);
NehariResidual nehari_residual(const PolarField& v, double alpha, const Nonlinearity& nl, double c);
NehariProjection project(const RadialField& u, double alpha, const Nonlinearity& nl, double c);
NehariProjection project(const PolarField& v, double alpha, const Nonlinearity& nl, double c);

struct DescentConfig {
  int max_iterations = 50000;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double max_step = 16.0;
  double min_step = 1e-10;
  double energy_tol = 1e-9;  // relative energy change per iteration
  int energy_window = 5;     // consecutive iterations below energy_tol
  double residual_tol = 1e-8;
  double gradient_tol = 1e-9;  // K^{-1}-norm of the gradient relative to sqrt(D)
  bool interpolate = true;     // quadratic refinement of the trial step before backtracking
  bool conjugate = true;       // Polak-Ribiere+ directions; false gives plain preconditioned descent
  int random_starts = 0;       // seeded perturbations added to the deterministic starts
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct GridConfig {
  int radial_cells = 2048;
  int rho_cells = 256;
  int theta_cells = 64;
  double grading = 2.0;
  GradingToward toward = GradingToward::boundary;

  [[nodiscard]] nlohmann::json to_json() const;
};

enum class Subspace { radial, sector };
enum class LevelKind { radial, sector, weighted_a, weighted_gamma };
const char* to_string(LevelKind kind);

struct StartOutcome {
  int index = 0;
  std::string label;
  double level = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

struct CriticalLevelRecord {
  double alpha = 0.0;
  LevelKind kind = LevelKind::radial;
  double grad_weight = 0.0;
  double density_weight = 0.0;
  double level = 0.0;
  double dirichlet = 0.0;
  double residual = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int winner = 0;
  bool converged = false;
  std::string stop_reason;
  std::string snapshot_path;
  std::optional<RadialField> radial;
  std::optional<PolarField> polar;
  std::vector<StartOutcome> starts;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// One descent run from u0 (already nonnegative and nonzero).
struct DescentResult {
  Vec u;
  double level = 0.0;
  double dirichlet = 0.0;
  double residual = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

/// Sobolev-preconditioned projected descent on the Nehari manifold.
///
/// Direction d = -K^{-1} grad I (a unit step is the fixed-point iteration u <- K^{-1} f-load);
/// each trial is clipped to u >= 0 and reprojected; Armijo backtracking with step doubling.
DescentResult descend(const Problem& problem, Vec u0, const DescentConfig& cfg);

/// Multistart minimization on a given discretization. `kind` selects the start family and the record tag.
CriticalLevelRecord minimize(const Problem& problem, LevelKind kind, double alpha, const DescentConfig& cfg);

/// Builds the grid and discretization from `grid` and minimizes I_alpha (c = 0), J (c = a) or J_beta (c = gamma).
CriticalLevelRecord minimize(Subspace subspace, double alpha, const Nonlinearity& nl, double c,
                             const AmbientSpec& ambient, const GridConfig& grid, const DescentConfig& cfg);

/// Relative discrepancy |I(u) - (1/2 int w f(u)u - int w F(u))| / |I(u)| of the record's minimizer.
/// Throws ConfigError for a zero field.
double level_identity_check(const CriticalLevelRecord& record, const Nonlinearity& nl);

std::shared_ptr<const RadialGrid> make_radial_grid(const GridConfig& g);
std::shared_ptr<const PolarGrid> make_polar_grid(const GridConfig& g);

}  // namespace henon
