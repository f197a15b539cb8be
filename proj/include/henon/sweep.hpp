#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/analysis.hpp"

namespace henon {

struct SweepRow {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double m_radial = 0.0, m_sector = 0.0, upper_bound = 0.0;
  double t_alpha = 0.0, t_alpha_bound = 0.0;
  bool lemma5_pass = false;
  bool converged = false;
  double anisotropy = 0.0;        // of the winning sector minimizer
  double quadrature_floor = 0.0;  // polar vs radial energy of the radial minimizer, relative
  std::string sector_snapshot;    // relative path, when written
  nlohmann::json diagnostics;     // records, projections, checks

  [[nodiscard]] nlohmann::json to_json() const;
  static SweepRow from_json(const nlohmann::json& j);
};

struct SweepTable {
  AmbientSpec ambient;
  std::vector<SweepRow> rows;
  double m_prime = 0.0;
  [[nodiscard]] std::string to_csv() const;
};

inline constexpr const char* kSweepCsvHeader =
    "alpha,beta,gamma,m_radial,m_sector,upper_bound,t_alpha,t_alpha_bound,lemma5_pass,converged";

struct SweepOptions {
  GridConfig grid;
  DescentConfig descent;
  TestFunctionSpec test_function;
  int refine = 8;  // change-of-variables refinement
  int jobs = 1;
  std::string out_dir;  // empty: no row files, no snapshots
};

/// Throws ConfigError unless alphas are strictly increasing and each exceeds n + 2.
void validate_sweep_alphas(const std::vector<double>& alphas, int n);

/// Runs every row (radial and sector minimization, upper bound, projection bound, m_beta vs m'/2).
/// With out_dir set, finished rows are stored atomically under rows/ and reused when the
/// configuration fingerprint matches.
SweepTable sweep(const std::vector<double>& alphas, const Nonlinearity& nl, const AmbientSpec& ambient,
                 const SweepOptions& opts);

enum class FitColumn { m_radial, m_sector, upper_bound };
enum class FitWindow { all, upper_half };

struct ExponentFit {
  double slope = 0.0, intercept = 0.0, std_error = 0.0;
  double alpha_min = 0.0, alpha_max = 0.0;
  int points = 0;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Least squares of log(level) on log(alpha) over converged rows. At least 4 converged rows are required
/// (InsufficientData); `upper_half` then keeps the upper half of them.
ExponentFit fit_exponent(const SweepTable& table, FitColumn column, FitWindow window = FitWindow::upper_half);

struct BreakingResult {
  double alpha = 0.0;
  double m_radial = 0.0, m_sector = 0.0;
  double anisotropy = 0.0, quadrature_floor = 0.0;
  std::string snapshot;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Smallest converged alpha with m_sector < m_radial (1 - margin).
std::optional<BreakingResult> detect_breaking(const SweepTable& table, double margin = 0.01);

}  // namespace henon
