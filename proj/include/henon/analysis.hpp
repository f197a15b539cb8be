#pragma once

#include <mutex>
#include <numbers>
#include <optional>

#include <json.hpp>

#include "henon/nehari.hpp"

namespace henon {

struct ChangeOfVariables {
  RadialField v;
  ScalingParams scaling;
  double err_f = 0.0;     // relative gap between int |x|^a f(u)u and beta int f(v)v
  double err_grad = 0.0;  // relative gap between int |grad u|^2 and (1/beta) int |grad v|^2 |x|^-gamma
  double lhs_f = 0.0, rhs_f = 0.0, lhs_grad = 0.0, rhs_grad = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// v(rho) = u(rho^beta) on the image of u's nodes, each image cell split into `refine` equal parts.
ChangeOfVariables change_of_variables(const RadialField& u, double alpha, const Nonlinearity& nl, int refine = 8);

struct ProjectionBound {
  double t_alpha = 0.0;
  double bound = 0.0;  // beta^{2/(mu1-2)}
  bool pass = false;
  ChangeOfVariables transport;
  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr double kProjectionBoundSlack = 1e-6;

/// Transports a radial minimizer to v_alpha and scales it onto the |x|^-gamma manifold.
ProjectionBound projection_bound_check(const RadialField& u_alpha, double alpha, const Nonlinearity& nl,
                                       int refine = 8);

/// m' (J on its manifold) is alpha-independent; the cache computes it once per nonlinearity and grid.
class PrimeLevelCache {
 public:
  const CriticalLevelRecord& get(const Nonlinearity& nl, const AmbientSpec& ambient, const GridConfig& grid,
                                 const DescentConfig& cfg);
  [[nodiscard]] int computations() const { return computations_; }

 private:
  std::mutex mutex_;
  std::optional<CriticalLevelRecord> record_;
  std::string key_;
  int computations_ = 0;
};

struct Lemma5Result {
  double m_beta = 0.0;
  double m_prime = 0.0;
  double tol = 0.0;  // 1e-8 m'
  bool pass = false;
  bool converged = false;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Compares m_beta (J_beta, weight |x|^-gamma) with m'/2. Throws ConfigError unless alpha > n.
Lemma5Result lemma5_check(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient, const GridConfig& grid,
                          const DescentConfig& cfg, PrimeLevelCache& cache);

/// Bump profile on (1/4, 3/4) x (theta1, theta2), product of exp(-1/(1-s^2)) factors scaled to peak 1.
struct TestFunctionSpec {
  double theta1 = std::numbers::pi / 8;
  double theta2 = 3 * std::numbers::pi / 8;
  double amplitude = 1.0;
  void validate() const;
  [[nodiscard]] double profile(double r, double phi) const;
};

struct UpperBound {
  double value = 0.0;  // I_alpha(t_eps u^eps)
  double t_eps = 0.0;
  double h1 = 0.0;  // fibering map at t = 1
  double epsilon = 0.0;
  double envelope_exponent = 0.0;
  PolarField test_function;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// u^eps(rho, theta) = psi(rho^{1/eps}, theta/eps), eps = n/(alpha+n), on the given polar grid.
PolarField concentrated_test_function(std::shared_ptr<const PolarGrid> grid, const AmbientSpec& ambient,
                                      double alpha, const TestFunctionSpec& spec);

/// Throws EpsilonTooLarge if the fibering map at t = 1 is not positive.
UpperBound sector_upper_bound(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient,
                              std::shared_ptr<const PolarGrid> grid, const TestFunctionSpec& spec = {});
UpperBound sector_upper_bound(double alpha, const Nonlinearity& nl, const Problem& sector_problem,
                              const TestFunctionSpec& spec = {});

/// Exponents of the asymptotic bounds.
double radial_target_exponent(double mu1);
double sector_envelope_exponent(double mu2, int n, int l);
/// The variant with +1 - n in place of +l - n, reported alongside.
double sector_envelope_exponent_alt(double mu2, int n);

}  // namespace henon
