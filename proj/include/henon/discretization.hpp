#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "henon/field.hpp"
#include "henon/nonlinearity.hpp"

namespace henon {

using Vec = Eigen::VectorXd;

/// Weight pairing of an energy: |x|^{-c} on the gradient, |x|^{w} on F.
///
/// henon(alpha) gives I_alpha; weighted_a gives J; weighted_gamma gives J_beta.
struct Functional {
  double grad_weight = 0.0;
  double density_weight = 0.0;

  static Functional henon(double alpha) { return {0.0, alpha}; }
  static Functional weighted_a(int n) { return {0.5 * (n - 2), 0.0}; }
  static Functional weighted_gamma(double alpha, int n);
  /// (c = 0, weight alpha) or (c != 0, weight 0).
  static Functional pairing(double alpha, double c) { return c == 0.0 ? henon(alpha) : Functional{c, 0.0}; }
};

/// P1 finite elements on a symmetry reduction of the unit ball.
///
/// Degrees of freedom exclude Dirichlet nodes; the polar center row is a single DOF.
/// The Dirichlet form is exact in the radial variable; densities use a fixed
/// quadrature cloud whose points carry up to three shape functions.
class Discretization {
 public:
  using Matrix = Eigen::SparseMatrix<double>;

  virtual ~Discretization() = default;
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  [[nodiscard]] std::size_t dofs() const { return dofs_; }
  [[nodiscard]] std::size_t points() const { return radius_.size(); }
  [[nodiscard]] std::size_t nodes() const { return nodes_; }
  [[nodiscard]] const AmbientSpec& ambient() const { return ambient_; }
  [[nodiscard]] virtual bool is_polar() const = 0;
  /// The underlying grid of the matching kind, else null.
  [[nodiscard]] virtual std::shared_ptr<const RadialGrid> radial_grid() const { return nullptr; }
  [[nodiscard]] virtual std::shared_ptr<const PolarGrid> polar_grid() const { return nullptr; }

  /// Stiffness matrix of u -> int |x|^{-c} |grad u|^2. Throws ConfigError for c >= n-2.
  [[nodiscard]] const Matrix& stiffness(double c) const;
  [[nodiscard]] double dirichlet(const Vec& u, double c) const;
  void solve(const Vec& rhs, double c, Vec& out) const;

  /// Quadrature weight of each point for the density |x|^w; cached per w.
  [[nodiscard]] const std::vector<double>& weights(double w) const;
  [[nodiscard]] const std::vector<double>& radii() const { return radius_; }
  void interpolate(const Vec& u, std::vector<double>& uq) const;
  /// out_k = sum_q vals_q phi_k(x_q).
  void scatter(const std::vector<double>& vals, Vec& out) const;
  [[nodiscard]] double integrate(const Vec& u, double w, const std::function<double(double)>& h) const;

  /// Nodal vector (grid layout) to DOFs; the polar center takes the mean of its row.
  [[nodiscard]] virtual Vec restrict(const std::vector<double>& nodal) const = 0;
  /// DOFs to nodal vector with zero Dirichlet values.
  [[nodiscard]] virtual std::vector<double> extend(const Vec& u) const = 0;
  /// DOF gradient to nodal gradient: the polar center entry is shared equally by its row.
  [[nodiscard]] virtual std::vector<double> extend_gradient(const Vec& g) const = 0;

 protected:
  Discretization(const AmbientSpec& ambient, std::size_t dofs, std::size_t nodes)
      : ambient_(ambient), dofs_(dofs), nodes_(nodes) {}

  struct Difference {
    int a, b;     // DOF indices, or -1 for a Dirichlet node
    double coef;  // weight of (u_a - u_b)^2
  };
  /// The Dirichlet form as a sum of squared nodal differences.
  [[nodiscard]] virtual std::vector<Difference> differences(double c) const = 0;

  void add_point(const int idx[3], const double shape[3], double radius, double base);

  AmbientSpec ambient_;
  std::size_t dofs_;
  std::size_t nodes_;

 private:
  struct StiffnessEntry {
    Matrix k;
    std::unique_ptr<Eigen::SimplicialLDLT<Matrix>> ldlt;
  };
  StiffnessEntry& entry(double c) const;

  std::vector<int> idx_;  // 3 per point, Dirichlet mapped to dofs_
  std::vector<double> shape_;
  std::vector<double> radius_;
  std::vector<double> base_;

  mutable std::mutex mutex_;
  mutable std::map<double, StiffnessEntry> stiffness_;
  mutable std::map<double, std::vector<double>> weights_;
};

std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const RadialGrid> grid,
                                                          const AmbientSpec& ambient);
std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const PolarGrid> grid,
                                                          const AmbientSpec& ambient);

/// Values of one state at the quadrature points, shared by energy, gradient and fibering evaluations.
struct PointState {
  std::vector<double> uq;
  double dirichlet = 0.0;
};

/// An energy (discretization + weight pairing + nonlinearity) on DOF vectors.
class Problem {
 public:
  Problem(std::shared_ptr<const Discretization> disc, Functional functional, Nonlinearity nl);

  [[nodiscard]] const Discretization& disc() const { return *disc_; }
  [[nodiscard]] std::shared_ptr<const Discretization> disc_ptr() const { return disc_; }
  [[nodiscard]] const Functional& functional() const { return functional_; }
  [[nodiscard]] const Nonlinearity& nl() const { return nl_; }
  [[nodiscard]] const std::vector<double>& weights() const { return *weights_; }

  void state(const Vec& u, PointState& s) const;
  [[nodiscard]] PointState state(const Vec& u) const;

  /// sum_q w_q F(t u_q)
  [[nodiscard]] double density_F(const PointState& s, double t = 1.0) const;
  /// sum_q w_q f(t u_q) t u_q
  [[nodiscard]] double density_fu(const PointState& s, double t = 1.0) const;
  [[nodiscard]] double energy(const PointState& s) const { return 0.5 * s.dirichlet - density_F(s); }
  [[nodiscard]] double residual(const PointState& s) const { return s.dirichlet - density_fu(s); }
  /// Euclidean DOF gradient K u - sum_q w_q f(u_q) phi(x_q).
  void gradient(const Vec& u, const PointState& s, Vec& out) const;
  /// K^{-1} sum_q w_q f(u_q) phi(x_q), the fixed-point map of the Euler-Lagrange equation.
  void picard(const PointState& s, Vec& out) const;

 private:
  std::shared_ptr<const Discretization> disc_;
  Functional functional_;
  Nonlinearity nl_;
  const std::vector<double>* weights_;
};

double weighted_dirichlet(const RadialField& u, double c);
double weighted_dirichlet(const PolarField& v, double c);
/// Throws ConfigError unless w > -n.
double weighted_density_integral(const RadialField& u, double w, const std::function<double(double)>& h);
double weighted_density_integral(const PolarField& v, double w, const std::function<double(double)>& h);
/// 1/2 int |x|^{-c} |grad u|^2 - int |x|^{w} F(u), with w = alpha for c = 0 and w = 0 otherwise.
double energy(const RadialField& u, double alpha, const Nonlinearity& nl, double c);
double energy(const PolarField& v, double alpha, const Nonlinearity& nl, double c);
/// Partial derivatives of the discrete energy with respect to the nodal values; Dirichlet nodes carry 0.
RadialField energy_gradient(const RadialField& u, double alpha, const Nonlinearity& nl, double c);
PolarField energy_gradient(const PolarField& v, double alpha, const Nonlinearity& nl, double c);

}  // namespace henon
