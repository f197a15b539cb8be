#include "henon/analysis.hpp"

#include <cmath>
#include <string>

#include "henon/error.hpp"
#include "henon/log.hpp"

namespace henon {

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

nlohmann::json ChangeOfVariables::to_json() const {
  return {{"alpha", scaling.alpha},   {"beta", scaling.beta},   {"gamma", scaling.gamma},
          {"err_f", err_f},           {"err_grad", err_grad},   {"lhs_f", lhs_f},
          {"rhs_f", rhs_f},           {"lhs_grad", lhs_grad},   {"rhs_grad", rhs_grad},
          {"v_cells", v.grid->cells()}};
}

ChangeOfVariables change_of_variables(const RadialField& u, double alpha, const Nonlinearity& nl, int refine) {
  if (!(alpha > 0.0)) throw ConfigError("change of variables needs alpha > 0");
  if (refine < 1) throw ConfigError("refine must be >= 1");
  const int n = u.ambient.n;
  ChangeOfVariables out;
  out.scaling = ScalingParams::make(alpha, n);
  const double beta = out.scaling.beta;

  auto grid = std::make_shared<RadialGrid>();
  grid->grading = u.grid->grading;
  grid->toward = u.grid->toward;
  auto& rho = grid->nodes;
  rho.push_back(0.0);
  for (std::size_t i = 1; i < u.grid->nodes.size(); ++i) {
    const double a = rho.back();
    const double b = i + 1 == u.grid->nodes.size() ? 1.0 : std::pow(u.grid->nodes[i], 1.0 / beta);
    for (int k = 1; k <= refine; ++k) {
      const double x = k == refine ? b : a + (b - a) * k / refine;
      if (x > rho.back()) rho.push_back(x);
    }
  }
  std::vector<double> values;
  values.reserve(rho.size());
  for (double x : rho) values.push_back(u.at(std::pow(x, beta)));
  values.back() = 0.0;
  out.v = RadialField{grid, u.ambient, std::move(values)};

  auto fu = [&](double t) { return nl.f(t) * t; };
  out.lhs_f = weighted_density_integral(u, alpha, fu);
  out.rhs_f = beta * weighted_density_integral(out.v, 0.0, fu);
  out.lhs_grad = weighted_dirichlet(u, 0.0);
  out.rhs_grad = weighted_dirichlet(out.v, out.scaling.gamma) / beta;
  out.err_f = rel_gap(out.lhs_f, out.rhs_f);
  out.err_grad = rel_gap(out.lhs_grad, out.rhs_grad);
  return out;
}

nlohmann::json ProjectionBound::to_json() const {
  return {{"t_alpha", t_alpha}, {"bound", bound}, {"pass", pass}, {"transport", transport.to_json()}};
}

ProjectionBound projection_bound_check(const RadialField& u_alpha, double alpha, const Nonlinearity& nl,
                                       int refine) {
  ProjectionBound out;
  out.transport = change_of_variables(u_alpha, alpha, nl, refine);
  const auto& sc = out.transport.scaling;
  out.t_alpha = project(out.transport.v, alpha, nl, sc.gamma).t_star;
  out.bound = std::pow(sc.beta, 2.0 / (nl.params().mu1 - 2.0));
  out.pass = out.t_alpha <= out.bound * (1.0 + kProjectionBoundSlack);
  return out;
}

const CriticalLevelRecord& PrimeLevelCache::get(const Nonlinearity& nl, const AmbientSpec& ambient,
                                                const GridConfig& grid, const DescentConfig& cfg) {
  std::lock_guard lock(mutex_);
  nlohmann::json key{{"nl", nl.to_json()},    {"n", ambient.n},           {"l", ambient.l},
                     {"grid", grid.to_json()}, {"descent", cfg.to_json()}};
  const std::string k = key.dump();
  if (!record_ || key_ != k) {
    record_ = minimize(Subspace::radial, 0.0, nl, ambient.a(), ambient, grid, cfg);
    key_ = k;
    ++computations_;
  }
  return *record_;
}

nlohmann::json Lemma5Result::to_json() const {
  return {{"m_beta", m_beta}, {"m_prime", m_prime}, {"tol", tol}, {"pass", pass}, {"converged", converged}};
}

Lemma5Result lemma5_check(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient, const GridConfig& grid,
                          const DescentConfig& cfg, PrimeLevelCache& cache) {
  if (!(alpha > ambient.n)) {
    throw ConfigError("the m_beta >= m'/2 comparison needs alpha > n (alpha = " + std::to_string(alpha) + ")");
  }
  const auto& prime = cache.get(nl, ambient, grid, cfg);
  const auto sc = ScalingParams::make(alpha, ambient.n);
  const auto mb = minimize(Subspace::radial, alpha, nl, sc.gamma, ambient, grid, cfg);
  Lemma5Result out;
  out.m_prime = prime.level;
  out.m_beta = mb.level;
  out.tol = 1e-8 * prime.level;
  out.pass = out.m_beta >= 0.5 * out.m_prime - out.tol;
  out.converged = prime.converged && mb.converged;
  return out;
}

void TestFunctionSpec::validate() const {
  if (!(0.0 < theta1 && theta1 < theta2 && theta2 < 0.5 * std::numbers::pi)) {
    throw ConfigError("test function needs 0 < theta1 < theta2 < pi/2");
  }
  if (!(amplitude > 0.0)) throw ConfigError("test function amplitude must be positive");
}

double TestFunctionSpec::profile(double r, double phi) const {
  const double mid = 0.5 * (theta1 + theta2), half = 0.5 * (theta2 - theta1);
  return amplitude * bump((r - 0.5) / 0.25) * bump((phi - mid) / half);
}

PolarField concentrated_test_function(std::shared_ptr<const PolarGrid> grid, const AmbientSpec& ambient,
                                      double alpha, const TestFunctionSpec& spec) {
  spec.validate();
  const double eps = ScalingParams::make(alpha, ambient.n).epsilon();
  return sample_polar(std::move(grid), ambient, [&](double rho, double theta) {
    return spec.profile(std::pow(rho, 1.0 / eps), theta / eps);
  });
}

nlohmann::json UpperBound::to_json() const {
  return {{"value", value},
          {"t_eps", t_eps},
          {"h1", h1},
          {"epsilon", epsilon},
          {"envelope_exponent", envelope_exponent}};
}

UpperBound sector_upper_bound(double alpha, const Nonlinearity& nl, const Problem& sector_problem,
                              const TestFunctionSpec& spec) {
  const auto& disc = sector_problem.disc();
  if (!disc.is_polar()) throw ConfigError("sector upper bound needs a polar discretization");
  const auto& amb = disc.ambient();
  UpperBound out;
  out.epsilon = ScalingParams::make(alpha, amb.n).epsilon();
  out.envelope_exponent = sector_envelope_exponent(nl.params().mu2, amb.n, amb.l);
  out.test_function = concentrated_test_function(disc.polar_grid(), amb, alpha, spec);
  const Vec u = disc.restrict(out.test_function.values);
  PointState s = sector_problem.state(u);
  out.h1 = sector_problem.residual(s);
  if (!(out.h1 > 0.0)) {
    throw EpsilonTooLarge("test function is not below the manifold at alpha = " + std::to_string(alpha) +
                          " (h(1) = " + std::to_string(out.h1) + ")");
  }
  const auto pr = project(sector_problem, u);
  out.t_eps = pr.t_star;
  out.value = sector_problem.energy(sector_problem.state(pr.t_star * u));
  return out;
}

UpperBound sector_upper_bound(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient,
                              std::shared_ptr<const PolarGrid> grid, const TestFunctionSpec& spec) {
  Problem p(make_discretization(std::move(grid), ambient), Functional::henon(alpha), nl);
  return sector_upper_bound(alpha, nl, p, spec);
}

double radial_target_exponent(double mu1) { return (mu1 + 2.0) / (mu1 - 2.0); }

double sector_envelope_exponent(double mu2, int n, int l) { return (mu2 + 2.0) / (mu2 - 2.0) - n + l; }

double sector_envelope_exponent_alt(double mu2, int n) { return (mu2 + 2.0) / (mu2 - 2.0) + 1.0 - n; }

}  // namespace henon
