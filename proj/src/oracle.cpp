#include "henon/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <boost/numeric/odeint.hpp>

#include "henon/discretization.hpp"
#include "henon/error.hpp"
#include "henon/log.hpp"

namespace henon {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

// Integrates u'' + (n-1)/r u' + r^alpha g(u) = 0 from u(0) = s with the series start
// u ~ s - g(s) r^{alpha+2} / ((alpha+2)(alpha+n)).
ShootResult integrate(double s, double alpha, int n, const std::function<double(double)>& g, double tol,
                      std::vector<double> observe, double radius) {
  ShootResult out;
  out.s = s;
  if (observe.empty()) {
    const int m = 512;
    for (int k = 0; k <= m; ++k) observe.push_back(radius * k / m);
  }
  if (!std::is_sorted(observe.begin(), observe.end()) || observe.front() < 0.0 || observe.back() > radius) {
    throw ConfigError("shooting observation radii must be sorted within [0, radius]");
  }
  const double gs = g(s);
  const double denom = (alpha + 2.0) * (alpha + n);
  auto series_u = [&](double r) { return s - gs * std::pow(r, alpha + 2.0) / denom; };
  auto series_du = [&](double r) { return -gs * std::pow(r, alpha + 1.0) / (alpha + n); };

  double r0 = 1e-2 * radius;
  if (gs != 0.0) {
    const double scale = std::pow(1e-6 * std::abs(s) * denom / std::abs(gs), 1.0 / (alpha + 2.0));
    r0 = std::min(r0, scale);
  }
  out.start_radius = r0;

  std::vector<double> times{r0};
  for (double r : observe) {
    if (r <= r0) {
      out.r.push_back(r);
      out.u.push_back(series_u(r));
      out.du.push_back(series_du(r));
    } else {
      times.push_back(r);
    }
  }
  if (times.size() > 1) {
    const double nm1 = n - 1.0;
    auto rhs = [&](const State& y, State& dy, double r) {
      if (!(std::abs(y[0]) <= kOverflowGuard)) throw BlowUp("shooting trajectory exceeded the overflow guard");
      dy[0] = y[1];
      dy[1] = -nm1 / r * y[1] - std::pow(r, alpha) * g(y[0]);
    };
    State y{series_u(r0), series_du(r0)};
    const double abs_tol = tol * std::max(1.0, std::abs(s)) * 1e-2;
    auto stepper = odeint::make_dense_output(abs_tol, tol, odeint::runge_kutta_dopri5<State>());
    bool first = true;
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3 * r0,
                            [&](const State& st, double r) {
                              if (first) {
                                first = false;
                                return;
                              }
                              out.r.push_back(r);
                              out.u.push_back(st[0]);
                              out.du.push_back(st[1]);
                            });
  }
  out.u1 = out.u.back();
  for (std::size_t k = 1; k < out.u.size(); ++k) {
    if (out.u[k - 1] > 0.0 && out.u[k] <= 0.0) {
      const double w = out.u[k - 1] / (out.u[k - 1] - out.u[k]);
      out.first_zero = out.r[k - 1] + w * (out.r[k] - out.r[k - 1]);
      break;
    }
  }
  return out;
}

// +1: positive on [0, radius]; -1: reaches zero inside.
int side(const ShootResult& res) { return res.first_zero ? -1 : 1; }

}  // namespace

bool ShootResult::positive_before_end() const {
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    if (!(u[k] > 0.0)) return false;
  }
  return true;
}

ShootResult shoot(double s, double alpha, const Nonlinearity& nl, int n, double tol,
                  const std::vector<double>& observe, double radius) {
  if (!(s > 0.0)) {
    // f vanishes on t <= 0: the trajectory stays at s
    ShootResult out;
    out.s = s;
    std::vector<double> obs = observe;
    if (obs.empty()) obs = {0.0, radius};
    for (double r : obs) {
      out.r.push_back(r);
      out.u.push_back(s);
      out.du.push_back(0.0);
    }
    out.u1 = s;
    return out;
  }
  return integrate(s, alpha, n, [&](double u) { return nl.f(u); }, tol, observe, radius);
}

nlohmann::json ShootingGroundState::to_json() const {
  nlohmann::json j = snapshot(field, kShootingProvenance);
  j["energy"] = energy;
  j["s"] = s;
  j["residual"] = residual;
  j["dirichlet"] = dirichlet;
  j["zeros"] = zeros;
  j["zero_energies"] = zero_energies;
  return j;
}

ShootingGroundState shooting_ground_state(double alpha, const Nonlinearity& nl, const AmbientSpec& ambient,
                                          std::shared_ptr<const RadialGrid> grid, double tol) {
  const int n = ambient.n;
  auto sgn = [&](double s) { return side(shoot(s, alpha, nl, n, tol)); };

  std::vector<double> heights;
  for (int k = 0; k <= 120; ++k) heights.push_back(1e-6 * std::pow(10.0, k / 10.0));
  std::vector<int> sides;
  for (double s : heights) sides.push_back(sgn(s));

  std::vector<double> zeros;
  for (std::size_t k = 1; k < heights.size(); ++k) {
    if (sides[k] == sides[k - 1]) continue;
    double lo = heights[k - 1], hi = heights[k];
    const int slo = sides[k - 1];
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sgn(mid) == slo ? lo : hi) = mid;
    }
    zeros.push_back(slo > 0 ? lo : hi);  // the positive side
  }
  if (zeros.empty()) {
    throw NoCrossing("no sign change of u(1) for s in [1e-6, 1e6] (alpha = " + std::to_string(alpha) + ")");
  }

  ShootingGroundState best;
  bool have = false;
  auto disc = make_discretization(grid, ambient);
  Problem problem(disc, Functional::henon(alpha), nl);
  for (double s : zeros) {
    auto traj = shoot(s, alpha, nl, n, tol, grid->nodes);
    std::vector<double> values = traj.u;
    for (auto& v : values) v = std::max(v, 0.0);
    values.back() = 0.0;
    RadialField field{grid, ambient, values};
    const auto st = problem.state(disc->restrict(values));
    const double e = problem.energy(st);
    best.zeros.push_back(s);
    best.zero_energies.push_back(e);
    if (!have || e < best.energy) {
      have = true;
      best.field = field;
      best.energy = e;
      best.s = s;
      best.dirichlet = st.dirichlet;
      best.residual = problem.residual(st);
    }
  }
  if (zeros.size() > 1) {
    log::info("shooting found " + std::to_string(zeros.size()) + " zeros of u(1); keeping the lowest energy");
  }
  return best;
}

double first_eigenvalue(int n, double tol, double radius) {
  if (n < 2) throw ConfigError("first_eigenvalue needs n >= 2");
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  auto sgn = [&](double lambda) {
    return side(integrate(1.0, 0.0, n, [lambda](double u) { return lambda * u; }, tol, {}, radius));
  };
  double lo = 0.0, hi = 1.0 / (radius * radius);
  while (sgn(hi) > 0) {
    lo = hi;
    hi *= 1.25;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sgn(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double eigenvalue_split_constant(const Nonlinearity& nl, double lambda, double p, const SampleGrid& grid) {
  double c1 = 0.0;
  for (int k = 0; k < grid.points; ++k) {
    const double t = grid.t_min * std::pow(grid.t_max / grid.t_min, static_cast<double>(k) / (grid.points - 1));
    c1 = std::max(c1, (nl.f(t) * t - 0.5 * lambda * t * t) / std::pow(t, p));
  }
  return c1;
}

}  // namespace henon
