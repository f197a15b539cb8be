#include "henon/discretization.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "henon/error.hpp"

namespace henon {

namespace {

struct Rule {
  std::vector<double> x;  // on [0, 1]
  std::vector<double> w;  // summing to 1
};

template <unsigned N>
Rule gauss_unit() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * wt[k]);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - a[k]));
    r.w.push_back(0.5 * wt[k]);
    r.x.push_back(0.5 * (1.0 + a[k]));
    r.w.push_back(0.5 * wt[k]);
  }
  return r;
}

const Rule& gauss4() {
  static const Rule r = gauss_unit<4>();
  return r;
}
const Rule& gauss16() {
  static const Rule r = gauss_unit<16>();
  return r;
}

// Symmetric degree-4 rule on the reference triangle; weights sum to 1.
struct TrianglePoint {
  double l0, l1, l2, w;
};
const std::vector<TrianglePoint>& triangle_rule() {
  static const std::vector<TrianglePoint> pts = [] {
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    return std::vector<TrianglePoint>{{a, a, 1 - 2 * a, wa}, {a, 1 - 2 * a, a, wa}, {1 - 2 * a, a, a, wa},
                                      {b, b, 1 - 2 * b, wb}, {b, 1 - 2 * b, b, wb}, {1 - 2 * b, b, b, wb}};
  }();
  return pts;
}

// int_a^b r^{k-1} dr
double power_integral(double a, double b, double k) { return (std::pow(b, k) - std::pow(a, k)) / k; }

void check_grad_weight(double c, int n) {
  if (!(c < n - 2)) {
    throw ConfigError("gradient weight |x|^-c with c = " + std::to_string(c) +
                      " is not integrable (need c < n - 2)");
  }
}

class RadialDiscretization final : public Discretization {
 public:
  RadialDiscretization(std::shared_ptr<const RadialGrid> grid, const AmbientSpec& ambient)
      : Discretization(ambient, static_cast<std::size_t>(grid->cells()), grid->nodes.size()),
        grid_(std::move(grid)) {
    const auto& r = grid_->nodes;
    const int m = grid_->cells();
    const auto& g = gauss4();
    for (int i = 0; i < m; ++i) {
      const double h = r[i + 1] - r[i];
      const int idx[3] = {dof(i), dof(i + 1), -1};
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        const double x = r[i] + h * g.x[q];
        const double shape[3] = {1.0 - g.x[q], g.x[q], 0.0};
        add_point(idx, shape, x, ambient_.omega_n * h * g.w[q] * std::pow(x, ambient_.n - 1));
      }
    }
  }

  bool is_polar() const override { return false; }
  std::shared_ptr<const RadialGrid> radial_grid() const override { return grid_; }

  Vec restrict(const std::vector<double>& nodal) const override {
    Vec u(static_cast<Eigen::Index>(dofs_));
    for (std::size_t i = 0; i < dofs_; ++i) u[static_cast<Eigen::Index>(i)] = nodal[i];
    return u;
  }
  std::vector<double> extend(const Vec& u) const override {
    std::vector<double> out(nodes_, 0.0);
    for (std::size_t i = 0; i < dofs_; ++i) out[i] = u[static_cast<Eigen::Index>(i)];
    return out;
  }
  std::vector<double> extend_gradient(const Vec& g) const override { return extend(g); }

 protected:
  std::vector<Difference> differences(double c) const override {
    const auto& r = grid_->nodes;
    const double k = ambient_.n - c;
    std::vector<Difference> out;
    for (int i = 0; i < grid_->cells(); ++i) {
      const double h = r[i + 1] - r[i];
      out.push_back({dof(i), dof(i + 1), ambient_.omega_n * power_integral(r[i], r[i + 1], k) / (h * h)});
    }
    return out;
  }

 private:
  int dof(int i) const { return i < grid_->cells() ? i : -1; }
  std::shared_ptr<const RadialGrid> grid_;
};

class PolarDiscretization final : public Discretization {
 public:
  PolarDiscretization(std::shared_ptr<const PolarGrid> grid, const AmbientSpec& ambient)
      : Discretization(ambient, 1 + static_cast<std::size_t>(grid->rho_cells() - 1) * grid->theta.size(),
                       grid->node_count()),
        grid_(std::move(grid)) {
    const double cm = ambient_.polar_measure();
    const int mr = grid_->rho_cells(), mt = grid_->theta_cells();
    for (int i = 0; i < mr; ++i) {
      for (int j = 0; j < mt; ++j) {
        const double r0 = grid_->rho[i], r1 = grid_->rho[i + 1];
        const double t0 = grid_->theta[j], t1 = grid_->theta[j + 1];
        const double area = 0.5 * (r1 - r0) * (t1 - t0);
        // a = (i,j), b = (i+1,j), c = (i+1,j+1), d = (i,j+1); triangles (a,b,c) and (a,c,d)
        const double pr[4] = {r0, r1, r1, r0};
        const double pt[4] = {t0, t0, t1, t1};
        const int pd[4] = {dof(i, j), dof(i + 1, j), dof(i + 1, j + 1), dof(i, j + 1)};
        const int tris[2][3] = {{0, 1, 2}, {0, 2, 3}};
        for (const auto& tri : tris) {
          const int idx[3] = {pd[tri[0]], pd[tri[1]], pd[tri[2]]};
          for (const auto& p : triangle_rule()) {
            const double rho = p.l0 * pr[tri[0]] + p.l1 * pr[tri[1]] + p.l2 * pr[tri[2]];
            const double th = p.l0 * pt[tri[0]] + p.l1 * pt[tri[1]] + p.l2 * pt[tri[2]];
            const double shape[3] = {p.l0, p.l1, p.l2};
            add_point(idx, shape, rho,
                      cm * area * p.w * std::pow(rho, ambient_.n - 1) * ambient_.angular_weight(th));
          }
        }
      }
    }
  }

  bool is_polar() const override { return true; }
  std::shared_ptr<const PolarGrid> polar_grid() const override { return grid_; }

  Vec restrict(const std::vector<double>& nodal) const override {
    const std::size_t nt = grid_->theta.size();
    Vec u(static_cast<Eigen::Index>(dofs_));
    double center = 0.0;
    for (std::size_t j = 0; j < nt; ++j) center += nodal[j];
    u[0] = center / static_cast<double>(nt);
    for (std::size_t k = 1; k < dofs_; ++k) u[static_cast<Eigen::Index>(k)] = nodal[nt + k - 1];
    return u;
  }
  std::vector<double> extend(const Vec& u) const override {
    const std::size_t nt = grid_->theta.size();
    std::vector<double> out(nodes_, 0.0);
    for (std::size_t j = 0; j < nt; ++j) out[j] = u[0];
    for (std::size_t k = 1; k < dofs_; ++k) out[nt + k - 1] = u[static_cast<Eigen::Index>(k)];
    return out;
  }
  std::vector<double> extend_gradient(const Vec& g) const override {
    auto out = extend(g);
    const std::size_t nt = grid_->theta.size();
    for (std::size_t j = 0; j < nt; ++j) out[j] = g[0] / static_cast<double>(nt);
    return out;
  }

 protected:
  std::vector<Difference> differences(double c) const override {
    const double cm = ambient_.polar_measure();
    const double kr = ambient_.n - c;        // rho^{n-1-c}
    const double kt = ambient_.n - 2.0 - c;  // rho^{n-3-c}
    const int mr = grid_->rho_cells(), mt = grid_->theta_cells();
    std::vector<Difference> out;
    out.reserve(static_cast<std::size_t>(4 * mr * mt));
    for (int i = 0; i < mr; ++i) {
      const double r0 = grid_->rho[i], r1 = grid_->rho[i + 1], dr = r1 - r0;
      for (int j = 0; j < mt; ++j) {
        const double t0 = grid_->theta[j], t1 = grid_->theta[j + 1], dt = t1 - t0;
        // theta integrals of H(theta) times the closed-form rho integral on either side of the diagonal;
        // the innermost ring uses s^4 substitution against the rho_L^k endpoint singularity.
        double upper_r = 0, lower_r = 0, upper_t = 0, lower_t = 0;
        const auto& g = gauss16();
        for (std::size_t q = 0; q < g.x.size(); ++q) {
          double s = g.x[q], jac = 1.0;
          if (i == 0) {
            jac = 4.0 * s * s * s;
            s = s * s * s * s;
          }
          const double th = t0 + s * dt;
          const double rl = r0 + s * dr;
          const double wq = g.w[q] * jac * dt * ambient_.angular_weight(th);
          upper_r += wq * power_integral(rl, r1, kr);
          lower_r += wq * power_integral(r0, rl, kr);
          upper_t += wq * power_integral(rl, r1, kt);
          lower_t += wq * power_integral(r0, rl, kt);
        }
        const int a = dof(i, j), b = dof(i + 1, j), cc = dof(i + 1, j + 1), d = dof(i, j + 1);
        // (a,b,c): v_rho = (b - a)/dr, v_theta = (c - b)/dt
        out.push_back({b, a, cm * upper_r / (dr * dr)});
        out.push_back({cc, b, cm * upper_t / (dt * dt)});
        // (a,c,d): v_rho = (c - d)/dr, v_theta = (d - a)/dt
        out.push_back({cc, d, cm * lower_r / (dr * dr)});
        if (a != d) out.push_back({d, a, cm * lower_t / (dt * dt)});
      }
    }
    return out;
  }

 private:
  int dof(int i, int j) const {
    if (i == 0) return 0;
    if (i == grid_->rho_cells()) return -1;
    return 1 + (i - 1) * static_cast<int>(grid_->theta.size()) + j;
  }
  std::shared_ptr<const PolarGrid> grid_;
};

}  // namespace

Functional Functional::weighted_gamma(double alpha, int n) {
  return {ScalingParams::make(alpha, n).gamma, 0.0};
}

void Discretization::add_point(const int idx[3], const double shape[3], double radius, double base) {
  for (int k = 0; k < 3; ++k) {
    idx_.push_back(idx[k] < 0 ? static_cast<int>(dofs_) : idx[k]);
    shape_.push_back(shape[k]);
  }
  radius_.push_back(radius);
  base_.push_back(base);
}

Discretization::StiffnessEntry& Discretization::entry(double c) const {
  check_grad_weight(c, ambient_.n);
  std::lock_guard lock(mutex_);
  auto it = stiffness_.find(c);
  if (it != stiffness_.end()) return it->second;
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& d : differences(c)) {
    if (d.a >= 0) trips.emplace_back(d.a, d.a, d.coef);
    if (d.b >= 0) trips.emplace_back(d.b, d.b, d.coef);
    if (d.a >= 0 && d.b >= 0) {
      trips.emplace_back(d.a, d.b, -d.coef);
      trips.emplace_back(d.b, d.a, -d.coef);
    }
  }
  StiffnessEntry e;
  const auto n = static_cast<Eigen::Index>(dofs_);
  e.k.resize(n, n);
  e.k.setFromTriplets(trips.begin(), trips.end());
  e.k.makeCompressed();
  e.ldlt = std::make_unique<Eigen::SimplicialLDLT<Matrix>>(e.k);
  if (e.ldlt->info() != Eigen::Success) throw NumericalError("stiffness factorization failed");
  return stiffness_.emplace(c, std::move(e)).first->second;
}

const Discretization::Matrix& Discretization::stiffness(double c) const { return entry(c).k; }

double Discretization::dirichlet(const Vec& u, double c) const { return u.dot(stiffness(c) * u); }

void Discretization::solve(const Vec& rhs, double c, Vec& out) const { out = entry(c).ldlt->solve(rhs); }

const std::vector<double>& Discretization::weights(double w) const {
  if (!(w > -ambient_.n)) throw ConfigError("density weight |x|^w needs w > -n");
  std::lock_guard lock(mutex_);
  auto it = weights_.find(w);
  if (it != weights_.end()) return it->second;
  std::vector<double> out(base_.size());
  for (std::size_t q = 0; q < base_.size(); ++q) out[q] = w == 0.0 ? base_[q] : base_[q] * std::pow(radius_[q], w);
  return weights_.emplace(w, std::move(out)).first->second;
}

void Discretization::interpolate(const Vec& u, std::vector<double>& uq) const {
  const std::size_t np = points();
  uq.resize(np);
  const double* src = u.data();
  for (std::size_t q = 0; q < np; ++q) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int i = idx_[3 * q + k];
      if (i < static_cast<int>(dofs_)) v += shape_[3 * q + k] * src[i];
    }
    uq[q] = v;
  }
}

void Discretization::scatter(const std::vector<double>& vals, Vec& out) const {
  out.setZero(static_cast<Eigen::Index>(dofs_));
  double* dst = out.data();
  for (std::size_t q = 0; q < vals.size(); ++q) {
    for (int k = 0; k < 3; ++k) {
      const int i = idx_[3 * q + k];
      if (i < static_cast<int>(dofs_)) dst[i] += shape_[3 * q + k] * vals[q];
    }
  }
}

double Discretization::integrate(const Vec& u, double w, const std::function<double(double)>& h) const {
  const auto& wq = weights(w);
  std::vector<double> uq;
  interpolate(u, uq);
  double s = 0.0;
  for (std::size_t q = 0; q < uq.size(); ++q) s += wq[q] * h(uq[q]);
  return s;
}

std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const RadialGrid> grid,
                                                          const AmbientSpec& ambient) {
  return std::make_shared<RadialDiscretization>(std::move(grid), ambient);
}

std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const PolarGrid> grid,
                                                          const AmbientSpec& ambient) {
  return std::make_shared<PolarDiscretization>(std::move(grid), ambient);
}

Problem::Problem(std::shared_ptr<const Discretization> disc, Functional functional, Nonlinearity nl)
    : disc_(std::move(disc)), functional_(functional), nl_(std::move(nl)) {
  check_grad_weight(functional_.grad_weight, disc_->ambient().n);
  weights_ = &disc_->weights(functional_.density_weight);
}

void Problem::state(const Vec& u, PointState& s) const {
  disc_->interpolate(u, s.uq);
  s.dirichlet = disc_->dirichlet(u, functional_.grad_weight);
}

PointState Problem::state(const Vec& u) const {
  PointState s;
  state(u, s);
  return s;
}

double Problem::density_F(const PointState& s, double t) const {
  const auto& w = *weights_;
  double acc = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * nl_.F(t * s.uq[q]);
  return acc;
}

double Problem::density_fu(const PointState& s, double t) const {
  const auto& w = *weights_;
  double acc = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double v = t * s.uq[q];
    acc += w[q] * nl_.f(v) * v;
  }
  return acc;
}

void Problem::picard(const PointState& s, Vec& out) const {
  const auto& w = *weights_;
  std::vector<double> vals(w.size());
  for (std::size_t q = 0; q < w.size(); ++q) vals[q] = w[q] * nl_.f(s.uq[q]);
  Vec rhs;
  disc_->scatter(vals, rhs);
  disc_->solve(rhs, functional_.grad_weight, out);
}

void Problem::gradient(const Vec& u, const PointState& s, Vec& out) const {
  const auto& w = *weights_;
  std::vector<double> vals(w.size());
  for (std::size_t q = 0; q < w.size(); ++q) vals[q] = w[q] * nl_.f(s.uq[q]);
  Vec load;
  disc_->scatter(vals, load);
  out = disc_->stiffness(functional_.grad_weight) * u - load;
}

namespace {

template <class Field>
Problem problem_for(const Field& u, double alpha, const Nonlinearity& nl, double c) {
  return Problem(make_discretization(u.grid, u.ambient), Functional::pairing(alpha, c), nl);
}

}  // namespace

double weighted_dirichlet(const RadialField& u, double c) {
  auto d = make_discretization(u.grid, u.ambient);
  return d->dirichlet(d->restrict(u.values), c);
}

double weighted_dirichlet(const PolarField& v, double c) {
  auto d = make_discretization(v.grid, v.ambient);
  return d->dirichlet(d->restrict(v.values), c);
}

double weighted_density_integral(const RadialField& u, double w, const std::function<double(double)>& h) {
  auto d = make_discretization(u.grid, u.ambient);
  return d->integrate(d->restrict(u.values), w, h);
}

double weighted_density_integral(const PolarField& v, double w, const std::function<double(double)>& h) {
  auto d = make_discretization(v.grid, v.ambient);
  return d->integrate(d->restrict(v.values), w, h);
}

double energy(const RadialField& u, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(u, alpha, nl, c);
  return p.energy(p.state(p.disc().restrict(u.values)));
}

double energy(const PolarField& v, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(v, alpha, nl, c);
  return p.energy(p.state(p.disc().restrict(v.values)));
}

RadialField energy_gradient(const RadialField& u, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(u, alpha, nl, c);
  const Vec x = p.disc().restrict(u.values);
  Vec g;
  p.gradient(x, p.state(x), g);
  return RadialField{u.grid, u.ambient, p.disc().extend_gradient(g)};
}

PolarField energy_gradient(const PolarField& v, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(v, alpha, nl, c);
  const Vec x = p.disc().restrict(v.values);
  Vec g;
  p.gradient(x, p.state(x), g);
  return PolarField{v.grid, v.ambient, p.disc().extend_gradient(g)};
}

}  // namespace henon
