#include "henon/nehari.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "henon/error.hpp"
#include "henon/log.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace {

constexpr double kTMin = 1e-8;
constexpr double kTMax = 1e8;

// Projects the state in place: uq and the Dirichlet term are rescaled by t_star.
NehariProjection project_state(const Problem& problem, PointState& s) {
  NehariProjection out;
  out.dirichlet = s.dirichlet;
  const bool positive = std::any_of(s.uq.begin(), s.uq.end(), [](double v) { return v > 0.0; });
  if (!positive || !(s.dirichlet > 0.0)) {
    throw NoSignChange("fibering map has no sign change: field has no positive part");
  }
  // psi(t) / t^2, same sign as psi on t > 0
  auto phi = [&](double t) {
    ++out.evaluations;
    return s.dirichlet - problem.density_fu(s, t) / (t * t);
  };

  double lo = 1.0, hi = 1.0, flo = 0.0, fhi = 0.0;
  const double f1 = phi(1.0);
  double factor = 1.05;
  if (f1 == 0.0) {
    lo = hi = 1.0;
  } else if (f1 > 0.0) {
    lo = 1.0;
    flo = f1;
    for (;;) {
      hi = lo * factor;
      if (hi > kTMax) throw NoSignChange("fibering map stays positive up to t = 1e8");
      fhi = phi(hi);
      if (fhi <= 0.0) break;
      lo = hi;
      flo = fhi;
      factor *= factor;
    }
  } else {
    hi = 1.0;
    fhi = f1;
    for (;;) {
      lo = hi / factor;
      if (lo < kTMin) throw NoSignChange("fibering map stays negative down to t = 1e-8");
      flo = phi(lo);
      if (flo > 0.0) break;
      hi = lo;
      fhi = flo;
      factor *= factor;
    }
  }

  double t = 1.0;
  if (lo != hi) {
    out.sign_changes.emplace_back(lo, hi);
    if (fhi == 0.0) {
      t = hi;
    } else {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(phi, lo, hi, flo, fhi,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
      t = 0.5 * (r.first + r.second);
    }
  }
  out.t_star = t;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  for (auto& v : s.uq) v *= t;
  s.dirichlet *= t * t;
  out.residual = s.dirichlet - problem.density_fu(s);
  return out;
}

template <class Field>
Problem problem_for(const Field& u, double alpha, const Nonlinearity& nl, double c) {
  return Problem(make_discretization(u.grid, u.ambient), Functional::pairing(alpha, c), nl);
}

template <class Field>
NehariResidual residual_of(const Field& u, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(u, alpha, nl, c);
  const Vec x = p.disc().restrict(u.values);
  NehariResidual r;
  r.trivial = x.lpNorm<Eigen::Infinity>() == 0.0;
  r.value = p.residual(p.state(x));
  return r;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Start {
  std::string label;
  Vec u;
};

std::vector<Start> deterministic_starts(const Discretization& disc, LevelKind kind, double alpha) {
  std::vector<Start> out;
  std::vector<double> kappas{2.0};
  if (kind != LevelKind::weighted_a && alpha / 2.0 + 1.0 != 2.0) kappas.push_back(alpha / 2.0 + 1.0);
  if (auto g = disc.radial_grid()) {
    for (double k : kappas) {
      std::vector<double> nodal;
      for (double r : g->nodes) nodal.push_back(1.0 - std::pow(r, k));
      std::ostringstream label;
      label << "profile:kappa=" << k;
      out.push_back({label.str(), disc.restrict(nodal)});
    }
    return out;
  }
  auto g = disc.polar_grid();
  const double pi = std::numbers::pi;
  for (double r0 : {0.5, 0.75}) {
    for (double t0 : {pi / 8, pi / 4, 3 * pi / 8}) {
      std::vector<double> nodal(g->node_count(), 0.0);
      for (std::size_t i = 0; i < g->rho.size(); ++i) {
        for (std::size_t j = 0; j < g->theta.size(); ++j) {
          const double dr = (g->rho[i] - r0) / 0.25, dt = (g->theta[j] - t0) / (pi / 8);
          const double d = std::sqrt(dr * dr + dt * dt);
          if (d < 1.0) nodal[g->index(i, j)] = std::pow(std::cos(0.5 * pi * d), 2);
        }
      }
      std::ostringstream label;
      label << "bump:rho=" << r0 << ",theta=" << t0;
      out.push_back({label.str(), disc.restrict(nodal)});
    }
  }
  return out;
}

// Smooth multiplicative perturbation 1 + 0.25 sum_k a_k sin(k pi rho) [cos(2 m theta)] / k of a base start.
Start random_start(const Discretization& disc, const Start& base, std::uint64_t seed, int index) {
  std::mt19937_64 rng(seed);
  double a[4], b[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = 2.0 * uniform01(rng) - 1.0;
    b[k] = 2.0 * uniform01(rng) - 1.0;
  }
  std::vector<double> nodal = disc.extend(base.u);
  auto factor = [&](double rho, double theta) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      s += (a[k] * std::sin((k + 1) * std::numbers::pi * rho) + b[k] * std::cos(2.0 * (k + 1) * theta) * rho) /
           (k + 1);
    }
    return 1.0 + 0.25 * s;
  };
  if (auto g = disc.radial_grid()) {
    for (std::size_t i = 0; i < nodal.size(); ++i) nodal[i] = std::max(0.0, nodal[i] * factor(g->nodes[i], 0.0));
  } else {
    auto pg = disc.polar_grid();
    for (std::size_t i = 0; i < pg->rho.size(); ++i) {
      for (std::size_t j = 0; j < pg->theta.size(); ++j) {
        auto& v = nodal[pg->index(i, j)];
        v = std::max(0.0, v * factor(pg->rho[i], pg->theta[j]));
      }
    }
  }
  std::ostringstream label;
  label << "random:" << index << ":" << base.label;
  return {label.str(), disc.restrict(nodal)};
}

}  // namespace

nlohmann::json NehariProjection::to_json() const {
  nlohmann::json sc = nlohmann::json::array();
  for (const auto& [a, b] : sign_changes) sc.push_back({a, b});
  return {{"t_star", t_star},       {"residual", residual},     {"dirichlet", dirichlet},
          {"bracket", {bracket_lo, bracket_hi}}, {"evaluations", evaluations}, {"sign_changes", sc}};
}

NehariProjection project(const Problem& problem, const Vec& u) {
  PointState s = problem.state(u);
  return project_state(problem, s);
}

NehariResidual nehari_residual(const RadialField& u, double alpha, const Nonlinearity& nl, double c) {
  return residual_of(u, alpha, nl, c);
}
NehariResidual nehari_residual(const PolarField& v, double alpha, const Nonlinearity& nl, double c) {
  return residual_of(v, alpha, nl, c);
}

NehariProjection project(const RadialField& u, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(u, alpha, nl, c);
  return project(p, p.disc().restrict(u.values));
}
NehariProjection project(const PolarField& v, double alpha, const Nonlinearity& nl, double c) {
  auto p = problem_for(v, alpha, nl, c);
  return project(p, p.disc().restrict(v.values));
}

void DescentConfig::validate() const {
  if (max_iterations <= 0) throw ConfigError("descent.max_iterations must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("descent.armijo must lie in (0, 1)");
  if (!(initial_step > 0.0) || !(max_step >= initial_step) || !(min_step > 0.0) || min_step > initial_step) {
    throw ConfigError("descent step bounds must satisfy 0 < min_step <= initial_step <= max_step");
  }
  if (!(energy_tol > 0.0) || !(residual_tol > 0.0) || !(gradient_tol > 0.0)) {
    throw ConfigError("descent tolerances must be positive");
  }
  if (energy_window <= 0) throw ConfigError("descent.energy_window must be positive");
  if (random_starts < 0) throw ConfigError("descent.random_starts must be >= 0");
  if (jobs <= 0) throw ConfigError("jobs must be positive");
}

nlohmann::json DescentConfig::to_json() const {
  return {{"max_iterations", max_iterations}, {"armijo", armijo},           {"initial_step", initial_step},
          {"max_step", max_step},             {"min_step", min_step},       {"energy_tol", energy_tol},
          {"energy_window", energy_window},   {"residual_tol", residual_tol}, {"gradient_tol", gradient_tol},
          {"interpolate", interpolate},       {"conjugate", conjugate},     {"random_starts", random_starts},
          {"seed", seed}};
}

nlohmann::json GridConfig::to_json() const {
  return {{"radial_cells", radial_cells}, {"rho_cells", rho_cells}, {"theta_cells", theta_cells},
          {"grading", grading},           {"toward", to_string(toward)}};
}

const char* to_string(LevelKind kind) {
  switch (kind) {
    case LevelKind::radial:
      return "radial";
    case LevelKind::sector:
      return "sector";
    case LevelKind::weighted_a:
      return "weighted_a";
    case LevelKind::weighted_gamma:
      return "weighted_gamma";
  }
  return "?";
}

nlohmann::json CriticalLevelRecord::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : starts) {
    st.push_back({{"index", s.index},
                  {"label", s.label},
                  {"level", s.degenerate ? nlohmann::json(nullptr) : nlohmann::json(s.level)},
                  {"iterations", s.iterations},
                  {"converged", s.converged},
                  {"degenerate", s.degenerate}});
  }
  nlohmann::json j{{"alpha", alpha},
                   {"subspace", to_string(kind)},
                   {"grad_weight", grad_weight},
                   {"density_weight", density_weight},
                   {"level", level},
                   {"dirichlet", dirichlet},
                   {"residual", residual},
                   {"gradient_norm", gradient_norm},
                   {"iterations", iterations},
                   {"winner", winner},
                   {"converged", converged},
                   {"stop_reason", stop_reason},
                   {"starts", st}};
  if (!snapshot_path.empty()) j["snapshot"] = snapshot_path;
  return j;
}

DescentResult descend(const Problem& problem, Vec u0, const DescentConfig& cfg) {
  const auto& disc = problem.disc();
  const double c = problem.functional().grad_weight;
  const auto& K = disc.stiffness(c);

  DescentResult out;
  Vec u = u0.cwiseMax(0.0);
  PointState s = problem.state(u);
  u *= project_state(problem, s).t_star;
  double e = problem.energy(s);

  double step = cfg.initial_step;
  int quiet = 0;
  Vec z, r, r_prev, g, g_prev, dir, v, v_alt;
  PointState sv, s_alt;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    problem.picard(s, z);
    r = u - z;  // K^{-1} grad I
    g = K * r;
    const double gk2 = std::max(0.0, g.dot(r));
    out.gradient_norm = std::sqrt(gk2 / s.dirichlet);
    out.iterations = it;
    if (out.gradient_norm < cfg.gradient_tol) {
      out.converged = true;
      out.stop_reason = "gradient";
      break;
    }
    // Polak-Ribiere+ in the K inner product; restart on loss of descent
    double beta = 0.0;
    if (cfg.conjugate && it > 0 && r_prev.size() == r.size()) {
      beta = std::max(0.0, g.dot(r - r_prev) / g_prev.dot(r_prev));
    }
    if (beta > 0.0) {
      dir = beta * dir - r;
    } else {
      dir = -r;
    }
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      dir = -r;
      slope = -gk2;
    }
    // Trial at the doubled previous step, refined once by the minimizer of the quadratic
    // through (0, e, slope) and the trial; then Armijo backtracking by halving.
    auto trial = [&](double st, Vec& out_v, PointState& out_s, double& out_e) {
      out_v = (u + st * dir).cwiseMax(0.0);
      if (out_v.lpNorm<Eigen::Infinity>() == 0.0) return false;
      problem.state(out_v, out_s);
      double t = 0.0;
      try {
        t = project_state(problem, out_s).t_star;
      } catch (const NoSignChange&) {
        return false;
      }
      out_v *= t;
      out_e = problem.energy(out_s);
      return std::isfinite(out_e);
    };
    auto armijo_ok = [&](double st, double en) { return en <= e + cfg.armijo * st * slope; };

    bool accepted = false;
    double e_new = e;
    if (trial(step, v, sv, e_new)) {
      const double curv = e_new - e - slope * step;
      if (cfg.interpolate && curv > 0.0) {
        const double s_star = std::clamp(-slope * step * step / (2.0 * curv), 0.1 * step, 4.0 * step);
        double e_alt = 0.0;
        if (std::abs(s_star - step) > 1e-3 * step && trial(s_star, v_alt, s_alt, e_alt) && e_alt < e_new &&
            armijo_ok(s_star, e_alt)) {
          v.swap(v_alt);
          std::swap(sv, s_alt);
          e_new = e_alt;
          step = s_star;
          accepted = true;
        }
      }
      if (!accepted && armijo_ok(step, e_new)) accepted = true;
    }
    while (!accepted && step >= cfg.min_step) {
      step *= 0.5;
      if (trial(step, v, sv, e_new) && armijo_ok(step, e_new)) accepted = true;
    }
    if (!accepted) {
      out.converged = out.gradient_norm < std::sqrt(cfg.gradient_tol);
      out.stop_reason = "step_underflow";
      break;
    }
    const double rel = std::abs(e - e_new) / std::max(std::abs(e_new), std::numeric_limits<double>::min());
    quiet = rel < cfg.energy_tol ? quiet + 1 : 0;
    u.swap(v);
    std::swap(s, sv);
    r_prev.swap(r);
    g_prev.swap(g);
    e = e_new;
    step = std::min(2.0 * step, cfg.max_step);
    const double res = std::abs(problem.residual(s)) / s.dirichlet;
    if (quiet >= cfg.energy_window && res < cfg.residual_tol) {
      out.converged = true;
      out.stop_reason = "energy";
      out.iterations = it + 1;
      break;
    }
    if (it + 1 == cfg.max_iterations) {
      out.iterations = it + 1;
      out.stop_reason = "max_iterations";
    }
  }
  out.u = std::move(u);
  out.level = e;
  out.dirichlet = s.dirichlet;
  out.residual = problem.residual(s);
  return out;
}

CriticalLevelRecord minimize(const Problem& problem, LevelKind kind, double alpha, const DescentConfig& cfg) {
  cfg.validate();
  const auto& disc = problem.disc();
  auto starts = deterministic_starts(disc, kind, alpha);
  const std::size_t base = starts.size();
  for (int r = 0; r < cfg.random_starts; ++r) {
    const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(r));
    starts.push_back(random_start(disc, starts[static_cast<std::size_t>(r) % base], seed, r));
  }

  std::vector<std::optional<DescentResult>> results(starts.size());
  parallel_for(starts.size(), cfg.jobs, [&](std::size_t k) {
    try {
      results[k] = descend(problem, starts[k].u, cfg);
    } catch (const NoSignChange&) {
      results[k].reset();
    }
    if (log::enabled(log::Level::debug)) {
      std::ostringstream msg;
      msg << to_string(kind) << " alpha=" << alpha << " start " << k << " (" << starts[k].label << ")";
      if (results[k]) {
        msg << " level=" << results[k]->level << " it=" << results[k]->iterations << " "
            << results[k]->stop_reason;
      } else {
        msg << " degenerate";
      }
      log::debug(msg.str());
    }
  });

  CriticalLevelRecord rec;
  rec.alpha = alpha;
  rec.kind = kind;
  rec.grad_weight = problem.functional().grad_weight;
  rec.density_weight = problem.functional().density_weight;
  int best = -1;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    StartOutcome so;
    so.index = static_cast<int>(k);
    so.label = starts[k].label;
    if (results[k]) {
      so.level = results[k]->level;
      so.iterations = results[k]->iterations;
      so.converged = results[k]->converged;
      if (best < 0) {
        best = static_cast<int>(k);
      } else {
        const double lb = results[static_cast<std::size_t>(best)]->level;
        if (so.level < lb - 1e-10 * std::abs(lb)) best = static_cast<int>(k);
      }
    } else {
      so.degenerate = true;
    }
    rec.starts.push_back(so);
  }
  if (best < 0) throw AllStartsDegenerate(std::string("every start collapsed to zero for ") + to_string(kind));

  const auto& w = *results[static_cast<std::size_t>(best)];
  rec.winner = best;
  rec.level = w.level;
  rec.dirichlet = w.dirichlet;
  rec.residual = w.residual;
  rec.gradient_norm = w.gradient_norm;
  rec.iterations = w.iterations;
  rec.converged = w.converged;
  rec.stop_reason = w.stop_reason;
  if (auto g = disc.radial_grid()) {
    rec.radial = RadialField{g, disc.ambient(), disc.extend(w.u)};
  } else {
    rec.polar = PolarField{disc.polar_grid(), disc.ambient(), disc.extend(w.u)};
  }
  return rec;
}

std::shared_ptr<const RadialGrid> make_radial_grid(const GridConfig& g) {
  return std::make_shared<RadialGrid>(build_radial_grid(g.radial_cells, g.grading, g.toward));
}

std::shared_ptr<const PolarGrid> make_polar_grid(const GridConfig& g) {
  return std::make_shared<PolarGrid>(build_polar_grid(g.rho_cells, g.theta_cells, g.grading, g.toward));
}

CriticalLevelRecord minimize(Subspace subspace, double alpha, const Nonlinearity& nl, double c,
                             const AmbientSpec& ambient, const GridConfig& grid, const DescentConfig& cfg) {
  LevelKind kind = subspace == Subspace::radial ? LevelKind::radial : LevelKind::sector;
  if (c != 0.0) kind = c == ambient.a() ? LevelKind::weighted_a : LevelKind::weighted_gamma;
  auto disc = subspace == Subspace::radial ? make_discretization(make_radial_grid(grid), ambient)
                                           : make_discretization(make_polar_grid(grid), ambient);
  Problem problem(disc, Functional::pairing(alpha, c), nl);
  return minimize(problem, kind, alpha, cfg);
}

double level_identity_check(const CriticalLevelRecord& record, const Nonlinearity& nl) {
  std::shared_ptr<const Discretization> disc;
  std::vector<double> nodal;
  if (record.radial) {
    disc = make_discretization(record.radial->grid, record.radial->ambient);
    nodal = record.radial->values;
  } else if (record.polar) {
    disc = make_discretization(record.polar->grid, record.polar->ambient);
    nodal = record.polar->values;
  } else {
    throw ConfigError("record carries no minimizer");
  }
  Problem p(disc, Functional{record.grad_weight, record.density_weight}, nl);
  const Vec u = disc->restrict(nodal);
  if (u.lpNorm<Eigen::Infinity>() == 0.0) throw ConfigError("level identity undefined for the zero field");
  const PointState s = p.state(u);
  const double level = p.energy(s);
  const double identity = 0.5 * p.density_fu(s) - p.density_F(s);
  return std::abs(level - identity) / std::abs(level);
}

}  // namespace henon
