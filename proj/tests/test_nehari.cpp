#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "henon/error.hpp"
#include "henon/nehari.hpp"

using namespace henon;
using std::numbers::pi;

namespace {

const AmbientSpec kAmb = AmbientSpec::make(4);
const auto kPow4 = Nonlinearity::make(Family::power, {4, 4, 4, 4}, 4, 2);

std::shared_ptr<const RadialGrid> radial(int m) {
  return std::make_shared<RadialGrid>(build_radial_grid(m, 2.0, GradingToward::boundary));
}

}  // namespace

TEST_CASE("residual of 1 - r^2") {
  const auto u = sample_radial(std::make_shared<RadialGrid>(build_radial_grid(32768, 1.0)), kAmb,
                               [](double r) { return 1 - r * r; });
  const auto res = nehari_residual(u, 0.0, kPow4, 0.0);
  CHECK_FALSE(res.trivial);
  CHECK(res.value == doctest::Approx(4 * pi * pi / 3 - pi * pi / 30).epsilon(1e-8));
  // t^2 = (4 pi^2 / 3) / (pi^2 / 30) = 40
  const auto pr = project(u, 0.0, kPow4, 0.0);
  CHECK(std::abs(pr.t_star - std::sqrt(40.0)) < 1e-8);
}

TEST_CASE("closed-form projection for homogeneous f") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  const auto g = radial(256);
  for (double p : {3.0, 4.0, 5.0}) {
    const auto nl = Nonlinearity::make(Family::power, {p, p, p, p}, 4, 2);
    for (int k = 0; k < 4; ++k) {
      const double a = U(rng), s = U(rng), alpha = 4 * k;
      const auto u = sample_radial(g, kAmb, [&](double r) { return s * (1 - std::pow(r, a + 1)); });
      const double A = weighted_dirichlet(u, 0.0);
      const double B = weighted_density_integral(u, alpha, [&](double t) { return nl.f(t) * t; });
      const auto pr = project(u, alpha, nl, 0.0);
      CHECK(std::abs(pr.t_star / std::pow(A / B, 1 / (p - 2)) - 1) < 1e-10);
      // t u on the manifold; residual of a scaled field is t^2 A - t^p B
      auto tu = u;
      for (auto& x : tu.values) x *= 1.7;
      CHECK(nehari_residual(tu, alpha, nl, 0.0).value ==
            doctest::Approx(1.7 * 1.7 * A - std::pow(1.7, p) * B).epsilon(1e-12));
      for (auto& x : tu.values) x *= pr.t_star / 1.7;
      CHECK(std::abs(project(tu, alpha, nl, 0.0).t_star - 1) < 1e-9);
    }
  }
}

TEST_CASE("projection on the polar space and with weights") {
  const auto pg = std::make_shared<PolarGrid>(build_polar_grid(32, 16, 2.0, GradingToward::boundary));
  const auto v = sample_polar(pg, kAmb, [](double r, double t) { return (1 - r * r) * (1 + r * std::sin(2 * t)); });
  for (double c : {0.0, 1.0}) {
    const double alpha = c == 0.0 ? 10.0 : 0.0;
    const double A = weighted_dirichlet(v, c);
    const double B = weighted_density_integral(v, alpha, [](double t) { return t * t * t * t; });
    const auto pr = project(v, alpha, kPow4, c);
    CHECK(std::abs(pr.t_star / std::sqrt(A / B) - 1) < 1e-10);
    auto w = v;
    for (auto& x : w.values) x *= pr.t_star;
    CHECK(std::abs(project(w, alpha, kPow4, c).t_star - 1) < 1e-9);
  }
}

TEST_CASE("trivial and degenerate fields") {
  const auto z = sample_radial(radial(16), kAmb, [](double) { return 0.0; });
  const auto res = nehari_residual(z, 0.0, kPow4, 0.0);
  CHECK(res.trivial);
  CHECK(res.value == 0.0);
  CHECK_THROWS_AS(project(z, 0.0, kPow4, 0.0), NoSignChange);
  const auto neg = sample_radial(radial(16), kAmb, [](double r) { return r - 1; });
  CHECK_THROWS_AS(project(neg, 0.0, kPow4, 0.0), NoSignChange);
}

TEST_CASE("radial minimization") {
  GridConfig grid;
  grid.radial_cells = 512;
  DescentConfig cfg;
  const auto rec = minimize(Subspace::radial, 8.0, kPow4, 0.0, kAmb, grid, cfg);
  CHECK(rec.converged);
  CHECK(rec.kind == LevelKind::radial);
  CHECK(rec.level > 0);
  CHECK(rec.dirichlet > 1e-8);
  CHECK(rec.level >= (0.5 - 0.25) * rec.dirichlet * (1 - 1e-10));
  CHECK(std::abs(rec.residual) <= 1e-8 * rec.dirichlet);
  CHECK(level_identity_check(rec, kPow4) <= 1e-8);

  grid.radial_cells = 1024;
  const auto fine = minimize(Subspace::radial, 8.0, kPow4, 0.0, kAmb, grid, cfg);
  CHECK(std::abs(fine.level / rec.level - 1) < 0.005);

  auto off = rec;
  for (auto& x : off.radial->values) x *= 2;
  CHECK(level_identity_check(off, kPow4) > 1e-3);
  for (auto& x : off.radial->values) x = 0;
  CHECK_THROWS_AS(level_identity_check(off, kPow4), ConfigError);
}

TEST_CASE("weighted levels and determinism") {
  GridConfig grid;
  grid.radial_cells = 256;
  DescentConfig cfg;
  cfg.random_starts = 2;
  cfg.seed = 5;
  const auto a = minimize(Subspace::radial, 0.0, kPow4, kAmb.a(), kAmb, grid, cfg);
  CHECK(a.kind == LevelKind::weighted_a);
  CHECK(a.level > 0);
  cfg.jobs = 3;
  const auto b = minimize(Subspace::radial, 0.0, kPow4, kAmb.a(), kAmb, grid, cfg);
  CHECK(a.level == b.level);
  CHECK(a.radial->values == b.radial->values);
  const auto gm = minimize(Subspace::radial, 12.0, kPow4, 1.5, kAmb, grid, cfg);
  CHECK(gm.kind == LevelKind::weighted_gamma);
}

TEST_CASE("sector level sits below the radial level") {
  GridConfig grid;
  grid.radial_cells = 256;
  grid.rho_cells = 48;
  grid.theta_cells = 16;
  DescentConfig cfg;
  const auto r = minimize(Subspace::radial, 10.0, kPow4, 0.0, kAmb, grid, cfg);
  const auto s = minimize(Subspace::sector, 10.0, kPow4, 0.0, kAmb, grid, cfg);
  CHECK(s.kind == LevelKind::sector);
  CHECK(s.converged);
  CHECK(s.starts.size() == 6);
  CHECK(s.level <= r.level * (1 + 1e-8));
  CHECK(level_identity_check(s, kPow4) <= 1e-8);
}

TEST_CASE("descent config validation") {
  DescentConfig c;
  c.armijo = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.min_step = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.energy_tol = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  GridConfig grid;
  grid.radial_cells = 128;
  DescentConfig cfg;
  cfg.max_iterations = 1;
  const auto rec = minimize(Subspace::radial, 8.0, kPow4, 0.0, kAmb, grid, cfg);
  CHECK_FALSE(rec.converged);
  CHECK(rec.stop_reason == "max_iterations");
  CHECK(rec.level > 0);
}
