#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "henon/discretization.hpp"
#include "henon/error.hpp"

using namespace henon;
using std::numbers::pi;

namespace {

const AmbientSpec kAmb = AmbientSpec::make(4);
const auto kPow4 = Nonlinearity::make(Family::power, {4, 4, 4, 4}, 4, 2);

std::shared_ptr<const RadialGrid> radial(int m, double g = 1.0, GradingToward t = GradingToward::origin) {
  return std::make_shared<RadialGrid>(build_radial_grid(m, g, t));
}
std::shared_ptr<const PolarGrid> polar(int m, int k, double g = 1.0) {
  return std::make_shared<PolarGrid>(build_polar_grid(m, k, g, GradingToward::boundary));
}

RadialField bowl(std::shared_ptr<const RadialGrid> g) {
  return sample_radial(std::move(g), kAmb, [](double r) { return 1.0 - r * r; });
}

// omega_4 int_0^1 h(1 - r^2) r^3 dr for h(t) = t^k, via s = r^2
double beta_moment(int k, double c = 0.0) {
  return 2 * pi * pi * 0.5 * boost::math::beta(2.0 - c / 2, k + 1.0);
}

}  // namespace

TEST_CASE("grid examples") {
  const auto g1 = build_radial_grid(4, 1.0);
  const std::vector<double> u{0, 0.25, 0.5, 0.75, 1};
  CHECK(g1.nodes == u);
  const auto g2 = build_radial_grid(4, 2.0, GradingToward::origin);
  const std::vector<double> o{0, 0.0625, 0.25, 0.5625, 1};
  for (int i = 0; i <= 4; ++i) CHECK(g2.nodes[i] == doctest::Approx(o[i]).epsilon(1e-15));
  const auto g3 = build_radial_grid(4, 2.0, GradingToward::boundary);
  const std::vector<double> b{0, 0.4375, 0.75, 0.9375, 1};
  for (int i = 0; i <= 4; ++i) CHECK(g3.nodes[i] == doctest::Approx(b[i]).epsilon(1e-15));
  CHECK(build_polar_grid(8, 8, 1.0).node_count() == 81);
  CHECK_THROWS_AS(build_radial_grid(3, 1.0), ConfigError);
  CHECK_THROWS_AS(build_radial_grid(16, 0.5), ConfigError);
}

TEST_CASE("ambient and scaling") {
  CHECK(AmbientSpec::make(4).l == 2);
  CHECK(AmbientSpec::make(5).l == 3);
  CHECK(AmbientSpec::make(7).l == 4);
  CHECK(AmbientSpec::make(5, 2).l == 2);
  CHECK_THROWS_AS(AmbientSpec::make(3), ConfigError);
  CHECK_THROWS_AS(AmbientSpec::make(4, 4), ConfigError);
  for (int n : {4, 5, 6, 9}) {
    const double ref = n * std::pow(pi, n / 2.0) / boost::math::tgamma(n / 2.0 + 1);
    CHECK(AmbientSpec::make(n).omega_n == doctest::Approx(ref).epsilon(1e-14));
  }
  const auto s = ScalingParams::make(12, 4);
  CHECK(s.beta == 0.25);
  CHECK(s.gamma == 1.5);
  CHECK(s.epsilon() == s.beta);
  CHECK(ScalingParams::make(20, 4).gamma > ScalingParams::make(20, 4).a);
}

TEST_CASE("analytic integrals of 1 - r^2") {
  const auto u = bowl(radial(32768));
  const double d0 = 4 * pi * pi / 3, d1 = 8 * pi * pi / 5;
  CHECK(std::abs(weighted_dirichlet(u, 0.0) / d0 - 1) < 1e-8);
  CHECK(std::abs(weighted_dirichlet(u, 1.0) / d1 - 1) < 1e-8);
  const double F_ref = beta_moment(4) / 4, fu_ref = beta_moment(4);
  CHECK(F_ref == doctest::Approx(pi * pi / 120).epsilon(1e-14));
  CHECK(std::abs(weighted_density_integral(u, 0.0, [](double t) { return kPow4.F(t); }) / F_ref - 1) < 1e-8);
  CHECK(std::abs(weighted_density_integral(u, 0.0, [](double t) { return kPow4.f(t) * t; }) / fu_ref - 1) < 1e-8);
  CHECK(energy(u, 0.0, kPow4, 0.0) == doctest::Approx(6.49749).epsilon(1e-6));
}

TEST_CASE("zero field") {
  const auto z = sample_radial(radial(16), kAmb, [](double) { return 0.0; });
  CHECK(weighted_dirichlet(z, 0.0) == 0.0);
  CHECK(weighted_dirichlet(z, 1.0) == 0.0);
  CHECK(energy(z, 0.0, kPow4, 1.0) == 0.0);
  for (double g : energy_gradient(z, 3.0, kPow4, 0.0).values) CHECK(g == 0.0);
}

TEST_CASE("dirichlet converges at second order") {
  const double d0 = 4 * pi * pi / 3;
  double prev = 0;
  for (int m : {64, 128, 256, 512}) {
    const double e = std::abs(weighted_dirichlet(bowl(radial(m, 2.0, GradingToward::boundary)), 0.0) - d0);
    if (prev > 0) CHECK(std::log2(prev / e) > 1.9);
    prev = e;
  }
}

TEST_CASE("weight monotonicity and integrability guard") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 5; ++k) {
    const double a = U(rng), b = U(rng);
    const auto u = sample_radial(radial(64), kAmb, [&](double r) { return (1 - r) * (1 + a * r + b * r * r); });
    CHECK(weighted_dirichlet(u, 0.0) <= weighted_dirichlet(u, 1.0));
    CHECK(weighted_dirichlet(u, 1.0) <= weighted_dirichlet(u, 1.5));
    CHECK(weighted_density_integral(u, 8.0, [](double t) { return std::abs(t); }) >= 0.0);
  }
  CHECK_THROWS_AS(weighted_dirichlet(bowl(radial(16)), 2.0), ConfigError);
  CHECK_THROWS_AS(weighted_density_integral(bowl(radial(16)), -4.0, [](double t) { return t; }), ConfigError);
}

TEST_CASE("polar and radial energies agree on radial fields") {
  const auto g = radial(64, 2.0, GradingToward::boundary);
  const auto pg = polar(64, 16, 2.0);
  const auto u = sample_radial(g, kAmb, [](double r) { return std::cos(0.5 * pi * r); });
  const auto v = radial_to_polar(u, pg);
  for (double c : {0.0, 1.0}) {
    CHECK(weighted_dirichlet(v, c) == doctest::Approx(weighted_dirichlet(u, c)).epsilon(1e-12));
    CHECK(energy(v, 10.0, kPow4, c) == doctest::Approx(energy(u, 10.0, kPow4, c)).epsilon(1e-10));
  }
  CHECK(anisotropy(v) == 0.0);
}

TEST_CASE("polar dirichlet of a theta-dependent field") {
  // v = (1 - rho^2) rho^2 cos(2 theta): int_A (v_rho^2 + v_theta^2/rho^2) rho^3 H dtheta drho with H = sin cos
  // theta: int cos^2(2t) sin t cos t = 1/6, int sin^2(2t) sin t cos t = 1/3 on [0, pi/2]
  // rho: int (2 rho - 4 rho^3)^2 rho^3 = 4/15, int 4 (1 - rho^2)^2 rho^5 = 1/15
  const double ref = AmbientSpec::make(4).polar_measure() * (4.0 / 15 / 6 + 1.0 / 15 / 3);
  double prev = 0;
  for (int m : {32, 64, 128}) {
    const auto v = sample_polar(polar(m, m, 1.0), kAmb, [](double r, double t) {
      return (1 - r * r) * r * r * std::cos(2 * t);
    });
    const double e = std::abs(weighted_dirichlet(v, 0.0) / ref - 1);
    if (prev > 0) CHECK(std::log2(prev / e) > 1.8);
    prev = e;
  }
  CHECK(prev < 1e-3);
}

namespace {

template <class Field>
void fd_check(Field u, double alpha, double c, std::mt19937_64& rng) {
  const auto grad = energy_gradient(u, alpha, kPow4, c);
  std::uniform_real_distribution<double> U(-1, 1);
  Field phi = u;
  for (auto& x : phi.values) x = U(rng);
  if constexpr (std::is_same_v<Field, RadialField>) {
    phi.values.back() = 0.0;
  } else {
    const auto& g = *u.grid;
    for (std::size_t j = 0; j < g.theta.size(); ++j) {
      phi(g.rho.size() - 1, j) = 0.0;
      phi(0, j) = phi(0, 0);
    }
  }
  double dir = 0;
  for (std::size_t k = 0; k < phi.values.size(); ++k) dir += grad.values[k] * phi.values[k];
  const double h = 1e-5;
  Field up = u, um = u;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    up.values[k] += h * phi.values[k];
    um.values[k] -= h * phi.values[k];
  }
  const double fd = (energy(up, alpha, kPow4, c) - energy(um, alpha, kPow4, c)) / (2 * h);
  CHECK(std::abs(fd - dir) <= 1e-6 * std::max(1.0, std::abs(dir)));
}

}  // namespace

TEST_CASE("energy gradient matches finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto g = radial(128, 2.0, GradingToward::boundary);
  const auto pg = polar(24, 12, 2.0);
  for (int k = 0; k < 10; ++k) {
    const double a = U(rng), b = U(rng), s = 1.5 + U(rng);
    const auto u = sample_radial(g, kAmb, [&](double r) { return s * (1 - r * r) * (1 + 0.4 * a * std::sin(3 * r)); });
    fd_check(u, k % 2 ? 8.0 : 0.0, k % 3 == 0 ? 1.0 : 0.0, rng);
    const auto v = sample_polar(pg, kAmb, [&](double r, double t) {
      return s * (1 - r * r) * (1 + 0.3 * a * r * r * std::cos(2 * t) + 0.2 * b * r * std::sin(t));
    });
    fd_check(v, k % 2 ? 10.0 : 0.0, k % 3 == 0 ? 1.0 : 0.0, rng);
  }
}

TEST_CASE("homogeneity identity of the gradient") {
  const auto u = sample_radial(radial(256), kAmb, [](double r) { return 2 * (1 - r * r * r); });
  const auto grad = energy_gradient(u, 6.0, kPow4, 0.0);
  double pair = 0;
  for (std::size_t k = 0; k < u.values.size(); ++k) pair += grad.values[k] * u.values[k];
  const double rhs =
      weighted_dirichlet(u, 0.0) - 4 * weighted_density_integral(u, 6.0, [](double t) { return kPow4.F(t); });
  CHECK(pair == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("snapshot round trip") {
  const auto u = bowl(radial(32, 2.0, GradingToward::boundary));
  const auto back = radial_from_snapshot(nlohmann::json::parse(snapshot(u, "test").dump()));
  CHECK(back.values == u.values);
  CHECK(back.grid->nodes == u.grid->nodes);
  const auto v = sample_polar(polar(8, 4), kAmb, [](double r, double t) { return (1 - r) * (1 + std::cos(t)); });
  const auto j = snapshot(v);
  CHECK(j["space"] == "polar");
  const auto pb = polar_from_snapshot(j);
  CHECK(pb.values == v.values);
  CHECK_THROWS_AS(polar_from_snapshot(snapshot(u)), ConfigError);
}
