#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "henon/error.hpp"
#include "henon/nehari.hpp"
#include "henon/oracle.hpp"

using namespace henon;

namespace {

const AmbientSpec kAmb = AmbientSpec::make(4);
const auto kPow4 = Nonlinearity::make(Family::power, {4, 4, 4, 4}, 4, 2);

}  // namespace

TEST_CASE("dead zone gives a constant trajectory") {
  for (double s : {0.0, -0.5}) {
    const auto r = shoot(s, 8.0, kPow4, 4);
    CHECK(r.u1 == s);
    for (double x : r.u) CHECK(x == s);
  }
}

TEST_CASE("small heights undershoot") {
  const auto r = shoot(1e-3, 0.0, kPow4, 4);
  CHECK(r.u1 > 0);
  CHECK_FALSE(r.first_zero);
  CHECK(r.positive_before_end());
  CHECK(r.u.front() == 1e-3);
}

TEST_CASE("terminal value is stable under tolerance refinement") {
  const auto a = shoot(20.0, 8.0, kPow4, 4, 1e-9);
  const auto b = shoot(20.0, 8.0, kPow4, 4, 1e-11);
  const auto c = shoot(20.0, 8.0, kPow4, 4, 1e-12);
  CHECK(std::abs(b.u1 - c.u1) < std::abs(a.u1 - c.u1) + 1e-14);
  CHECK(std::abs(b.u1 - c.u1) < 1e-8 * 20);
}

TEST_CASE("first Dirichlet eigenvalue against Bessel zeros") {
  // lambda_1 of the n-ball is j_{n/2-1,1}^2
  const double j1 = boost::math::cyl_bessel_j_zero(1.0, 1);
  const double j0 = boost::math::cyl_bessel_j_zero(0.0, 1);
  CHECK(first_eigenvalue(4) == doctest::Approx(j1 * j1).epsilon(1e-8));
  CHECK(first_eigenvalue(2) == doctest::Approx(j0 * j0).epsilon(1e-8));
  CHECK(first_eigenvalue(4, 1e-10, 2.0) == doctest::Approx(j1 * j1 / 4).epsilon(1e-8));
  CHECK_THROWS_AS(first_eigenvalue(1), ConfigError);
}

TEST_CASE("eigenvalue split constant bounds f(t)t") {
  const double lambda = first_eigenvalue(4);
  const double c1 = eigenvalue_split_constant(kPow4, lambda, 4.0);
  // sup of 1 - lambda / (2 t^2) over the sampled range is reached at t_max
  const double tmax = SampleGrid{}.t_max;
  CHECK(c1 == doctest::Approx(1.0 - lambda / (2 * tmax * tmax)).epsilon(1e-12));
}

TEST_CASE("shooting ground state at alpha = 8") {
  auto grid = std::make_shared<RadialGrid>(build_radial_grid(2048, 2.0, GradingToward::boundary));
  const auto gs = shooting_ground_state(8.0, kPow4, kAmb, grid);
  CHECK(gs.zeros.size() == 1);
  CHECK(std::abs(gs.residual) <= 1e-4 * gs.dirichlet);
  const auto tr = shoot(gs.s, 8.0, kPow4, 4);
  CHECK(std::abs(tr.u1) < 1e-6 * gs.s);
  CHECK(tr.du.back() < 0);
  for (std::size_t k = 0; k + 1 < tr.u.size(); ++k) CHECK(tr.u[k] > 0);
  const auto j = gs.to_json();
  CHECK(j["provenance"] == kShootingProvenance);

  DescentConfig cfg;
  Problem p(make_discretization(grid, kAmb), Functional::henon(8.0), kPow4);
  const auto rec = minimize(p, LevelKind::radial, 8.0, cfg);
  CHECK(std::abs(rec.level / gs.energy - 1) < 0.01);
}

TEST_CASE("critical growth has no positive crossing") {
  // p = 4 is the critical exponent in R^4 at alpha = 0
  auto grid = std::make_shared<RadialGrid>(build_radial_grid(256, 2.0, GradingToward::boundary));
  CHECK_THROWS_AS(shooting_ground_state(0.0, kPow4, kAmb, grid), NoCrossing);
}
