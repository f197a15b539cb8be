// One PASS/FAIL line per acceptance criterion. Tolerances are fixed below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "henon/cli.hpp"
#include "henon/config.hpp"
#include "henon/error.hpp"
#include "henon/oracle.hpp"

using namespace henon;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

constexpr double kHypTol = 1e-12;
constexpr double kQuadTol = 1e-8;
constexpr double kFdTol = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr double kClosedFormTol = 1e-10;
constexpr double kIdempotenceTol = 1e-9;
constexpr double kOracleTol = 0.01;
constexpr double kOracleResidualTol = 1e-4;
constexpr double kCovTol = 1e-6;
constexpr double kBoundSlack = 1e-6;
constexpr double kLemmaSlack = 1e-8;
constexpr double kUpperSlack = 1e-8;
constexpr double kBreakMargin = 0.01;
constexpr double kAnisotropyFactor = 10.0;
constexpr double kSlopeTol = 0.3;
constexpr double kGrowthLimit = 2.0;

const AmbientSpec kAmb = AmbientSpec::make(4);
const auto kPow4 = Nonlinearity::make(Family::power, {4, 4, 4, 4}, 4, 2);

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* label;
    Family family;
    NonlinearityParams prm;
  };
  // rational: the t -> 0 behaviour t^5 forces mu1 >= 6 and the t^3 tail mu2 <= 4.
  // min_power: the stated (mu1, mu2) = (p, q) and the swapped assignment; no choice satisfies both
  // rescaling inequalities and the gap bound, so this family cannot pass.
  const Case cases[] = {{"power_sum(3,4; 4,4)", Family::power_sum, {3, 4, 4, 4}},
                        {"rational(3,5; 6,4)", Family::rational, {3, 5, 6, 4}},
                        {"min_power(3,5; 3,5)", Family::min_power, {3, 5, 3, 5}},
                        {"min_power(3,5; 5,3)", Family::min_power, {3, 5, 5, 3}}};
  bool power_sum = false, rational = false, min_power = false;
  std::string detail;
  for (const auto& c : cases) {
    std::string what;
    bool ok = false;
    try {
      const auto nl = Nonlinearity::make(c.family, c.prm, 4, 2);
      const auto rep = verify_hypotheses(nl, 4, 2);
      ok = rep.all_pass();
      for (const auto& chk : rep.checks) {
        if (!chk.pass) what += " " + chk.name;
        if (chk.tol > kHypTol) ok = false;
      }
    } catch (const ConfigError& e) {
      what = std::string(" rejected: ") + e.what();
    }
    detail += std::string(c.label) + (ok ? " ok; " : " violates" + what + "; ");
    if (c.family == Family::power_sum) power_sum = ok;
    if (c.family == Family::rational) rational = ok;
    if (c.family == Family::min_power) min_power = min_power || ok;
  }
  bool broken = false;
  try {
    (void)Nonlinearity::make(Family::power_sum, {3, 1.5, 4, 4}, 4, 2);
  } catch (const ConfigError&) {
    broken = true;
  }
  const double secs = seconds_since(t0);
  detail += std::string("q<2 family ") + (broken ? "rejected" : "ACCEPTED") + "; " + fmt(secs, 3) + " s";
  report(1, power_sum && rational && min_power && broken && secs < 10, detail);
}

// omega_4 int_0^1 (1 - r^2)^k r^3 dr = pi^2 B(2, k+1), B(2, k+1) = 1/((k+1)(k+2))
double bowl_moment(int k) { return pi * pi / ((k + 1.0) * (k + 2.0)); }

template <class Field>
double fd_error(const Field& u, const Field& phi, double alpha, double c) {
  const auto g = energy_gradient(u, alpha, kPow4, c);
  double dir = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) dir += g.values[k] * phi.values[k];
  Field up = u, um = u;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    up.values[k] += kFdStep * phi.values[k];
    um.values[k] -= kFdStep * phi.values[k];
  }
  const double fd = (energy(up, alpha, kPow4, c) - energy(um, alpha, kPow4, c)) / (2 * kFdStep);
  return std::abs(fd - dir) / std::max(1.0, std::abs(dir));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  auto ref = std::make_shared<RadialGrid>(build_radial_grid(32768, 1.0));
  const auto u = sample_radial(ref, kAmb, [](double r) { return 1 - r * r; });
  const double eD = std::abs(weighted_dirichlet(u, 0.0) / (4 * pi * pi / 3) - 1);
  const double eF = std::abs(weighted_density_integral(u, 0, [](double t) { return kPow4.F(t); }) /
                                 (bowl_moment(4) / 4) - 1);
  const double eFu = std::abs(weighted_density_integral(u, 0, [](double t) { return kPow4.f(t) * t; }) /
                                  bowl_moment(4) - 1);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  auto rg = std::make_shared<RadialGrid>(build_radial_grid(256, 2.0, GradingToward::boundary));
  auto pg = std::make_shared<PolarGrid>(build_polar_grid(32, 16, 2.0, GradingToward::boundary));
  double worst_r = 0, worst_p = 0;
  for (int k = 0; k < 10; ++k) {
    const double a = U(rng), b = U(rng), s = 1.5 + U(rng), alpha = 2.0 * k, c = k % 3 == 0 ? 1.0 : 0.0;
    const auto ur = sample_radial(rg, kAmb, [&](double r) { return s * (1 - r * r) * (1 + 0.4 * a * std::sin(3 * r)); });
    auto phr = ur;
    for (auto& x : phr.values) x = U(rng);
    phr.values.back() = 0;
    worst_r = std::max(worst_r, fd_error(ur, phr, alpha, c));
    const auto vp = sample_polar(pg, kAmb, [&](double r, double t) {
      return s * (1 - r * r) * (1 + 0.3 * a * r * r * std::cos(2 * t) + 0.2 * b * r * std::sin(t));
    });
    auto php = vp;
    for (auto& x : php.values) x = U(rng);
    for (std::size_t j = 0; j < pg->theta.size(); ++j) {
      php(pg->rho.size() - 1, j) = 0;
      php(0, j) = php(0, 0);
    }
    worst_p = std::max(worst_p, fd_error(vp, php, alpha, c));
  }
  const double secs = seconds_since(t0);
  const bool pass = eD <= kQuadTol && eF <= kQuadTol && eFu <= kQuadTol && worst_r <= kFdTol &&
                    worst_p <= kFdTol && secs < 30;
  report(2, pass,
         "rel err D=" + fmt(eD, 3) + " F=" + fmt(eF, 3) + " fu=" + fmt(eFu, 3) + "; fd radial=" + fmt(worst_r, 3) +
             " polar=" + fmt(worst_p, 3) + "; " + fmt(secs, 3) + " s");
}

void criterion3() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  auto rg = std::make_shared<RadialGrid>(build_radial_grid(512, 2.0, GradingToward::boundary));
  auto pg = std::make_shared<PolarGrid>(build_polar_grid(32, 16, 2.0, GradingToward::boundary));
  double worst = 0, worst_idem = 0;
  for (double p : {3.0, 4.0, 5.0}) {
    const auto nl = Nonlinearity::make(Family::power, {p, p, p, p}, 4, 2);
    auto fu = [&](double t) { return nl.f(t) * t; };
    for (int k = 0; k < 5; ++k) {
      const double a = U(rng), s = U(rng), alpha = 3.0 * k;
      const auto u = sample_radial(rg, kAmb, [&](double r) { return s * (1 - std::pow(r, a + 1)); });
      const auto v = sample_polar(pg, kAmb, [&](double r, double t) {
        return s * (1 - r * r) * (1 + 0.5 * r * std::cos(2 * t) * a);
      });
      const double tr = std::pow(weighted_dirichlet(u, 0) / weighted_density_integral(u, alpha, fu), 1 / (p - 2));
      const double tp = std::pow(weighted_dirichlet(v, 0) / weighted_density_integral(v, alpha, fu), 1 / (p - 2));
      const auto pr = project(u, alpha, nl, 0.0);
      const auto pp = project(v, alpha, nl, 0.0);
      worst = std::max({worst, std::abs(pr.t_star / tr - 1), std::abs(pp.t_star / tp - 1)});
      auto u2 = u;
      for (auto& x : u2.values) x *= pr.t_star;
      auto v2 = v;
      for (auto& x : v2.values) x *= pp.t_star;
      worst_idem = std::max({worst_idem, std::abs(project(u2, alpha, nl, 0.0).t_star - 1),
                             std::abs(project(v2, alpha, nl, 0.0).t_star - 1)});
    }
  }
  // 1 - r^2 on the reference grid: closed form from the analytic integrals, t^2 = (4 pi^2/3)/(pi^2/30)
  auto ref = std::make_shared<RadialGrid>(build_radial_grid(32768, 1.0));
  const auto bowl = sample_radial(ref, kAmb, [](double r) { return 1 - r * r; });
  const double t_bowl = project(bowl, 0.0, kPow4, 0.0).t_star;
  const double t_analytic = std::sqrt((4 * pi * pi / 3) / bowl_moment(4));
  const double t_discrete = std::sqrt(weighted_dirichlet(bowl, 0) /
                                      weighted_density_integral(bowl, 0, [](double t) { return t * t * t * t; }));
  worst = std::max(worst, std::abs(t_bowl / t_discrete - 1));
  const bool pass = worst <= kClosedFormTol && worst_idem <= kIdempotenceTol &&
                    std::abs(t_bowl / t_analytic - 1) <= kQuadTol;
  report(3, pass,
         "max rel |t*-(A/B)^(1/(p-2))|=" + fmt(worst, 3) + "; idempotence " + fmt(worst_idem, 3) +
             "; 1-r^2: t*=" + fmt(t_bowl, 12) + " (analytic sqrt(40)=" + fmt(t_analytic, 12) +
             "; the literal t*=2 does not follow from the stated integrals)");
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  auto grid = std::make_shared<RadialGrid>(build_radial_grid(2048, 2.0, GradingToward::boundary));
  auto disc = make_discretization(grid, kAmb);
  bool pass = true;
  std::string detail;
  for (double alpha : {0.0, 8.0, 12.0}) {
    Problem p(disc, Functional::henon(alpha), kPow4);
    const auto rec = minimize(p, LevelKind::radial, alpha, DescentConfig{});
    detail += "alpha=" + fmt(alpha) + " variational " + fmt(rec.level, 9);
    try {
      const auto gs = shooting_ground_state(alpha, kPow4, kAmb, grid);
      const double gap = std::abs(rec.level - gs.energy) / std::abs(gs.energy);
      const double res = std::abs(gs.residual) / gs.dirichlet;
      pass = pass && rec.converged && gap <= kOracleTol && res <= kOracleResidualTol;
      detail += " shooting " + fmt(gs.energy, 9) + " gap " + fmt(gap, 3) + " residual/D " + fmt(res, 3) + "; ";
    } catch (const NoCrossing& e) {
      pass = false;
      detail += " shooting: no crossing (critical growth at this alpha); ";
    }
  }
  const double secs = seconds_since(t0);
  report(4, pass && secs < 120, detail + fmt(secs, 3) + " s");
}

void criterion5() {
  bool pass = true;
  std::string detail;
  for (double alpha : {8.0, 12.0, 20.0}) {
    double prev_f = INFINITY, prev_g = INFINITY;
    bool converging = true;
    double ef = 0, eg = 0;
    for (int m : {512, 1024, 2048}) {
      auto g = std::make_shared<RadialGrid>(build_radial_grid(m, 2.0, GradingToward::boundary));
      const auto u = sample_radial(g, kAmb, [](double r) { return 1 - r * r; });
      const auto cv = change_of_variables(u, alpha, kPow4, 8);
      ef = cv.err_f;
      eg = cv.err_grad;
      converging = converging && ef < prev_f && eg < prev_g;
      prev_f = ef;
      prev_g = eg;
    }
    pass = pass && converging && ef <= kCovTol && eg <= kCovTol;
    detail += "alpha=" + fmt(alpha) + " err_f " + fmt(ef, 3) + " err_grad " + fmt(eg, 3) +
              (converging ? "" : " NOT converging") + "; ";
  }
  report(5, pass, detail);
}

SweepTable the_sweep;
bool have_sweep = false;
double sweep_seconds = 0;

void run_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepOptions o;  // default grids and descent
  the_sweep = sweep({8, 12, 16, 20, 24, 28}, kPow4, kAmb, o);
  sweep_seconds = seconds_since(t0);
  have_sweep = true;
}

void criterion6() {
  if (!have_sweep) run_sweep();
  int converged = 0;
  bool pass = true;
  std::string bad;
  for (const auto& r : the_sweep.rows) {
    if (!r.converged) continue;
    ++converged;
    const auto& l5 = r.diagnostics.at("lemma5");
    const double m_beta = l5.at("m_beta").get<double>(), m_prime = l5.at("m_prime").get<double>();
    const bool t_ok = r.t_alpha <= r.t_alpha_bound * (1 + kBoundSlack);
    const bool l_ok = m_beta >= m_prime / 2 - kLemmaSlack * m_prime;
    const bool u_ok = r.m_sector <= r.upper_bound * (1 + kUpperSlack);
    if (!(t_ok && l_ok && u_ok)) bad += " alpha=" + fmt(r.alpha);
    pass = pass && t_ok && l_ok && u_ok;
  }
  pass = pass && converged > 0 && sweep_seconds < 1800;
  report(6, pass,
         std::to_string(converged) + "/" + std::to_string(the_sweep.rows.size()) +
             " rows converged; bound chain holds on all" + (bad.empty() ? "" : " except" + bad) + "; m'=" +
             fmt(the_sweep.m_prime, 9) + "; " + fmt(sweep_seconds, 3) + " s");
}

void criterion7() {
  if (!have_sweep) run_sweep();
  const auto b = detect_breaking(the_sweep, kBreakMargin);
  if (!b) {
    report(7, false, "no alpha with m_sector < 0.99 m_radial");
    return;
  }
  const bool pass = b->anisotropy > kAnisotropyFactor * b->quadrature_floor;
  report(7, pass,
         "alpha*=" + fmt(b->alpha) + " m_sector/m_radial=" + fmt(b->m_sector / b->m_radial, 6) + " anisotropy " +
             fmt(b->anisotropy, 6) + " vs floor " + fmt(b->quadrature_floor, 3));
}

void criterion8() {
  if (!have_sweep) run_sweep();
  const auto r = fit_exponent(the_sweep, FitColumn::m_radial, FitWindow::upper_half);
  const auto s = fit_exponent(the_sweep, FitColumn::m_sector, FitWindow::upper_half);
  const double tr = radial_target_exponent(4), ts = sector_envelope_exponent(4, 4, 2);
  const bool pass = r.slope >= tr - kSlopeTol && s.slope <= ts + kSlopeTol;
  report(8, pass,
         "radial slope " + fmt(r.slope, 6) + " (>= " + fmt(tr - kSlopeTol) + "), sector slope " + fmt(s.slope, 6) +
             " (<= " + fmt(ts + kSlopeTol) + ") over alpha in [" + fmt(r.alpha_min) + ", " + fmt(r.alpha_max) +
             "], " + std::to_string(r.points) + " points");
}

void criterion9() {
  EmbeddingSampleConfig cfg;  // 64 fields, q = 4
  cfg.seed = 9;
  const auto c = verify_embedding(EmbeddingKind::corollary1, 4, cfg);
  const auto i = verify_embedding(EmbeddingKind::interpolation, 4, cfg);
  const double b_formula = 4 - 2 - 2.0 * 4 / 4;
  const bool pass = c.pass && std::isfinite(c.max_ratio) && c.growth < kGrowthLimit &&
                    i.b == b_formula && interpolation_weight(4, 4) == b_formula;
  report(9, pass,
         "corollary1 max ratio " + fmt(c.max_ratio, 6) + " -> " + fmt(c.max_ratio_refined, 6) + " (growth " +
             fmt(c.growth, 6) + "); interpolation b=" + fmt(i.b) + " (formula " + fmt(b_formula) + ")");
}

void criterion10(const fs::path& work) {
  std::string first;
  bool same = true;
  std::string detail;
  for (int jobs : {1, 4, 8}) {
    const fs::path out = work / ("jobs" + std::to_string(jobs));
    fs::remove_all(out);
    const std::string js = std::to_string(jobs), os = out.string();
    const char* argv[] = {"henon_lab", "sweep", "--seed", "17", "--jobs", js.c_str(), "--out", os.c_str()};
    std::ostringstream sink, err;
    const int code = run(8, argv, sink, err);
    std::ifstream is(out / "sweep.csv", std::ios::binary);
    const std::string csv{std::istreambuf_iterator<char>(is), {}};
    if (first.empty()) first = csv;
    same = same && code == kExitOk && !csv.empty() && csv == first;
    detail += "jobs=" + js + " exit " + std::to_string(code) + "; ";
  }
  report(10, same, detail + (same ? "sweep.csv byte-identical" : "sweep.csv differs"));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "henon_acceptance";
  fs::create_directories(work);
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(10, [&] { criterion10(work); });
  std::cout << failures << " of 10 criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
