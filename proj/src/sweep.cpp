#include "henon/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "henon/error.hpp"
#include "henon/log.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string alpha_tag(double alpha) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << text;
    os.flush();
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Everything that influences a row's numbers, except the worker count.
nlohmann::json fingerprint(double alpha, const Nonlinearity& nl, const AmbientSpec& amb, const SweepOptions& o) {
  return {{"alpha", alpha},
          {"nonlinearity", nl.to_json()},
          {"n", amb.n},
          {"l", amb.l},
          {"grid", o.grid.to_json()},
          {"descent", o.descent.to_json()},
          {"test_function", {{"theta1", o.test_function.theta1},
                             {"theta2", o.test_function.theta2},
                             {"amplitude", o.test_function.amplitude}}},
          {"refine", o.refine}};
}

double f_scaling_margin(const Problem& p, const Vec& u, double mu1) {
  const PointState s = p.state(u);
  const double base = p.density_F(s);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 9; ++k) {
    const double t = 0.1 * k;
    const double rhs = std::pow(t, mu1) * base;
    worst = std::min(worst, (p.density_F(s, t) - rhs) / rhs);
  }
  return worst;
}

struct Shared {
  std::shared_ptr<const Discretization> radial, polar, floor_radial;
  PrimeLevelCache cache;
};

SweepRow compute_row(double alpha, const Nonlinearity& nl, const AmbientSpec& amb, const SweepOptions& o,
                     Shared& shared, int inner_jobs) {
  const auto sc = ScalingParams::make(alpha, amb.n);
  DescentConfig dc = o.descent;
  dc.jobs = inner_jobs;
  dc.seed = derive_seed(o.descent.seed, std::bit_cast<std::uint64_t>(alpha), 0);

  Problem radial(shared.radial, Functional::henon(alpha), nl);
  Problem sector(shared.polar, Functional::henon(alpha), nl);
  auto rrec = minimize(radial, LevelKind::radial, alpha, dc);
  auto srec = minimize(sector, LevelKind::sector, alpha, dc);
  const auto pb = projection_bound_check(*rrec.radial, alpha, nl, o.refine);
  const auto l5 = lemma5_check(alpha, nl, amb, o.grid, dc, shared.cache);
  const auto ub = sector_upper_bound(alpha, nl, sector, o.test_function);

  // radial minimizer on the polar rho nodes, evaluated by both quadratures
  const auto& fd = *shared.floor_radial;
  std::vector<double> on_rho;
  for (double r : fd.radial_grid()->nodes) on_rho.push_back(rrec.radial->at(r));
  const Vec xr = fd.restrict(on_rho);
  Problem floor_problem(shared.floor_radial, Functional::henon(alpha), nl);
  const double e_r = floor_problem.energy(floor_problem.state(xr));
  const auto polar_embed =
      radial_to_polar(RadialField{fd.radial_grid(), amb, fd.extend(xr)}, shared.polar->polar_grid());
  const double e_p = sector.energy(sector.state(shared.polar->restrict(polar_embed.values)));

  SweepRow row;
  row.alpha = alpha;
  row.beta = sc.beta;
  row.gamma = sc.gamma;
  row.m_radial = rrec.level;
  row.m_sector = srec.level;
  row.upper_bound = ub.value;
  row.t_alpha = pb.t_alpha;
  row.t_alpha_bound = pb.bound;
  row.lemma5_pass = l5.pass;
  row.converged = rrec.converged && srec.converged && l5.converged;
  row.anisotropy = anisotropy(*srec.polar);
  row.quadrature_floor = std::max(std::abs(e_p - e_r) / std::abs(e_r), 100 * std::numeric_limits<double>::epsilon());

  const double tol_order = 1e-8 * std::abs(rrec.level);
  row.diagnostics = {
      {"radial", rrec.to_json()},
      {"sector", srec.to_json()},
      {"projection_bound", pb.to_json()},
      {"lemma5", l5.to_json()},
      {"upper_bound", ub.to_json()},
      {"level_identity", {{"radial", level_identity_check(rrec, nl)}, {"sector", level_identity_check(srec, nl)}}},
      {"f_scaling_margin", f_scaling_margin(radial, radial.disc().restrict(rrec.radial->values), nl.params().mu1)},
      {"sector_below_radial", row.m_sector <= row.m_radial + tol_order},
      {"sector_below_upper_bound", row.m_sector <= row.upper_bound + 1e-8 * std::abs(row.upper_bound)},
      {"upper_bound_envelope_ratio", ub.value / std::pow(alpha, ub.envelope_exponent)}};

  if (!o.out_dir.empty()) {
    const fs::path dir = fs::path(o.out_dir) / "snapshots";
    const std::string tag = alpha_tag(alpha);
    const std::string rpath = "snapshots/radial_alpha_" + tag + ".json";
    const std::string spath = "snapshots/sector_alpha_" + tag + ".json";
    write_atomic(fs::path(o.out_dir) / rpath, snapshot(*rrec.radial, "minimizer:radial").dump());
    write_atomic(fs::path(o.out_dir) / spath, snapshot(*srec.polar, "minimizer:sector").dump());
    row.diagnostics["radial"]["snapshot"] = rpath;
    row.diagnostics["sector"]["snapshot"] = spath;
    row.sector_snapshot = spath;
  }
  return row;
}

}  // namespace

nlohmann::json SweepRow::to_json() const {
  return {{"alpha", alpha},
          {"beta", beta},
          {"gamma", gamma},
          {"m_radial", m_radial},
          {"m_sector", m_sector},
          {"upper_bound", upper_bound},
          {"t_alpha", t_alpha},
          {"t_alpha_bound", t_alpha_bound},
          {"lemma5_pass", lemma5_pass},
          {"converged", converged},
          {"anisotropy", anisotropy},
          {"quadrature_floor", quadrature_floor},
          {"sector_snapshot", sector_snapshot},
          {"diagnostics", diagnostics}};
}

SweepRow SweepRow::from_json(const nlohmann::json& j) {
  SweepRow r;
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  r.gamma = j.at("gamma").get<double>();
  r.m_radial = j.at("m_radial").get<double>();
  r.m_sector = j.at("m_sector").get<double>();
  r.upper_bound = j.at("upper_bound").get<double>();
  r.t_alpha = j.at("t_alpha").get<double>();
  r.t_alpha_bound = j.at("t_alpha_bound").get<double>();
  r.lemma5_pass = j.at("lemma5_pass").get<bool>();
  r.converged = j.at("converged").get<bool>();
  r.anisotropy = j.at("anisotropy").get<double>();
  r.quadrature_floor = j.at("quadrature_floor").get<double>();
  r.sector_snapshot = j.value("sector_snapshot", std::string{});
  r.diagnostics = j.value("diagnostics", nlohmann::json::object());
  return r;
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << num(r.alpha) << ',' << num(r.beta) << ',' << num(r.gamma) << ',' << num(r.m_radial) << ','
       << num(r.m_sector) << ',' << num(r.upper_bound) << ',' << num(r.t_alpha) << ',' << num(r.t_alpha_bound)
       << ',' << (r.lemma5_pass ? "true" : "false") << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

void validate_sweep_alphas(const std::vector<double>& alphas, int n) {
  if (alphas.empty()) throw ConfigError("sweep needs at least one alpha");
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!(alphas[k] > n + 2.0)) {
      throw ConfigError("sweep alpha = " + alpha_tag(alphas[k]) + " violates alpha > n + 2 = " +
                        std::to_string(n + 2) + ", required for the sector problem to be well posed");
    }
    if (k > 0 && !(alphas[k] > alphas[k - 1])) throw ConfigError("sweep alphas must be strictly increasing");
  }
}

SweepTable sweep(const std::vector<double>& alphas, const Nonlinearity& nl, const AmbientSpec& ambient,
                 const SweepOptions& opts) {
  validate_sweep_alphas(alphas, ambient.n);
  opts.descent.validate();
  opts.test_function.validate();
  if (opts.refine < 1) throw ConfigError("refine must be >= 1");
  if (opts.jobs < 1) throw ConfigError("jobs must be positive");

  Shared shared;
  shared.radial = make_discretization(make_radial_grid(opts.grid), ambient);
  shared.polar = make_discretization(make_polar_grid(opts.grid), ambient);
  GridConfig floor_grid = opts.grid;
  floor_grid.radial_cells = opts.grid.rho_cells;
  shared.floor_radial = make_discretization(make_radial_grid(floor_grid), ambient);

  SweepTable table;
  table.ambient = ambient;
  table.rows.resize(alphas.size());
  std::vector<char> done(alphas.size(), 0);
  std::vector<nlohmann::json> prints(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    prints[k] = fingerprint(alphas[k], nl, ambient, opts);
    if (opts.out_dir.empty()) continue;
    const fs::path p = fs::path(opts.out_dir) / "rows" / ("row_" + std::to_string(k) + ".json");
    if (!fs::exists(p)) continue;
    try {
      std::ifstream is(p);
      const auto j = nlohmann::json::parse(is);
      if (j.at("fingerprint") == prints[k]) {
        table.rows[k] = SweepRow::from_json(j.at("row"));
        done[k] = 1;
        log::info("reusing completed row alpha = " + alpha_tag(alphas[k]));
      }
    } catch (const std::exception& e) {
      log::info("ignoring unreadable row file " + p.string() + ": " + e.what());
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!done[k]) todo.push_back(k);
  }
  const int outer = std::max(1, std::min<int>(opts.jobs, static_cast<int>(todo.size())));
  const int inner = std::max(1, opts.jobs / outer);
  parallel_for(todo.size(), outer, [&](std::size_t t) {
    const std::size_t k = todo[t];
    log::info("sweep row alpha = " + alpha_tag(alphas[k]));
    table.rows[k] = compute_row(alphas[k], nl, ambient, opts, shared, inner);
    if (!opts.out_dir.empty()) {
      const nlohmann::json j{{"fingerprint", prints[k]}, {"row", table.rows[k].to_json()}};
      write_atomic(fs::path(opts.out_dir) / "rows" / ("row_" + std::to_string(k) + ".json"), j.dump(1));
    }
  });
  for (const auto& r : table.rows) {
    const auto& l5 = r.diagnostics.find("lemma5");
    if (l5 != r.diagnostics.end()) table.m_prime = (*l5).at("m_prime").get<double>();
  }
  return table;
}

nlohmann::json ExponentFit::to_json() const {
  return {{"slope", slope},         {"intercept", intercept}, {"std_error", std_error},
          {"alpha_min", alpha_min}, {"alpha_max", alpha_max}, {"points", points}};
}

ExponentFit fit_exponent(const SweepTable& table, FitColumn column, FitWindow window) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : table.rows) {
    if (r.converged) rows.push_back(&r);
  }
  if (rows.size() < 4) {
    throw InsufficientData("exponent fit needs at least 4 converged rows, have " + std::to_string(rows.size()));
  }
  if (window == FitWindow::upper_half) rows.erase(rows.begin(), rows.begin() + static_cast<long>(rows.size() / 2));
  std::vector<double> x, y;
  for (const auto* r : rows) {
    const double v = column == FitColumn::m_radial   ? r->m_radial
                     : column == FitColumn::m_sector ? r->m_sector
                                                     : r->upper_bound;
    if (!(v > 0.0)) throw InsufficientData("exponent fit needs positive levels");
    x.push_back(std::log(r->alpha));
    y.push_back(std::log(v));
  }
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ssr += e * e;
  }
  fit.std_error = x.size() > 2 ? std::sqrt(ssr / (k - 2.0) / sxx) : 0.0;
  fit.alpha_min = rows.front()->alpha;
  fit.alpha_max = rows.back()->alpha;
  fit.points = static_cast<int>(x.size());
  return fit;
}

nlohmann::json BreakingResult::to_json() const {
  return {{"alpha", alpha},
          {"m_radial", m_radial},
          {"m_sector", m_sector},
          {"anisotropy", anisotropy},
          {"quadrature_floor", quadrature_floor},
          {"snapshot", snapshot}};
}

std::optional<BreakingResult> detect_breaking(const SweepTable& table, double margin) {
  if (!(margin >= 0.0 && margin < 1.0)) throw ConfigError("breaking margin must lie in [0, 1)");
  for (const auto& r : table.rows) {
    if (r.converged && r.m_sector < r.m_radial * (1.0 - margin)) {
      return BreakingResult{r.alpha, r.m_radial, r.m_sector, r.anisotropy, r.quadrature_floor, r.sector_snapshot};
    }
  }
  return std::nullopt;
}

}  // namespace henon
