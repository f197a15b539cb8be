#include "henon/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "henon/config.hpp"
#include "henon/error.hpp"
#include "henon/log.hpp"
#include "henon/oracle.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config, out, alpha;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> margin;
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--jobs", o.jobs, "worker threads (default: available parallelism)");
  sub->add_option("--seed", o.seed, "seed of all randomized starts and samples");
  sub->add_option("--alpha", o.alpha, "comma-separated alpha list");
  sub->add_option("--margin", o.margin, "relative symmetry-breaking margin");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.seed) c.seed = *o.seed;
  if (o.margin) c.margin = *o.margin;
  if (!o.alpha.empty()) c.alphas = parse_alpha_list(o.alpha);
  if (c.jobs < 0) throw ConfigError("--jobs must be positive");
  if (c.jobs == 0) c.jobs = default_jobs();
  c.validate();
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string alpha_tag(double alpha) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

int check_f(const RunConfig& c, std::ostream& out) {
  const auto nl = c.make_nonlinearity();
  const auto report = verify_hypotheses(nl, c.ambient.n, c.ambient.l);
  json j = report.to_json();
  j["nonlinearity"] = nl.to_json();
  j["n"] = c.ambient.n;
  j["l"] = c.ambient.l;
  write_file(fs::path(c.out) / "hypothesis_report.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return report.all_pass() ? kExitOk : kExitConfig;
}

int solve(const RunConfig& c, Subspace subspace, std::ostream& out) {
  const auto nl = c.make_nonlinearity();
  const bool radial = subspace == Subspace::radial;
  if (!radial) {
    for (double a : c.alphas) {
      if (!(a > c.ambient.n + 2.0)) {
        throw ConfigError("solve-sector needs alpha > n + 2 = " + std::to_string(c.ambient.n + 2) +
                          " for the sector problem to be well posed (got " + alpha_tag(a) + ")");
      }
    }
  }
  auto disc = radial ? make_discretization(make_radial_grid(c.grid), c.ambient)
                     : make_discretization(make_polar_grid(c.grid), c.ambient);
  DescentConfig d = c.descent;
  d.seed = c.seed;
  d.jobs = c.jobs;
  const char* name = radial ? "radial" : "sector";
  json records = json::array();
  bool all = true;
  for (double a : c.alphas) {
    Problem p(disc, Functional::henon(a), nl);
    auto rec = minimize(p, radial ? LevelKind::radial : LevelKind::sector, a, d);
    const std::string rel = std::string("snapshots/") + name + "_alpha_" + alpha_tag(a) + ".json";
    write_file(fs::path(c.out) / rel, (radial ? snapshot(*rec.radial, "minimizer:radial")
                                              : snapshot(*rec.polar, "minimizer:sector"))
                                          .dump());
    rec.snapshot_path = rel;
    json j = rec.to_json();
    if (!radial) j["anisotropy"] = anisotropy(*rec.polar);
    records.push_back(j);
    all = all && rec.converged;
    out << name << " alpha=" << alpha_tag(a) << " level=" << json(rec.level).dump()
        << " converged=" << (rec.converged ? "true" : "false") << '\n';
    write_file(fs::path(c.out) / (std::string("solve_") + name + ".json"),
               json{{"config", c.to_json()}, {"records", records}}.dump(2) + "\n");
  }
  return all ? kExitOk : kExitNumerical;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto nl = c.make_nonlinearity();
  validate_sweep_alphas(c.alphas, c.ambient.n);
  auto opts = c.sweep_options();
  opts.out_dir = c.out;
  const SweepTable table = sweep(c.alphas, nl, c.ambient, opts);

  write_file(fs::path(c.out) / "sweep.csv", table.to_csv());
  json rows = json::array();
  for (const auto& r : table.rows) rows.push_back(r.to_json());
  write_file(fs::path(c.out) / "sweep.json", json{{"rows", rows}}.dump(1) + "\n");

  json summary{{"config", c.to_json()},
               {"splitting", {{"n", c.ambient.n}, {"l", c.ambient.l}, {"default_l", default_splitting(c.ambient.n)}}},
               {"m_prime", table.m_prime},
               {"targets",
                {{"radial", radial_target_exponent(nl.params().mu1)},
                 {"sector", sector_envelope_exponent(nl.params().mu2, c.ambient.n, c.ambient.l)},
                 {"sector_alt", sector_envelope_exponent_alt(nl.params().mu2, c.ambient.n)}}}};
  int code = kExitOk;
  json fits = json::object();
  const std::pair<const char*, FitColumn> cols[] = {
      {"m_radial", FitColumn::m_radial}, {"m_sector", FitColumn::m_sector}, {"upper_bound", FitColumn::upper_bound}};
  for (const auto& [key, col] : cols) {
    try {
      fits[key] = {{"upper_half", fit_exponent(table, col, FitWindow::upper_half).to_json()},
                   {"all", fit_exponent(table, col, FitWindow::all).to_json()}};
    } catch (const InsufficientData& e) {
      fits[key] = {{"error", e.what()}};
      code = kExitNumerical;
    }
  }
  summary["fits"] = fits;
  const auto brk = detect_breaking(table, c.margin);
  summary["breaking"] = brk ? brk->to_json() : json(nullptr);
  summary["margin"] = c.margin;
  bool converged = true;
  for (const auto& r : table.rows) converged = converged && r.converged;
  summary["all_converged"] = converged;
  write_file(fs::path(c.out) / "summary.json", summary.dump(2) + "\n");
  out << table.to_csv();
  if (!converged) {
    err << "henon_lab: some sweep rows did not converge; see sweep.json\n";
    code = kExitNumerical;
  }
  return code;
}

int verify(const RunConfig& c, std::ostream& out) {
  const auto nl = c.make_nonlinearity();
  EmbeddingSampleConfig e = c.embedding;
  e.seed = c.seed;
  const auto emb = verify_embedding(c.embedding_kind, c.ambient.n, e);
  json j{{"embedding", emb.to_json()}};

  // change of variables on the smooth profile 1 - r^2
  auto grid = make_radial_grid(c.grid);
  const auto u = sample_radial(grid, c.ambient, [](double r) { return 1.0 - r * r; });
  json cov = json::array();
  bool pass = emb.pass;
  for (double a : c.alphas) {
    if (!(a > 0.0)) continue;
    const auto res = change_of_variables(u, a, nl, c.refine);
    cov.push_back(res.to_json());
    pass = pass && res.err_f <= 1e-6 && res.err_grad <= 1e-6;
  }
  j["change_of_variables"] = cov;
  j["pass"] = pass;
  write_file(fs::path(c.out) / "verify.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return pass ? kExitOk : kExitNumerical;
}

int oracle_compare(const RunConfig& c, std::ostream& out) {
  const auto nl = c.make_nonlinearity();
  auto grid = make_radial_grid(c.grid);
  auto disc = make_discretization(grid, c.ambient);
  DescentConfig d = c.descent;
  d.seed = c.seed;
  d.jobs = c.jobs;
  json rows = json::array();
  const fs::path path = fs::path(c.out) / "oracle_compare.json";
  for (double a : c.alphas) {
    Problem p(disc, Functional::henon(a), nl);
    const auto rec = minimize(p, LevelKind::radial, a, d);
    json row{{"alpha", a}, {"variational", rec.level}, {"converged", rec.converged}};
    try {
      const auto sh = shooting_ground_state(a, nl, c.ambient, grid, c.shooting_tol);
      row["shooting"] = sh.energy;
      row["s"] = sh.s;
      row["relative_gap"] = std::abs(rec.level - sh.energy) / std::abs(sh.energy);
      row["residual_over_dirichlet"] = std::abs(sh.residual) / sh.dirichlet;
      write_file(fs::path(c.out) / ("snapshots/shooting_alpha_" + alpha_tag(a) + ".json"), sh.to_json().dump());
    } catch (const NumericalError& e) {
      row["error"] = e.what();
      rows.push_back(row);
      write_file(path, json{{"rows", rows}}.dump(2) + "\n");
      throw;
    }
    rows.push_back(row);
    out << row.dump() << '\n';
    write_file(path, json{{"rows", rows}}.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nehari ground states of -Laplace u = |x|^alpha f(u) on the unit ball"};
  app.require_subcommand(1);
  Overrides o;
  const char* names[] = {"check-f", "solve-radial", "solve-sector", "sweep", "verify", "oracle-compare"};
  const char* help[] = {"verify the hypotheses on f",        "radial ground states for each alpha",
                        "sector ground states for each alpha", "alpha sweep with fits and breaking detection",
                        "embedding and change-of-variables checks", "variational vs shooting radial levels"};
  std::vector<CLI::App*> subs;
  for (int k = 0; k < 6; ++k) {
    subs.push_back(app.add_subcommand(names[k], help[k]));
    add_flags(subs.back(), o);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "henon_lab: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const RunConfig c = resolve(o);
    log::info("writing to " + c.out);
    if (subs[0]->parsed()) return check_f(c, out);
    if (subs[1]->parsed()) return solve(c, Subspace::radial, out);
    if (subs[2]->parsed()) return solve(c, Subspace::sector, out);
    if (subs[3]->parsed()) return run_sweep(c, out, err);
    if (subs[4]->parsed()) return verify(c, out);
    return oracle_compare(c, out);
  } catch (const ConfigError& e) {
    err << "henon_lab: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "henon_lab: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "henon_lab: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "henon_lab: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace henon
