#include "henon/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "henon/discretization.hpp"
#include "henon/error.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace {

constexpr int kModes = 6;

struct Ratios {
  double max = 0.0, mean = 0.0;
  bool finite = true;
};

Ratios sample(EmbeddingKind kind, const AmbientSpec& amb, int cells, const EmbeddingSampleConfig& cfg, double b) {
  auto grid = std::make_shared<RadialGrid>(build_radial_grid(cells, cfg.grading, cfg.toward));
  auto disc = make_discretization(grid, amb);
  const double decay_exp = 0.5 * (amb.n - b - 2.0);
  Ratios out;
  for (int k = 0; k < cfg.fields; ++k) {
    // identical coefficients on both grids: the stream depends on the field index only
    std::mt19937_64 rng(derive_seed(cfg.seed, 0xe5bedull, static_cast<std::uint64_t>(k)));
    double a[kModes];
    for (int m = 0; m < kModes; ++m) {
      a[m] = (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0) / (m + 1);
    }
    auto u = sample_radial(grid, amb, [&](double r) {
      double s = 0.0;
      for (int m = 0; m < kModes; ++m) s += a[m] * std::cos((m + 0.5) * std::numbers::pi * r);
      return s;
    });
    const Vec x = disc->restrict(u.values);
    const double energy = std::sqrt(disc->dirichlet(x, b));
    double lhs = 0.0;
    if (kind == EmbeddingKind::decay) {
      for (std::size_t i = 0; i < grid->nodes.size(); ++i) {
        lhs = std::max(lhs, std::abs(u.values[i]) * std::pow(grid->nodes[i], decay_exp));
      }
    } else {
      const double q = cfg.q;
      lhs = std::pow(disc->integrate(x, 0.0, [q](double t) { return std::pow(std::abs(t), q); }), 1.0 / q);
    }
    const double ratio = lhs / energy;
    if (!std::isfinite(ratio)) out.finite = false;
    out.max = std::max(out.max, ratio);
    out.mean += ratio / cfg.fields;
  }
  return out;
}

}  // namespace

const char* to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::decay:
      return "decay";
    case EmbeddingKind::interpolation:
      return "interpolation";
    case EmbeddingKind::corollary1:
      return "corollary1";
  }
  return "?";
}

EmbeddingKind embedding_kind_from_string(const std::string& name) {
  if (name == "decay") return EmbeddingKind::decay;
  if (name == "interpolation") return EmbeddingKind::interpolation;
  if (name == "corollary1") return EmbeddingKind::corollary1;
  throw ConfigError("embedding kind must be decay, interpolation or corollary1; got '" + name + "'");
}

double interpolation_weight(int n, double q) { return n - 2.0 - 2.0 * n / q; }

nlohmann::json EmbeddingReport::to_json() const {
  return {{"kind", to_string(kind)},
          {"n", n},
          {"q", q},
          {"b", b},
          {"max_ratio", max_ratio},
          {"mean_ratio", mean_ratio},
          {"max_ratio_refined", max_ratio_refined},
          {"mean_ratio_refined", mean_ratio_refined},
          {"growth", growth},
          {"pass", pass}};
}

EmbeddingReport verify_embedding(EmbeddingKind kind, int n, const EmbeddingSampleConfig& cfg) {
  const auto amb = AmbientSpec::make(n);
  if (cfg.fields <= 0) throw ConfigError("embedding sample needs at least one field");
  EmbeddingReport rep;
  rep.kind = kind;
  rep.n = n;
  double b = 0.0;
  if (kind == EmbeddingKind::decay) {
    b = cfg.weight;
    if (!(n - b > 2.0)) throw ConfigError("decay estimate needs 2 < n - b");
  } else {
    const double qmax = 4.0 * n / (n - 2.0);
    if (!(cfg.q > 2.0 && cfg.q < qmax)) {
      throw ConfigError("embedding exponent q must satisfy 2 < q < 4n/(n-2)");
    }
    rep.q = cfg.q;
    b = kind == EmbeddingKind::interpolation ? interpolation_weight(n, cfg.q) : amb.a();
  }
  rep.b = b;
  const auto coarse = sample(kind, amb, cfg.cells, cfg, b);
  const auto fine = sample(kind, amb, 2 * cfg.cells, cfg, b);
  rep.max_ratio = coarse.max;
  rep.mean_ratio = coarse.mean;
  rep.max_ratio_refined = fine.max;
  rep.mean_ratio_refined = fine.mean;
  rep.growth = fine.max / coarse.max;
  rep.pass = coarse.finite && fine.finite && std::isfinite(rep.growth) && rep.growth < 2.0;
  return rep;
}

}  // namespace henon
