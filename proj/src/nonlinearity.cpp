#include "henon/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "henon/error.hpp"

namespace henon {

namespace {

constexpr double kClosedFormTol = 1e-12;
constexpr double kTailRatio = 1e-18;  // stop descending once a piece is this small relative to the sum
constexpr double kGrowthTrendTol = 0.05;

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = count == 1 ? lo : std::exp(a + (b - a) * k / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Relative margin of lhs >= rhs.
double rel_margin(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return (lhs - rhs) / scale;
}

struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double t = 0.0;
  double v = 0.0;
  void update(double m, double at_t, double at_v = 0.0) {
    if (m < margin) {
      margin = m;
      t = at_t;
      v = at_v;
    }
  }
};

HypothesisCheck make_check(std::string name, const Worst& w, double tol, bool extra_ok = true,
                           std::string note = {}) {
  HypothesisCheck c;
  c.name = std::move(name);
  c.worst_margin = std::isfinite(w.margin) ? w.margin : 0.0;
  c.tol = tol;
  c.at_t = w.t;
  c.at_v = w.v;
  c.pass = extra_ok && c.worst_margin >= -tol;
  c.note = std::move(note);
  return c;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::power:
      return "power";
    case Family::power_sum:
      return "power_sum";
    case Family::rational:
      return "rational";
    case Family::min_power:
      return "min_power";
    case Family::custom:
      return "custom";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::power, Family::power_sum, Family::rational, Family::min_power, Family::custom}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown nonlinearity family '" + std::string(name) + "'");
}

double critical_exponent(int n) {
  if (n < 3) return std::numeric_limits<double>::infinity();
  if (n % 2 == 0) return 2.0 * (n + 2) / (n - 2);
  const int h = n / 2;
  return 2.0 * (h + 2) / h;
}

double exponent_gap(double mu1, double mu2) { return 4.0 * (mu1 - mu2) / ((mu1 - 2.0) * (mu2 - 2.0)); }

int Nonlinearity::integer_exponent(double e) {
  const double r = std::round(e);
  if (std::abs(e - r) == 0.0 && r >= 0.0 && r <= 16.0) return static_cast<int>(r);
  return -1;
}

namespace {

void validate(Family family, const NonlinearityParams& prm, double growth, int n, int l) {
  std::ostringstream err;
  if (n < 4) err << "dimension n = " << n << " must be >= 4; ";
  if (l < 1 || l > n - 1) err << "splitting index l = " << l << " must lie in [1, n-1]; ";
  if (!(prm.p > 2.0)) err << "p = " << prm.p << " must exceed 2; ";
  if (!(prm.q > 2.0)) err << "q = " << prm.q << " must exceed 2; ";
  if (!(prm.mu1 > 2.0)) err << "mu1 = " << prm.mu1 << " must exceed 2; ";
  if (!(prm.mu2 > 2.0)) err << "mu2 = " << prm.mu2 << " must exceed 2; ";
  if ((family == Family::power_sum || family == Family::rational || family == Family::min_power) &&
      !(prm.p < prm.q)) {
    err << "family " << to_string(family) << " requires p < q; ";
  }
  const std::string so_far = err.str();
  if (so_far.empty()) {
    const double pstar = critical_exponent(n);
    if (!(growth > 2.0 && growth < pstar)) {
      err << "growth exponent " << growth << " must lie in (2, " << pstar << "); ";
    }
    const double gap = exponent_gap(prm.mu1, prm.mu2);
    if (!(gap < n - l)) {
      err << "rescaling gap 4(mu1-mu2)/((mu1-2)(mu2-2)) = " << gap << " must be below n - l = " << (n - l)
          << "; ";
    }
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw ConfigError("invalid nonlinearity: " + msg.substr(0, msg.size() - 2));
}

}  // namespace

Nonlinearity Nonlinearity::make(Family family, const NonlinearityParams& params, int n, int l) {
  if (family == Family::custom) throw ConfigError("custom nonlinearities are built with Nonlinearity::custom");
  Nonlinearity nl;
  nl.family_ = family;
  nl.params_ = params;
  validate(family, params, nl.growth_exponent(), n, l);
  nl.e1_ = params.p - 1.0;
  nl.e2_ = params.q - 1.0;
  nl.ie1_ = integer_exponent(nl.e1_);
  nl.ie2_ = integer_exponent(nl.e2_);
  nl.ip_ = integer_exponent(params.p);
  nl.iq_ = integer_exponent(params.q);
  nl.iqp_ = integer_exponent(params.q - params.p);
  return nl;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f, const NonlinearityParams& params, int n,
                                  int l, std::function<double(double)> g) {
  if (!f) throw ConfigError("custom nonlinearity requires an evaluator");
  Nonlinearity nl;
  nl.family_ = Family::custom;
  nl.params_ = params;
  validate(Family::custom, params, params.p, n, l);
  nl.custom_f_ = std::move(f);
  nl.custom_g_ = std::move(g);
  return nl;
}

double Nonlinearity::growth_exponent() const {
  switch (family_) {
    case Family::power:
    case Family::min_power:
    case Family::custom:
      return params_.p;
    case Family::power_sum:
      return params_.q;
    case Family::rational:
      // t^q / (1 + t^{q-p}) behaves like t^p at infinity.
      return params_.p + 1.0;
  }
  return params_.p;
}

double Nonlinearity::ar_exponent() const {
  switch (family_) {
    case Family::power:
    case Family::power_sum:
    case Family::min_power:
      return params_.p;
    case Family::rational:
      return params_.p + 1.0;
    case Family::custom:
      return params_.q;
  }
  return params_.p;
}

// Dyadic pieces [2^k, 2^{k+1}] above 1 and [b/2, b] below min(t, 1), 20-point Gauss on each.
// Geometric pieces keep the rule accurate for power-like behaviour at 0 and at infinity.
double Nonlinearity::quadrature(const std::function<double(double)>& h, double t) const {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  double total = 0.0;
  double b = t;
  if (t > 1.0) {
    for (double a = 1.0; a < t;) {
      const double e = std::min(2.0 * a, t);
      total += Rule::integrate(h, a, e);
      a = e;
    }
    b = 1.0;
  }
  for (int k = 0; k < 1100 && b > std::numeric_limits<double>::min(); ++k) {
    const double piece = Rule::integrate(h, 0.5 * b, b);
    total += piece;
    b *= 0.5;
    if (k >= 4 && std::abs(piece) <= kTailRatio * std::abs(total)) break;
  }
  return total;
}

double Nonlinearity::F(double t) const {
  if (!(t > 0.0)) return 0.0;
  const double p = params_.p;
  const double q = params_.q;
  switch (family_) {
    case Family::power:
      return pow_(t, p, ip_) / p;
    case Family::power_sum:
      return pow_(t, p, ip_) / p + pow_(t, q, iq_) / q;
    case Family::min_power:
      if (t <= 1.0) return pow_(t, q, iq_) / q;
      return 1.0 / q + (pow_(t, p, ip_) - 1.0) / p;
    case Family::rational:
    case Family::custom:
      return quadrature([this](double s) { return f(s); }, t);
  }
  return 0.0;
}

double Nonlinearity::g(double t) const {
  if (!(t > 0.0)) return 0.0;
  switch (family_) {
    case Family::power_sum:
      // Only the leading power survives the t >= 1 rescaling with mu2 = q.
      return pow_(t, e2_, ie2_);
    case Family::custom:
      return custom_g_ ? std::max(0.0, custom_g_(t)) : f(t);
    default:
      return f(t);
  }
}

double Nonlinearity::G(double t) const {
  if (!(t > 0.0)) return 0.0;
  switch (family_) {
    case Family::power_sum:
      return pow_(t, params_.q, iq_) / params_.q;
    case Family::custom:
      if (custom_g_) return quadrature([this](double s) { return g(s); }, t);
      return F(t);
    default:
      return F(t);
  }
}

double Nonlinearity::eval(Which which, double t) const {
  switch (which) {
    case Which::f:
      return f(t);
    case Which::F:
      return F(t);
    case Which::g:
      return g(t);
    case Which::G:
      return G(t);
  }
  return 0.0;
}

nlohmann::json Nonlinearity::to_json() const {
  return {{"family", std::string(to_string(family_))},
          {"p", params_.p},
          {"q", params_.q},
          {"mu1", params_.mu1},
          {"mu2", params_.mu2}};
}

Nonlinearity nonlinearity_from_json(const nlohmann::json& spec, int n, int l) {
  if (!spec.is_object()) throw ConfigError("nonlinearity specification must be a JSON object");
  for (const auto& [key, value] : spec.items()) {
    if (key != "family" && key != "p" && key != "q" && key != "mu1" && key != "mu2") {
      throw ConfigError("unknown field '" + key + "' in nonlinearity specification");
    }
    if (key != "family" && !value.is_number()) throw ConfigError("field '" + key + "' must be a number");
  }
  if (!spec.contains("family") || !spec["family"].is_string()) {
    throw ConfigError("nonlinearity specification needs a string 'family'");
  }
  if (!spec.contains("p")) throw ConfigError("nonlinearity specification needs 'p'");
  const Family family = family_from_string(spec["family"].get<std::string>());
  NonlinearityParams prm;
  prm.p = spec["p"].get<double>();
  prm.q = spec.value("q", prm.p);
  const double mu_default1 = family == Family::power_sum ? prm.q : prm.p;
  const double mu_default2 = family == Family::power ? prm.p : prm.q;
  prm.mu1 = spec.value("mu1", mu_default1);
  prm.mu2 = spec.value("mu2", mu_default2);
  return Nonlinearity::make(family, prm, n, l);
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

const HypothesisCheck* HypothesisReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json HypothesisReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"worst_margin", c.worst_margin},
                   {"tol", c.tol},
                   {"at_t", c.at_t},
                   {"at_v", c.at_v},
                   {"note", c.note}});
  }
  return {{"all_pass", all_pass()}, {"growth_constant", growth_constant}, {"checks", arr}};
}

HypothesisReport verify_hypotheses(const Nonlinearity& nl, int n, int l, const SampleGrid& grid) {
  HypothesisReport rep;
  const auto ts = log_space(grid.t_min, grid.t_max, grid.points);
  const auto lo = log_space(1.0 / grid.s_max, 1.0, grid.points);
  const auto hi = log_space(1.0, grid.s_max, grid.points);
  const auto& prm = nl.params();
  std::vector<double> fv(ts.size()), Fv(ts.size()), gv(ts.size()), Gv(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    fv[k] = nl.f(ts[k]);
    Fv[k] = nl.F(ts[k]);
    gv[k] = nl.g(ts[k]);
    Gv[k] = nl.G(ts[k]);
  }

  {  // positive-part convention and nonnegativity
    Worst w;
    for (double t : ts) {
      for (Which which : {Which::f, Which::F, Which::g, Which::G}) w.update(-std::abs(nl.eval(which, -t)), -t);
      w.update(nl.f(t), t);
    }
    w.update(-std::abs(nl.f(0.0)), 0.0);
    rep.checks.push_back(make_check("f1_sign", w, kClosedFormTol, true, "f = 0 on t <= 0, f >= 0 on t > 0"));
  }

  const double decade = std::log(10.0) / (std::log(grid.t_max) - std::log(grid.t_min)) * (grid.points - 1);
  const auto span = static_cast<std::size_t>(std::max(2.0, std::ceil(decade)));

  {  // f(t)/t decreasing to 0 on the lowest decade
    Worst w;
    double rmax = 0.0;
    for (std::size_t k = 0; k <= span; ++k) rmax = std::max(rmax, fv[k] / ts[k]);
    for (std::size_t k = 0; k < span; ++k) {
      const double d = (fv[k + 1] / ts[k + 1] - fv[k] / ts[k]) / std::max(rmax, 1e-300);
      w.update(d, ts[k]);
    }
    const double first = fv[0] / ts[0];
    const bool trend = first == 0.0 || first < fv[span] / ts[span];
    rep.checks.push_back(make_check("f1_small", w, kClosedFormTol, trend, "f(t)/t decreases toward 0 as t -> 0"));
  }
  {  // f(t)/t increasing without bound on the top decade
    Worst w;
    const std::size_t last = ts.size() - 1;
    double rmax = 0.0;
    for (std::size_t k = last - span; k <= last; ++k) rmax = std::max(rmax, fv[k] / ts[k]);
    for (std::size_t k = last - span; k < last; ++k) {
      const double d = (fv[k + 1] / ts[k + 1] - fv[k] / ts[k]) / std::max(rmax, 1e-300);
      w.update(d, ts[k]);
    }
    const bool trend = fv[last] / ts[last] > fv[last - span] / ts[last - span];
    rep.checks.push_back(make_check("f1_large", w, kClosedFormTol, trend, "f(t)/t grows at the top of the range"));
  }
  {  // growth bound f(t) <= C (1+t)^{P-1}
    const double P = nl.growth_exponent();
    double cmax = 0.0;
    double at = 0.0;
    std::vector<double> ratio(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
      ratio[k] = fv[k] / std::pow(1.0 + ts[k], P - 1.0);
      if (ratio[k] > cmax) {
        cmax = ratio[k];
        at = ts[k];
      }
    }
    const std::size_t last = ts.size() - 1;
    double slope = 0.0;
    if (ratio[last] > 0.0 && ratio[last - span] > 0.0) {
      slope = std::log(ratio[last] / ratio[last - span]) / std::log(ts[last] / ts[last - span]);
    }
    Worst w;
    w.update(kGrowthTrendTol - slope, ts[last]);
    rep.growth_constant = cmax;
    std::ostringstream note;
    note << "C = " << cmax << " (max at t = " << at << "), growth exponent " << P << " < " << critical_exponent(n)
         << ", margin = " << kGrowthTrendTol << " - top-decade log-slope of f/(1+t)^{P-1}";
    rep.checks.push_back(make_check("f2", w, 0.0, true, note.str()));
  }
  {  // Q F(t) <= t f(t)
    const double Q = nl.ar_exponent();
    Worst w;
    for (std::size_t k = 0; k < ts.size(); ++k) w.update(rel_margin(ts[k] * fv[k], Q * Fv[k]), ts[k]);
    std::ostringstream note;
    note << "Q = " << Q;
    rep.checks.push_back(make_check("f3", w, kClosedFormTol, true, note.str()));
  }
  {  // f(tv) >= t^{mu1-1} f(v), t in (0,1]
    Worst w;
    for (double t : lo) {
      const double s = std::pow(t, prm.mu1 - 1.0);
      for (std::size_t k = 0; k < ts.size(); ++k) w.update(rel_margin(nl.f(t * ts[k]), s * fv[k]), t, ts[k]);
    }
    rep.checks.push_back(make_check("f4_sub", w, kClosedFormTol, true, "f(tv) >= t^{mu1-1} f(v), t <= 1"));
  }
  {  // f(tv) >= t^{mu2-1} g(v), t >= 1
    Worst w;
    for (double t : hi) {
      const double s = std::pow(t, prm.mu2 - 1.0);
      for (std::size_t k = 0; k < ts.size(); ++k) w.update(rel_margin(nl.f(t * ts[k]), s * gv[k]), t, ts[k]);
    }
    const bool nontrivial = std::any_of(gv.begin(), gv.end(), [](double x) { return x > 0.0; });
    rep.checks.push_back(make_check("f4_super", w, kClosedFormTol, nontrivial, "f(tv) >= t^{mu2-1} g(v), t >= 1"));
  }
  {
    Worst w;
    const double gap = exponent_gap(prm.mu1, prm.mu2);
    w.update(static_cast<double>(n - l) - gap, prm.mu1, prm.mu2);
    std::ostringstream note;
    note << "gap = " << gap << " < n - l = " << (n - l);
    auto c = make_check("f4_gap", w, 0.0, w.margin > 0.0, note.str());
    rep.checks.push_back(c);
  }
  {  // F(tv) >= t^{mu1} F(v), t in (0,1)
    Worst w;
    for (double t : lo) {
      const double s = std::pow(t, prm.mu1);
      for (std::size_t k = 0; k < ts.size(); ++k) w.update(rel_margin(nl.F(t * ts[k]), s * Fv[k]), t, ts[k]);
    }
    rep.checks.push_back(make_check("F_sub", w, kClosedFormTol, true, "F(tv) >= t^{mu1} F(v), t <= 1"));
  }
  {  // F(tv) >= t^{mu2} G(v), t > 1
    Worst w;
    for (double t : hi) {
      const double s = std::pow(t, prm.mu2);
      for (std::size_t k = 0; k < ts.size(); ++k) w.update(rel_margin(nl.F(t * ts[k]), s * Gv[k]), t, ts[k]);
    }
    rep.checks.push_back(make_check("F_super", w, kClosedFormTol, true, "F(tv) >= t^{mu2} G(v), t >= 1"));
  }
  return rep;
}

}  // namespace henon
