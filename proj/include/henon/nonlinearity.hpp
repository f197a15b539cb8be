#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace henon {

enum class Family { power, power_sum, rational, min_power, custom };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Exponents of a nonlinearity.
///
/// For the named families `p` and `q` are the shape exponents of the formula
/// (t^{p-1}, t^{p-1} + t^{q-1}, t^q / (1 + t^{q-p}), min{t^{p-1}, t^{q-1}}).
/// For `custom` they are taken literally as the growth and Ambrosetti-Rabinowitz
/// exponents. `mu1` and `mu2` are the sub- and super-linear rescaling exponents.
struct NonlinearityParams {
  double p = 4.0;
  double q = 4.0;
  double mu1 = 4.0;
  double mu2 = 4.0;
};

/// Which of the four scalar evaluators to use.
enum class Which { f, F, g, G };

/// Critical growth bound: 2(n+2)/(n-2) for even n, 2([n/2]+2)/[n/2] for odd n.
double critical_exponent(int n);

/// The rescaling-exponent gap 4(mu1 - mu2) / ((mu1 - 2)(mu2 - 2)); must stay below n - l.
double exponent_gap(double mu1, double mu2);

/// A nonnegative nonlinearity f with f = 0 on (-inf, 0], together with F = int_0^t f,
/// the companion g of the t >= 1 rescaling inequality, and G = int_0^t g.
///
/// Values are immutable after construction; all evaluators are pure.
class Nonlinearity {
 public:
  /// Validates `params` against the ambient dimension `n` and splitting index `l`;
  /// throws ConfigError on violation.
  static Nonlinearity make(Family family, const NonlinearityParams& params, int n, int l);

  /// User-supplied f on t > 0; F and G are computed by adaptive quadrature.
  /// `params.p` is the growth exponent and `params.q` the AR exponent.
  static Nonlinearity custom(std::function<double(double)> f, const NonlinearityParams& params, int n,
                             int l, std::function<double(double)> g = {});

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] const NonlinearityParams& params() const { return params_; }

  /// Exponent P in |f(t)| <= C (1 + |t|)^{P-1}.
  [[nodiscard]] double growth_exponent() const;
  /// Exponent Q in Q F(t) <= t f(t).
  [[nodiscard]] double ar_exponent() const;

  [[nodiscard]] double f(double t) const {
    if (!(t > 0.0)) return 0.0;
    switch (family_) {
      case Family::power:
        return pow_(t, e1_, ie1_);
      case Family::power_sum:
        return pow_(t, e1_, ie1_) + pow_(t, e2_, ie2_);
      case Family::rational:
        return pow_(t, params_.q, iq_) / (1.0 + pow_(t, params_.q - params_.p, iqp_));
      case Family::min_power:
        return t < 1.0 ? pow_(t, e2_, ie2_) : pow_(t, e1_, ie1_);
      case Family::custom:
        return custom_f_(t);
    }
    return 0.0;
  }
  [[nodiscard]] double F(double t) const;
  [[nodiscard]] double g(double t) const;
  [[nodiscard]] double G(double t) const;
  [[nodiscard]] double eval(Which which, double t) const;

  [[nodiscard]] nlohmann::json to_json() const;

 private:
  Nonlinearity() = default;

  // Integer exponents are evaluated by repeated multiplication.
  static double pow_(double t, double e, int ie) {
    if (ie >= 0) {
      double r = 1.0;
      for (int k = 0; k < ie; ++k) r *= t;
      return r;
    }
    return std::pow(t, e);
  }
  static int integer_exponent(double e);
  [[nodiscard]] double quadrature(const std::function<double(double)>& h, double t) const;

  Family family_ = Family::power;
  NonlinearityParams params_;
  double e1_ = 0.0, e2_ = 0.0;  // p-1, q-1
  int ie1_ = -1, ie2_ = -1, ip_ = -1, iq_ = -1, iqp_ = -1;
  std::function<double(double)> custom_f_;
  std::function<double(double)> custom_g_;
};

/// Parses {"family": ..., "p": ..., "q": ..., "mu1": ..., "mu2": ...}; unknown fields are rejected.
/// Missing q defaults to p; missing mu1/mu2 default per family (see README).
Nonlinearity nonlinearity_from_json(const nlohmann::json& spec, int n, int l);

/// Sampling plan for hypothesis verification.
struct SampleGrid {
  double t_min = 1e-4;
  double t_max = 1e3;
  double s_max = 1e2;
  int points = 256;
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double worst_margin = 0.0;
  double tol = 0.0;
  double at_t = 0.0;  // sample location of the worst margin
  double at_v = 0.0;  // second coordinate for two-parameter checks, else 0
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double growth_constant = 0.0;  // reported C of the growth bound
  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] const HypothesisCheck* find(std::string_view name) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Samples f1..f4 (plus the derived F-rescaling inequalities) on log-spaced grids.
/// Never throws on a failed hypothesis; failures are reported with their location.
HypothesisReport verify_hypotheses(const Nonlinearity& nl, int n, int l, const SampleGrid& grid = {});

}  // namespace henon
