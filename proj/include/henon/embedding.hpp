#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "henon/grid.hpp"

namespace henon {

enum class EmbeddingKind { decay, interpolation, corollary1 };
const char* to_string(EmbeddingKind kind);
EmbeddingKind embedding_kind_from_string(const std::string& name);

struct EmbeddingSampleConfig {
  int fields = 64;
  int cells = 512;  // coarse grid; the refinement uses 2 * cells
  double grading = 2.0;
  GradingToward toward = GradingToward::boundary;
  double q = 4.0;        // interpolation, corollary1
  double weight = 1.0;   // decay: weight exponent b of |x|^-b
  std::uint64_t seed = 0;
};

struct EmbeddingReport {
  EmbeddingKind kind = EmbeddingKind::corollary1;
  int n = 4;
  double q = 0.0;
  double b = 0.0;  // gradient weight exponent actually used
  double max_ratio = 0.0, mean_ratio = 0.0;
  double max_ratio_refined = 0.0, mean_ratio_refined = 0.0;
  double growth = 0.0;  // max_ratio_refined / max_ratio
  bool pass = false;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Embedding weight: b = n - 2 - 2n/q.
double interpolation_weight(int n, double q);

/// Samples random smooth radial fields and reports LHS/RHS ratios of the chosen inequality:
///   decay:         sup_r |u(r)| r^{(n-b-2)/2}   vs (int |x|^-b |grad u|^2)^{1/2}
///   interpolation: (int |u|^q)^{1/q}            vs (int |x|^-b |grad u|^2)^{1/2}, b = n - 2 - 2n/q
///   corollary1:    (int |u|^q)^{1/q}            vs (int |x|^-a |grad u|^2)^{1/2}
/// pass iff every ratio is finite and the maximum grows by less than 2x on the refined grid.
EmbeddingReport verify_embedding(EmbeddingKind kind, int n, const EmbeddingSampleConfig& cfg);

}  // namespace henon
