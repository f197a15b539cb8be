#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/embedding.hpp"
#include "henon/sweep.hpp"

namespace henon {

/// Everything a CLI run needs. Parsed from one JSON object; unknown keys are rejected.
struct RunConfig {
  AmbientSpec ambient = AmbientSpec::make(4);
  nlohmann::json nonlinearity = {{"family", "power"}, {"p", 4}};
  std::vector<double> alphas{8, 12, 16, 20, 24, 28};
  GridConfig grid;
  DescentConfig descent;
  TestFunctionSpec test_function;
  EmbeddingKind embedding_kind = EmbeddingKind::corollary1;
  EmbeddingSampleConfig embedding;
  int refine = 8;
  double margin = 0.01;
  double shooting_tol = 1e-10;
  std::string out = "runs";
  std::uint64_t seed = 0;
  int jobs = 0;  // 0: available parallelism

  [[nodiscard]] Nonlinearity make_nonlinearity() const;
  [[nodiscard]] SweepOptions sweep_options() const;
  /// Runs every module's parameter checks; throws ConfigError.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// "8,12,16" -> {8, 12, 16}; throws ConfigError on junk.
std::vector<double> parse_alpha_list(const std::string& text);

}  // namespace henon
