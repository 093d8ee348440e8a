#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "placenav/eval.hpp"
#include "placenav/localization.hpp"
#include "placenav/simulator.hpp"

namespace placenav {

/// Everything a CLI run needs. Defaults follow the deployed system:
/// w_u = 2, w_l = -1, window 5, pairwise threshold 3, 512-d descriptors
/// for the runtime benchmark.
struct RunConfig {
  LocalizerConfig localizer;

  double pairwise_threshold = kDefaultPairwiseThreshold;
  std::uint64_t per_pair_flops = 2'000'000;

  sim::Scenario scenario = sim::Scenario::kNominal;
  sim::WorldConfig world;
  sim::PolicyConfig policy{sim::ObservationModel{0.1}};
  std::size_t episodes = 100;

  std::vector<std::size_t> bench_counts{5, 21, 101};
  std::size_t bench_dim = 512;
  std::size_t bench_repetitions = 5;

  std::size_t map_stride = 1;
  double positive_radius = eval::kDefaultPositiveRadius;
  std::size_t recall_n = 1;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  eval::ReportFormat format = eval::ReportFormat::kJson;

  void validate() const;
  eval::BenchConfig bench_config() const;
};

/// Overlays a JSON document onto `config`. Blocks: "localizer", "subgoal",
/// "simulator", "bench", "io". Unknown keys are rejected.
void apply_json(RunConfig& config, const nlohmann::json& doc);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunConfig& config);

/// FNV-1a 64 of the canonical JSON dump (output directory excluded), as 16
/// hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace placenav
