#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "placenav/embedding.hpp"
#include "placenav/localization.hpp"
#include "placenav/subgoal.hpp"
#include "placenav/topo_map.hpp"

namespace placenav::sim {

/// Inclusive node range whose members all look alike.
struct BurstyRegion {
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const BurstyRegion&, const BurstyRegion&) = default;
};

struct WorldConfig {
  double length = 120.0;       // meters
  double node_spacing = 1.0;   // meters
  std::size_t dim = 64;
  double smoothing_alpha = 0.7;
  double bursty_perturbation = 0.01;
  std::vector<BurstyRegion> bursty_regions;

  std::size_t node_count() const;
  void validate() const;
};

/// 1-D route with one base embedding per node. Node s sits at arc position
/// s * node_spacing.
struct RouteWorld {
  WorldConfig config;
  std::uint64_t seed = 0;
  std::vector<EmbeddingVector> base;

  std::size_t goal() const noexcept { return base.size() - 1; }
  double length() const noexcept { return static_cast<double>(goal()) * config.node_spacing; }
  double node_position(std::size_t s) const noexcept {
    return static_cast<double>(s) * config.node_spacing;
  }
  /// Node whose arc position is closest, lower index at the midpoint.
  std::size_t nearest_node(double arc) const;

  /// Map recorded by a noise-free reference run through every node.
  TopologicalMap reference_map() const;
};

/// Smoothed random embedding field: e_0 is a random unit vector and
/// e_s = normalize(alpha * e_{s-1} + (1 - alpha) * g_s). All members of a
/// bursty region share one field vector plus a small per-node perturbation;
/// the field continues smoothly from that vector after the region.
RouteWorld generate_world(const WorldConfig& config, std::uint64_t seed);

/// Wraps existing map embeddings as a world (no bursty regions).
RouteWorld world_from_map(const TopologicalMap& map, double node_spacing);

struct ObservationModel {
  double noise_sigma = 0.0;  // per component, before renormalization
};

struct RobotState {
  double arc_position = 0.0;
  double speed = 1.0;  // meters per step
};

/// Linear blend of the two base embeddings around the robot, plus isotropic
/// Gaussian noise, renormalized to unit length.
EmbeddingVector observe(const RouteWorld& world, const ObservationModel& model,
                        const RobotState& robot, std::mt19937_64& rng);

/// Drives toward the subgoal node (backwards if it lies behind) by at most
/// `speed`, adds zero-mean motion noise and clamps to the route.
RobotState step_robot(const RobotState& robot, const SubgoalDecision& decision,
                      const RouteWorld& world, double motion_noise, std::mt19937_64& rng);

enum class FailureReason { kTimeout, kFalseGoalSignal, kStuck };

std::string to_string(FailureReason r);

struct PolicyConfig {
  ObservationModel observation;
  double speed = 1.0;
  double motion_noise = 0.0;
  double goal_tolerance = 1.0;  // meters from the goal node
  std::size_t stall_window = 50;
  double budget_factor = 4.0;

  void validate() const;
};

struct EpisodeResult {
  bool success = false;
  std::size_t steps = 0;
  std::size_t start_node = 0;
  std::vector<std::size_t> localization_error_series;
  std::vector<std::size_t> localized_series;
  std::vector<std::size_t> subgoal_series;
  std::optional<FailureReason> failure_reason;

  double mean_localization_error() const;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Step budget: budget_factor times the noise-free step count from `start_arc`.
std::size_t step_budget(const RouteWorld& world, const PolicyConfig& policy, double start_arc);

/// One navigation session. Every step is observe -> localize ->
/// decide_subgoal -> step_robot. Ends on a goal signal (success within
/// goal_tolerance of the last node, otherwise a false goal signal), when the
/// step budget runs out, or after stall_window steps with no forward progress.
EpisodeResult run_episode(const RouteWorld& world, const LocalizerConfig& localizer,
                          const PolicyConfig& policy, double start_arc, std::uint64_t seed);

/// Scenario presets used by the batch runner and the CLI.
enum class Scenario { kNominal, kBursty, kKidnapped };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

/// One cell of a batch grid: a scenario, a world recipe, a localizer and the
/// seeds to run. Seed i builds world `world_seed(i)` and runs episode seed i,
/// so cells sharing seeds are paired.
struct BatchCell {
  Scenario scenario = Scenario::kNominal;
  WorldConfig world;
  LocalizerConfig localizer;
  PolicyConfig policy;
  std::vector<std::uint64_t> seeds;
  /// When set, every seed reuses this world instead of generating one.
  std::optional<RouteWorld> fixed_world;
};

struct EpisodeRecord {
  std::string world_id;
  std::string selector;
  std::string scenario;
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t steps = 0;
  std::optional<FailureReason> failure_reason;
  double mean_loc_error = 0.0;
};

struct SummaryRow {
  std::string selector;
  std::string scenario;
  std::size_t episodes = 0;
  double success_rate = 0.0;
};

struct BatchResult {
  std::vector<EpisodeRecord> records;  // cell order, then seed order
  std::vector<SummaryRow> summary;     // one row per cell
};

std::uint64_t world_seed(std::uint64_t episode_seed);

/// Start position of an episode. Kidnapped starts are drawn in the middle
/// third of the route from a stream that depends only on the seed.
double start_position(Scenario scenario, const RouteWorld& world, std::uint64_t seed);

/// Runs every (cell, seed) episode, in parallel when `threads` > 1; output is
/// independent of the thread count.
BatchResult run_batch(const std::vector<BatchCell>& cells, unsigned threads = 0);

/// Applies the scenario's world preset (bursty region placement) to `base`.
WorldConfig scenario_world(Scenario scenario, WorldConfig base);

}  // namespace placenav::sim
