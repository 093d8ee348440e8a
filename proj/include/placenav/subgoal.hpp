#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "placenav/embedding.hpp"
#include "placenav/topo_map.hpp"

namespace placenav {

struct SubgoalDecision {
  std::size_t localized_node = 0;
  std::size_t subgoal_node = 0;
  bool goal_reached = false;

  friend bool operator==(const SubgoalDecision&, const SubgoalDecision&) = default;
};

/// The subgoal is the node after the localized one; localizing at the goal
/// raises the stop signal.
SubgoalDecision decide_subgoal(std::size_t localized_node, std::size_t goal_node);
SubgoalDecision decide_subgoal(std::size_t localized_node, const TopologicalMap& map);

/// Burns roughly `flops` floating-point operations and returns a value that
/// depends on all of them.
double synthetic_work(std::uint64_t flops, double seed);

using TemporalDistanceFn = std::function<double(std::span<const float>, std::span<const float>)>;

/// Surrogate for a pairwise temporal-distance network: every (observation,
/// candidate) pair costs `per_pair_flops` of synthetic work plus one call of
/// `temporal_distance`. Defaults to `temporal_scale * L2 distance`.
struct PairwiseScorerStub {
  std::uint64_t per_pair_flops = 2'000'000;
  double temporal_scale = 10.0;
  TemporalDistanceFn temporal_distance;

  double evaluate(std::span<const float> observation, std::span<const float> candidate) const;
};

inline constexpr double kDefaultPairwiseThreshold = 3.0;

struct PairwiseSelection {
  std::size_t node;
  std::size_t evaluations;
  std::vector<double> temporal_distances;
};

/// Among candidates whose surrogate dt is at least `threshold`, picks the one
/// with the smallest dt; if none qualifies, the one with the largest dt.
/// Ties go to the earlier candidate in the list.
PairwiseSelection pairwise_select(const EmbeddingVector& observation,
                                  std::span<const std::size_t> candidates,
                                  const TopologicalMap& map, const PairwiseScorerStub& stub,
                                  double threshold = kDefaultPairwiseThreshold);

/// Selection rule alone, over precomputed dt values aligned with `candidates`.
std::size_t select_by_temporal_distance(std::span<const std::size_t> candidates,
                                        std::span<const double> temporal_distances,
                                        double threshold);

}  // namespace placenav
