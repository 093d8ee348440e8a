#include "placenav/subgoal.hpp"

#include <algorithm>

namespace placenav {

SubgoalDecision decide_subgoal(std::size_t localized_node, std::size_t goal_node) {
  if (localized_node > goal_node) {
    throw InvalidArgument("localized node " + std::to_string(localized_node) +
                          " beyond goal node " + std::to_string(goal_node));
  }
  return {localized_node, std::min(localized_node + 1, goal_node), localized_node == goal_node};
}

SubgoalDecision decide_subgoal(std::size_t localized_node, const TopologicalMap& map) {
  return decide_subgoal(localized_node, map.goal());
}

double synthetic_work(std::uint64_t flops, double seed) {
  // One multiply and one add per iteration, each depending on the last.
  volatile double sink = seed;
  double x = seed;
  for (std::uint64_t i = 0; i < flops / 2; ++i) x = x * 0.999999999 + 1e-9;
  sink = x;
  return sink;
}

double PairwiseScorerStub::evaluate(std::span<const float> observation,
                                    std::span<const float> candidate) const {
  synthetic_work(per_pair_flops, candidate.empty() ? 0.0 : candidate[0]);
  return temporal_distance ? temporal_distance(observation, candidate)
                           : temporal_scale * l2_distance(observation, candidate);
}

std::size_t select_by_temporal_distance(std::span<const std::size_t> candidates,
                                        std::span<const double> temporal_distances,
                                        double threshold) {
  if (candidates.empty()) throw InvalidArgument("pairwise selection over no candidates");
  if (candidates.size() != temporal_distances.size()) {
    throw InvalidArgument("candidate and temporal-distance lists differ in length");
  }
  std::size_t above = candidates.size();
  std::size_t below = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double dt = temporal_distances[i];
    if (dt >= threshold) {
      if (above == candidates.size() || dt < temporal_distances[above]) above = i;
    } else if (below == candidates.size() || dt > temporal_distances[below]) {
      below = i;
    }
  }
  return candidates[above != candidates.size() ? above : below];
}

PairwiseSelection pairwise_select(const EmbeddingVector& observation,
                                  std::span<const std::size_t> candidates,
                                  const TopologicalMap& map, const PairwiseScorerStub& stub,
                                  double threshold) {
  if (candidates.empty()) throw InvalidArgument("pairwise selection over no candidates");
  PairwiseSelection out{0, 0, {}};
  out.temporal_distances.reserve(candidates.size());
  for (std::size_t node : candidates) {
    out.temporal_distances.push_back(stub.evaluate(observation.values(), map.store().row(node)));
    ++out.evaluations;
  }
  out.node = select_by_temporal_distance(candidates, out.temporal_distances, threshold);
  return out;
}

}  // namespace placenav
