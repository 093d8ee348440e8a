#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "placenav/embedding.hpp"
#include "placenav/topo_map.hpp"

namespace placenav {

/// Posterior p(s) over map nodes.
struct BeliefState {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double total() const;
  /// Highest-probability node, lowest index on ties.
  std::size_t best() const;

  static BeliefState uniform(std::size_t n);
  static BeliefState delta(std::size_t n, std::size_t at);
};

/// Throws InvalidArgument if any entry is negative or non-finite, or the sum
/// is further than `tolerance` from 1.
void validate_belief(const BeliefState& belief, double tolerance = 1e-9);

/// Uniform transition over node offsets [w_l, w_u] (new index minus old).
/// `epsilon_uniform` optionally blends in a uniform jump to any node.
struct MotionModel {
  int w_l = -1;
  int w_u = 2;
  double epsilon_uniform = 0.0;

  int kernel_width() const noexcept { return w_u - w_l + 1; }
  void validate() const;
};

/// Likelihood exp(-lambda1 * distance).
struct MeasurementModel {
  double lambda1 = 1.0;

  void validate() const;
};

struct WindowState {
  std::size_t center = 0;
  std::size_t width = 5;

  void validate(std::size_t node_count) const;
};

/// Propagates the belief through the motion model. Offsets that leave
/// [0, S] land on the nearest end node, so total mass is conserved.
BeliefState predict(const BeliefState& belief, const MotionModel& motion);

std::vector<double> likelihood_from_distances(std::span<const double> distances,
                                              const MeasurementModel& meas);
std::vector<double> measurement_likelihood(const EmbeddingVector& observation,
                                           const TopologicalMap& map,
                                           const MeasurementModel& meas);

/// Normalized prior * likelihood. Throws FilterDivergence if the product is
/// identically zero.
BeliefState update(const BeliefState& prior, std::span<const double> likelihood);

inline constexpr double kDefaultKappa = 4.0;

/// lambda1 = ln(kappa) / (mean(d) - min(d)), so a node at the mean distance
/// is kappa times less likely than the closest one. Falls back to 1.0 when
/// the spread is below 1e-9.
MeasurementModel calibrate_lambda1(std::span<const double> first_profile,
                                   double kappa = kDefaultKappa);

struct BayesInit {
  BeliefState belief;
  MeasurementModel measurement;
};

/// First query of a session: calibrates lambda1 and starts from the
/// normalized measurement likelihood, with no assumption about the start node.
BayesInit bayes_localize_init(const EmbeddingVector& observation, const TopologicalMap& map,
                              double kappa = kDefaultKappa);

struct BayesStep {
  BeliefState belief;
  std::size_t best_node;
};

BayesStep bayes_localize_step(const BeliefState& state, const EmbeddingVector& observation,
                              const TopologicalMap& map, const MotionModel& motion,
                              const MeasurementModel& meas);

/// Inclusive candidate range [first, last] of a window, clipped to the map.
std::pair<std::size_t, std::size_t> window_candidates(const WindowState& state,
                                                      std::size_t node_count);

struct WindowStep {
  WindowState state;
  std::size_t best_node;
};

WindowStep window_localize_step(const WindowState& state, const EmbeddingVector& observation,
                                const TopologicalMap& map);

std::size_t global_localize_step(const EmbeddingVector& observation, const TopologicalMap& map);

enum class Selector { kBayes, kWindow, kGlobal };

std::string to_string(Selector s);
/// Throws InvalidArgument on an unknown name.
Selector parse_selector(const std::string& name);

struct LocalizerConfig {
  Selector selector = Selector::kBayes;
  MotionModel motion;
  double kappa = kDefaultKappa;
  std::size_t window_size = 5;
  /// Node the sliding window is centered on before the first query.
  std::size_t window_start = 0;

  void validate() const;
};

/// Stateful driver over the step functions for one navigation session.
/// Must be stepped sequentially.
class Localizer {
 public:
  Localizer(LocalizerConfig config, const TopologicalMap& map);

  std::size_t localize(const EmbeddingVector& observation);

  const LocalizerConfig& config() const noexcept { return config_; }
  const std::optional<BeliefState>& belief() const noexcept { return belief_; }
  const std::optional<MeasurementModel>& measurement() const noexcept { return measurement_; }
  const WindowState& window() const noexcept { return window_; }

 private:
  LocalizerConfig config_;
  const TopologicalMap* map_;
  std::optional<BeliefState> belief_;
  std::optional<MeasurementModel> measurement_;
  WindowState window_;
};

}  // namespace placenav
