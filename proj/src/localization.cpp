#include "placenav/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace placenav {

namespace {

constexpr double kUnderflowFloor = 1e-300;
constexpr double kDegenerateSpread = 1e-9;

void check_length(std::size_t belief, std::size_t nodes) {
  if (belief != nodes) {
    throw InvalidArgument("belief over " + std::to_string(belief) + " nodes used with a map of " +
                          std::to_string(nodes));
  }
}

}  // namespace

double BeliefState::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

std::size_t BeliefState::best() const { return argmax(probs); }

BeliefState BeliefState::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("belief over zero nodes");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

BeliefState BeliefState::delta(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidArgument("delta belief index out of range");
  BeliefState b{std::vector<double>(n, 0.0)};
  b.probs[at] = 1.0;
  return b;
}

void validate_belief(const BeliefState& belief, double tolerance) {
  if (belief.probs.empty()) throw InvalidArgument("belief over zero nodes");
  for (double p : belief.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("belief entry negative or not finite");
  }
  const double sum = belief.total();
  if (std::abs(sum - 1.0) > tolerance) {
    throw InvalidArgument("belief sums to " + std::to_string(sum));
  }
}

void MotionModel::validate() const {
  if (w_l > w_u) {
    throw InvalidArgument("motion model needs w_l <= w_u (got w_l=" + std::to_string(w_l) +
                          ", w_u=" + std::to_string(w_u) + ")");
  }
  if (!(epsilon_uniform >= 0.0 && epsilon_uniform <= 1.0)) {
    throw InvalidArgument("epsilon_uniform must lie in [0, 1]");
  }
}

void MeasurementModel::validate() const {
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
    throw InvalidArgument("lambda1 must be positive and finite");
  }
}

void WindowState::validate(std::size_t node_count) const {
  if (width == 0 || width % 2 == 0) throw InvalidArgument("window width must be odd and positive");
  if (center >= node_count) throw InvalidArgument("window center outside the map");
}

BeliefState predict(const BeliefState& belief, const MotionModel& motion) {
  motion.validate();
  const std::size_t n = belief.size();
  if (n == 0) throw InvalidArgument("belief over zero nodes");
  const auto last = static_cast<long long>(n) - 1;
  const double share_scale = 1.0 / static_cast<double>(motion.kernel_width());

  BeliefState out{std::vector<double>(n, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    const double mass = belief.probs[j];
    if (mass == 0.0) continue;
    const double share = mass * share_scale;
    for (int offset = motion.w_l; offset <= motion.w_u; ++offset) {
      const long long target = std::clamp(static_cast<long long>(j) + offset, 0LL, last);
      out.probs[static_cast<std::size_t>(target)] += share;
    }
  }
  if (motion.epsilon_uniform > 0.0) {
    const double floor = motion.epsilon_uniform / static_cast<double>(n);
    for (double& p : out.probs) p = (1.0 - motion.epsilon_uniform) * p + floor;
  }
  return out;
}

std::vector<double> likelihood_from_distances(std::span<const double> distances,
                                              const MeasurementModel& meas) {
  meas.validate();
  std::vector<double> out(distances.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(-meas.lambda1 * distances[i]);
  return out;
}

std::vector<double> measurement_likelihood(const EmbeddingVector& observation,
                                           const TopologicalMap& map,
                                           const MeasurementModel& meas) {
  return likelihood_from_distances(distance_profile(observation, map.store()), meas);
}

BeliefState update(const BeliefState& prior, std::span<const double> likelihood) {
  check_length(prior.size(), likelihood.size());
  for (double l : likelihood) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("likelihood entry negative or not finite");
  }

  BeliefState post{std::vector<double>(prior.size())};
  for (std::size_t i = 0; i < post.size(); ++i) post.probs[i] = prior.probs[i] * likelihood[i];

  if (*std::max_element(post.probs.begin(), post.probs.end()) < kUnderflowFloor) {
    const double peak = *std::max_element(likelihood.begin(), likelihood.end());
    if (peak > 0.0) {
      for (std::size_t i = 0; i < post.size(); ++i) {
        post.probs[i] = prior.probs[i] * (likelihood[i] / peak);
      }
    }
  }

  const double sum = post.total();
  if (!(sum > 0.0)) throw FilterDivergence("posterior is zero at every node");
  for (double& p : post.probs) p /= sum;
  return post;
}

MeasurementModel calibrate_lambda1(std::span<const double> first_profile, double kappa) {
  if (first_profile.size() < 2) throw InvalidArgument("lambda1 calibration needs >= 2 distances");
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be > 1");
  for (double d : first_profile) {
    if (!std::isfinite(d)) throw InvalidArgument("non-finite distance in calibration profile");
  }
  const double lo = *std::min_element(first_profile.begin(), first_profile.end());
  const double mean = std::accumulate(first_profile.begin(), first_profile.end(), 0.0) /
                      static_cast<double>(first_profile.size());
  const double spread = mean - lo;
  if (spread < kDegenerateSpread) return {1.0};
  return {std::log(kappa) / spread};
}

BayesInit bayes_localize_init(const EmbeddingVector& observation, const TopologicalMap& map,
                              double kappa) {
  const auto profile = distance_profile(observation, map.store());
  const MeasurementModel meas = calibrate_lambda1(profile, kappa);
  const auto likelihood = likelihood_from_distances(profile, meas);
  return {update(BeliefState::uniform(map.size()), likelihood), meas};
}

BayesStep bayes_localize_step(const BeliefState& state, const EmbeddingVector& observation,
                              const TopologicalMap& map, const MotionModel& motion,
                              const MeasurementModel& meas) {
  check_length(state.size(), map.size());
  const BeliefState prior = predict(state, motion);
  BeliefState post = update(prior, measurement_likelihood(observation, map, meas));
  const std::size_t best = post.best();
  return {std::move(post), best};
}

std::pair<std::size_t, std::size_t> window_candidates(const WindowState& state,
                                                      std::size_t node_count) {
  state.validate(node_count);
  const std::size_t half = state.width / 2;
  const std::size_t first = state.center > half ? state.center - half : 0;
  const std::size_t last = std::min(state.center + half, node_count - 1);
  return {first, last};
}

WindowStep window_localize_step(const WindowState& state, const EmbeddingVector& observation,
                                const TopologicalMap& map) {
  const auto [first, last] = window_candidates(state, map.size());
  std::size_t best = first;
  double best_distance = l2_distance(observation.values(), map.store().row(first));
  for (std::size_t i = first + 1; i <= last; ++i) {
    const double d = l2_distance(observation.values(), map.store().row(i));
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return {{best, state.width}, best};
}

std::size_t global_localize_step(const EmbeddingVector& observation, const TopologicalMap& map) {
  return argmin(distance_profile(observation, map.store()));
}

std::string to_string(Selector s) {
  switch (s) {
    case Selector::kBayes: return "bayes";
    case Selector::kWindow: return "window";
    case Selector::kGlobal: return "global";
  }
  return "unknown";
}

Selector parse_selector(const std::string& name) {
  if (name == "bayes") return Selector::kBayes;
  if (name == "window") return Selector::kWindow;
  if (name == "global") return Selector::kGlobal;
  throw InvalidArgument("unknown selector '" + name + "' (expected bayes|window|global)");
}

void LocalizerConfig::validate() const {
  motion.validate();
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be > 1");
  if (window_size == 0 || window_size % 2 == 0) {
    throw InvalidArgument("window_size must be odd and positive");
  }
}

Localizer::Localizer(LocalizerConfig config, const TopologicalMap& map)
    : config_(config), map_(&map), window_{config.window_start, config.window_size} {
  config_.validate();
  window_.validate(map.size());
}

std::size_t Localizer::localize(const EmbeddingVector& observation) {
  switch (config_.selector) {
    case Selector::kBayes: {
      if (!belief_) {
        auto init = bayes_localize_init(observation, *map_, config_.kappa);
        belief_ = std::move(init.belief);
        measurement_ = init.measurement;
        return belief_->best();
      }
      auto step = bayes_localize_step(*belief_, observation, *map_, config_.motion, *measurement_);
      belief_ = std::move(step.belief);
      return step.best_node;
    }
    case Selector::kWindow: {
      auto step = window_localize_step(window_, observation, *map_);
      window_ = step.state;
      return step.best_node;
    }
    case Selector::kGlobal:
      return global_localize_step(observation, *map_);
  }
  return 0;
}

}  // namespace placenav
