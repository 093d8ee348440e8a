#include "placenav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace placenav::sim {

namespace {

constexpr double kUnitTolerance = 1e-12;

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

// Leaves vectors that are already unit length untouched so that repeated
// normalization is a fixed point.
void normalize(std::vector<double>& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (norm == 0.0 || std::abs(norm - 1.0) <= kUnitTolerance) return;
  for (double& x : v) x /= norm;
}

EmbeddingVector to_embedding(const std::vector<double>& v) {
  return EmbeddingVector(std::vector<float>(v.begin(), v.end()));
}

std::vector<double> to_double(const EmbeddingVector& e) {
  return {e.values().begin(), e.values().end()};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t WorldConfig::node_count() const {
  return static_cast<std::size_t>(std::floor(length / node_spacing + 1e-9)) + 1;
}

void WorldConfig::validate() const {
  if (!(node_spacing > 0.0) || !std::isfinite(node_spacing)) {
    throw InvalidArgument("node_spacing must be positive");
  }
  if (!(length >= 2.0 * node_spacing) || !std::isfinite(length)) {
    throw InvalidArgument("route length must be at least two node spacings");
  }
  if (dim == 0) throw InvalidArgument("embedding dim must be positive");
  if (!(smoothing_alpha >= 0.0 && smoothing_alpha <= 1.0)) {
    throw InvalidArgument("smoothing_alpha must lie in [0, 1]");
  }
  if (!(bursty_perturbation >= 0.0)) throw InvalidArgument("bursty_perturbation must be >= 0");
  const std::size_t last = node_count() - 1;
  for (const auto& r : bursty_regions) {
    if (r.first > r.last || r.last > last) {
      throw InvalidArgument("bursty region [" + std::to_string(r.first) + ", " +
                            std::to_string(r.last) + "] outside [0, " + std::to_string(last) + "]");
    }
  }
}

std::size_t RouteWorld::nearest_node(double arc) const {
  const double u = std::clamp(arc / config.node_spacing, 0.0, static_cast<double>(goal()));
  auto k = static_cast<std::size_t>(std::floor(u));
  if (u - static_cast<double>(k) > 0.5) ++k;
  return std::min(k, goal());
}

TopologicalMap RouteWorld::reference_map() const {
  std::vector<RouteSample> samples;
  samples.reserve(base.size());
  for (std::size_t s = 0; s < base.size(); ++s) {
    samples.push_back({base[s], Point2{node_position(s), 0.0}, std::nullopt, std::nullopt});
  }
  return TopologicalMap(std::move(samples));
}

RouteWorld generate_world(const WorldConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const std::size_t n = config.node_count();
  const double alpha = config.smoothing_alpha;

  const auto region_of = [&](std::size_t s) -> const BurstyRegion* {
    for (const auto& r : config.bursty_regions) {
      if (s >= r.first && s <= r.last) return &r;
    }
    return nullptr;
  };

  // The smoothed field is generated node by node. Entering a bursty region
  // freezes it: the first member's vector is shared by the whole region and
  // only the per-node perturbation differs. Smoothing resumes from the
  // shared vector after the region.
  std::vector<std::vector<double>> field;
  field.reserve(n);
  std::vector<double> carrier = random_unit(config.dim, rng);
  for (std::size_t s = 0; s < n; ++s) {
    const BurstyRegion* region = region_of(s);
    if (s > 0 && (!region || s == region->first)) {
      const auto g = random_unit(config.dim, rng);
      for (std::size_t i = 0; i < config.dim; ++i) carrier[i] = alpha * carrier[i] + (1.0 - alpha) * g[i];
      normalize(carrier);
    }
    if (!region) {
      field.push_back(carrier);
      continue;
    }
    const auto direction = random_unit(config.dim, rng);
    std::vector<double> e(config.dim);
    for (std::size_t i = 0; i < config.dim; ++i) {
      e[i] = carrier[i] + config.bursty_perturbation * direction[i];
    }
    normalize(e);
    field.push_back(std::move(e));
  }

  RouteWorld world{config, seed, {}};
  world.base.reserve(n);
  for (const auto& e : field) world.base.push_back(to_embedding(e));
  return world;
}

RouteWorld world_from_map(const TopologicalMap& map, double node_spacing) {
  WorldConfig config;
  config.node_spacing = node_spacing;
  config.length = static_cast<double>(map.goal()) * node_spacing;
  config.dim = map.dim();
  RouteWorld world{config, 0, {}};
  for (const auto& node : map.nodes()) world.base.push_back(node.embedding);
  return world;
}

EmbeddingVector observe(const RouteWorld& world, const ObservationModel& model,
                        const RobotState& robot, std::mt19937_64& rng) {
  const double u =
      std::clamp(robot.arc_position / world.config.node_spacing, 0.0, static_cast<double>(world.goal()));
  auto k = static_cast<std::size_t>(std::floor(u));
  double t = u - static_cast<double>(k);
  if (k >= world.goal()) {
    k = world.goal();
    t = 0.0;
  }
  if (t == 0.0 && model.noise_sigma == 0.0) return world.base[k];

  std::vector<double> v = to_double(world.base[k]);
  if (t > 0.0) {
    const auto next = world.base[k + 1].values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - t) * v[i] + t * next[i];
  }
  if (model.noise_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, model.noise_sigma);
    for (double& x : v) x += gauss(rng);
  }
  normalize(v);
  return to_embedding(v);
}

RobotState step_robot(const RobotState& robot, const SubgoalDecision& decision,
                      const RouteWorld& world, double motion_noise, std::mt19937_64& rng) {
  if (decision.subgoal_node > world.goal()) throw InvalidArgument("subgoal beyond the route");
  const double delta = world.node_position(decision.subgoal_node) - robot.arc_position;
  const double travel = std::min(robot.speed, std::abs(delta));
  double arc = robot.arc_position + (delta < 0.0 ? -travel : travel);
  if (motion_noise > 0.0) arc += std::normal_distribution<double>(0.0, motion_noise)(rng);
  return {std::clamp(arc, 0.0, world.length()), robot.speed};
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::kTimeout: return "timeout";
    case FailureReason::kFalseGoalSignal: return "false_goal_signal";
    case FailureReason::kStuck: return "stuck";
  }
  return "unknown";
}

void PolicyConfig::validate() const {
  if (!(observation.noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
  if (!(speed > 0.0)) throw InvalidArgument("speed must be positive");
  if (!(motion_noise >= 0.0)) throw InvalidArgument("motion_noise must be >= 0");
  if (!(goal_tolerance >= 0.0)) throw InvalidArgument("goal_tolerance must be >= 0");
  if (stall_window == 0) throw InvalidArgument("stall_window must be positive");
  if (!(budget_factor >= 1.0)) throw InvalidArgument("budget_factor must be >= 1");
}

double EpisodeResult::mean_localization_error() const {
  if (localization_error_series.empty()) return 0.0;
  const double sum = std::accumulate(localization_error_series.begin(),
                                     localization_error_series.end(), 0.0);
  return sum / static_cast<double>(localization_error_series.size());
}

std::size_t step_budget(const RouteWorld& world, const PolicyConfig& policy, double start_arc) {
  const double remaining = std::max(world.length() - start_arc, 0.0);
  const double optimal = std::max(1.0, std::ceil(remaining / policy.speed));
  return static_cast<std::size_t>(std::ceil(policy.budget_factor * optimal));
}

EpisodeResult run_episode(const RouteWorld& world, const LocalizerConfig& localizer_config,
                          const PolicyConfig& policy, double start_arc, std::uint64_t seed) {
  policy.validate();
  if (!(start_arc >= 0.0 && start_arc <= world.length())) {
    throw InvalidArgument("start position outside the route");
  }
  const TopologicalMap map = world.reference_map();
  Localizer localizer(localizer_config, map);
  std::mt19937_64 rng(seed);

  RobotState robot{start_arc, policy.speed};
  EpisodeResult result;
  result.start_node = world.nearest_node(start_arc);
  const std::size_t budget = step_budget(world, policy, start_arc);
  double best_progress = robot.arc_position;
  std::size_t since_progress = 0;

  for (std::size_t step = 1; step <= budget; ++step) {
    result.steps = step;
    const EmbeddingVector obs = observe(world, policy.observation, robot, rng);
    const std::size_t best = localizer.localize(obs);
    const std::size_t truth = world.nearest_node(robot.arc_position);
    result.localized_series.push_back(best);
    result.localization_error_series.push_back(best > truth ? best - truth : truth - best);

    const SubgoalDecision decision = decide_subgoal(best, map);
    result.subgoal_series.push_back(decision.subgoal_node);
    if (decision.goal_reached) {
      if (std::abs(world.length() - robot.arc_position) <= policy.goal_tolerance) {
        result.success = true;
      } else {
        result.failure_reason = FailureReason::kFalseGoalSignal;
      }
      return result;
    }

    robot = step_robot(robot, decision, world, policy.motion_noise, rng);
    if (robot.arc_position > best_progress + 1e-9) {
      best_progress = robot.arc_position;
      since_progress = 0;
    } else if (++since_progress >= policy.stall_window) {
      result.failure_reason = FailureReason::kStuck;
      return result;
    }
  }
  result.failure_reason = FailureReason::kTimeout;
  return result;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kNominal: return "nominal";
    case Scenario::kBursty: return "bursty";
    case Scenario::kKidnapped: return "kidnapped";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "nominal") return Scenario::kNominal;
  if (name == "bursty") return Scenario::kBursty;
  if (name == "kidnapped") return Scenario::kKidnapped;
  throw InvalidArgument("unknown scenario '" + name + "' (expected nominal|bursty|kidnapped)");
}

WorldConfig scenario_world(Scenario scenario, WorldConfig base) {
  if (scenario == Scenario::kBursty && base.bursty_regions.empty()) {
    const std::size_t n = base.node_count();
    constexpr std::size_t kRegionNodes = 10;
    if (n < kRegionNodes + 4) throw InvalidArgument("route too short for a bursty region");
    const std::size_t first = (n - kRegionNodes) / 2;
    base.bursty_regions.push_back({first, first + kRegionNodes - 1});
  }
  return base;
}

std::uint64_t world_seed(std::uint64_t episode_seed) { return splitmix64(episode_seed); }

double start_position(Scenario scenario, const RouteWorld& world, std::uint64_t seed) {
  if (scenario != Scenario::kKidnapped) return 0.0;
  std::mt19937_64 rng(splitmix64(seed ^ 0x6B69646E61707065ULL));
  return std::uniform_real_distribution<double>(world.length() / 3.0,
                                                2.0 * world.length() / 3.0)(rng);
}

BatchResult run_batch(const std::vector<BatchCell>& cells, unsigned threads) {
  if (cells.empty()) throw InvalidArgument("batch grid is empty");
  struct Job {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].seeds.empty()) {
      throw InvalidArgument("batch cell " + std::to_string(c) + " has no episodes");
    }
    if (!cells[c].fixed_world) cells[c].world.validate();
    cells[c].localizer.validate();
    cells[c].policy.validate();
    for (auto s : cells[c].seeds) jobs.push_back({c, s});
  }

  std::vector<EpisodeRecord> records(jobs.size());
  auto run_job = [&](std::size_t j) {
    const BatchCell& cell = cells[jobs[j].cell];
    const std::uint64_t seed = jobs[j].seed;
    const std::uint64_t wseed = world_seed(seed);
    const RouteWorld world = cell.fixed_world ? *cell.fixed_world : generate_world(cell.world, wseed);
    const EpisodeResult r =
        run_episode(world, cell.localizer, cell.policy, start_position(cell.scenario, world, seed), seed);
    records[j] = {cell.fixed_world ? std::string("map") : to_string(cell.scenario) + "-" + std::to_string(wseed),
                  to_string(cell.localizer.selector),
                  to_string(cell.scenario),
                  seed,
                  r.success,
                  r.steps,
                  r.failure_reason,
                  r.mean_localization_error()};
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t j = t; j < jobs.size(); j += threads) run_job(j);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BatchResult out;
  out.records = std::move(records);
  std::size_t offset = 0;
  for (const auto& cell : cells) {
    std::size_t successes = 0;
    for (std::size_t i = 0; i < cell.seeds.size(); ++i) successes += out.records[offset + i].success;
    offset += cell.seeds.size();
    out.summary.push_back({to_string(cell.localizer.selector), to_string(cell.scenario),
                           cell.seeds.size(),
                           static_cast<double>(successes) / static_cast<double>(cell.seeds.size())});
  }
  return out;
}

}  // namespace placenav::sim
