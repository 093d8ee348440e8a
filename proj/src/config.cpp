#include "placenav/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace placenav {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Block {
 public:
  Block(const json& doc, const char* name) : name_(name) {
    auto it = doc.find(name);
    if (it == doc.end()) return;
    if (!it->is_object()) throw InvalidArgument(std::string("config block '") + name + "' must be an object");
    block_ = &*it;
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!block_) return;
    auto it = block_->find(key);
    if (it == block_->end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config ") + name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    if (!block_) return;
    for (const auto& [k, v] : block_->items()) {
      if (!seen_.count(k)) throw InvalidArgument(std::string("unknown config key ") + name_ + "." + k);
    }
  }

 private:
  const char* name_;
  const json* block_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

void RunConfig::validate() const {
  localizer.validate();
  if (!(pairwise_threshold == pairwise_threshold)) throw InvalidArgument("pairwise_threshold is NaN");
  world.validate();
  sim::scenario_world(scenario, world).validate();
  policy.validate();
  if (episodes == 0) throw InvalidArgument("episodes must be positive");
  bench_config().validate();
  if (map_stride == 0) throw InvalidArgument("stride must be positive");
  if (!(positive_radius > 0.0)) throw InvalidArgument("positive radius must be > 0");
  if (recall_n == 0) throw InvalidArgument("recall n must be positive");
}

eval::BenchConfig RunConfig::bench_config() const {
  return {bench_counts, bench_dim, per_pair_flops, bench_repetitions, seed, pairwise_threshold};
}

void apply_json(RunConfig& c, const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config document must be a JSON object");
  static const std::set<std::string> kBlocks{"localizer", "subgoal", "simulator", "bench", "io"};
  for (const auto& [k, v] : doc.items()) {
    if (!kBlocks.count(k)) throw InvalidArgument("unknown config block '" + k + "'");
  }

  Block loc(doc, "localizer");
  std::string selector = to_string(c.localizer.selector);
  loc.read("selector", selector);
  c.localizer.selector = parse_selector(selector);
  loc.read("w_l", c.localizer.motion.w_l);
  loc.read("w_u", c.localizer.motion.w_u);
  loc.read("kappa", c.localizer.kappa);
  loc.read("window_size", c.localizer.window_size);
  loc.read("epsilon_uniform", c.localizer.motion.epsilon_uniform);
  loc.read("window_start", c.localizer.window_start);
  loc.finish();

  Block sub(doc, "subgoal");
  sub.read("pairwise_threshold", c.pairwise_threshold);
  sub.read("per_pair_flops", c.per_pair_flops);
  sub.finish();

  Block sim(doc, "simulator");
  std::string scenario = sim::to_string(c.scenario);
  sim.read("scenario", scenario);
  c.scenario = sim::parse_scenario(scenario);
  sim.read("length", c.world.length);
  sim.read("node_spacing", c.world.node_spacing);
  sim.read("dim", c.world.dim);
  sim.read("smoothing_alpha", c.world.smoothing_alpha);
  sim.read("bursty_perturbation", c.world.bursty_perturbation);
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  for (const auto& r : c.world.bursty_regions) regions.emplace_back(r.first, r.last);
  sim.read("bursty_regions", regions);
  c.world.bursty_regions.clear();
  for (const auto& [first, last] : regions) c.world.bursty_regions.push_back({first, last});
  sim.read("noise_sigma", c.policy.observation.noise_sigma);
  sim.read("speed", c.policy.speed);
  sim.read("motion_noise", c.policy.motion_noise);
  sim.read("goal_tolerance", c.policy.goal_tolerance);
  sim.read("stall_window", c.policy.stall_window);
  sim.read("budget_factor", c.policy.budget_factor);
  sim.read("episodes", c.episodes);
  sim.finish();

  Block bench(doc, "bench");
  bench.read("candidate_counts", c.bench_counts);
  bench.read("dim", c.bench_dim);
  bench.read("repetitions", c.bench_repetitions);
  bench.finish();

  Block io(doc, "io");
  io.read("seed", c.seed);
  std::string out = c.out.string();
  io.read("out", out);
  c.out = out;
  std::string format = c.format == eval::ReportFormat::kJson ? "json" : "csv";
  io.read("format", format);
  c.format = eval::parse_format(format);
  io.read("stride", c.map_stride);
  io.read("positive_radius", c.positive_radius);
  io.read("recall_n", c.recall_n);
  io.finish();
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  apply_json(config, doc);
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["localizer"] = {{"selector", to_string(c.localizer.selector)},
                    {"w_l", c.localizer.motion.w_l},
                    {"w_u", c.localizer.motion.w_u},
                    {"kappa", c.localizer.kappa},
                    {"window_size", c.localizer.window_size},
                    {"epsilon_uniform", c.localizer.motion.epsilon_uniform},
                    {"window_start", c.localizer.window_start}};
  j["subgoal"] = {{"pairwise_threshold", c.pairwise_threshold}, {"per_pair_flops", c.per_pair_flops}};
  ordered_json regions = ordered_json::array();
  for (const auto& r : c.world.bursty_regions) regions.push_back({r.first, r.last});
  j["simulator"] = {{"scenario", sim::to_string(c.scenario)},
                    {"length", c.world.length},
                    {"node_spacing", c.world.node_spacing},
                    {"dim", c.world.dim},
                    {"smoothing_alpha", c.world.smoothing_alpha},
                    {"bursty_perturbation", c.world.bursty_perturbation},
                    {"bursty_regions", regions},
                    {"noise_sigma", c.policy.observation.noise_sigma},
                    {"speed", c.policy.speed},
                    {"motion_noise", c.policy.motion_noise},
                    {"goal_tolerance", c.policy.goal_tolerance},
                    {"stall_window", c.policy.stall_window},
                    {"budget_factor", c.policy.budget_factor},
                    {"episodes", c.episodes}};
  j["bench"] = {{"candidate_counts", c.bench_counts},
                {"dim", c.bench_dim},
                {"repetitions", c.bench_repetitions}};
  j["io"] = {{"seed", c.seed},
             {"out", c.out.string()},
             {"format", c.format == eval::ReportFormat::kJson ? "json" : "csv"},
             {"stride", c.map_stride},
             {"positive_radius", c.positive_radius},
             {"recall_n", c.recall_n}};
  return j;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto doc = to_json(config);
  doc["io"].erase("out");
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace placenav
