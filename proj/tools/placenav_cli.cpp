// placenav: build maps, run simulated navigation batches, evaluate retrieval
// recall and benchmark subgoal-selection runtime.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "placenav/config.hpp"
#include "placenav/embedding_io.hpp"
#include "placenav/eval.hpp"
#include "placenav/simulator.hpp"
#include "placenav/topo_map.hpp"

namespace fs = std::filesystem;
using namespace placenav;

namespace {

std::string format_name(eval::ReportFormat f) { return f == eval::ReportFormat::kJson ? "json" : "csv"; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(FormatErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

void write_run_manifest(const RunConfig& cfg, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = to_json(cfg);
  std::ofstream out(cfg.out / "run.json", std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, "cannot write " + (cfg.out / "run.json").string());
  out << j.dump(2) << "\n";
}

struct Flags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::vector<std::string> selectors;
  int w_l = 0;
  int w_u = 0;
  double kappa = 0.0;
  std::size_t window_size = 0;
  double pairwise_threshold = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  const RunConfig defaults;
  Flags flags;
  flags.seed = defaults.seed;
  flags.out = defaults.out.string();
  flags.format = format_name(defaults.format);
  flags.selectors = {to_string(defaults.localizer.selector)};
  flags.w_l = defaults.localizer.motion.w_l;
  flags.w_u = defaults.localizer.motion.w_u;
  flags.kappa = defaults.localizer.kappa;
  flags.window_size = defaults.localizer.window_size;
  flags.pairwise_threshold = defaults.pairwise_threshold;

  CLI::App app{"placenav: topological navigation with place-recognition subgoal selection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  auto* o_config = app.add_option("--config", flags.config_path, "JSON config file (flags override it)");
  auto* o_seed = app.add_option("--seed", flags.seed, "Base random seed");
  auto* o_out = app.add_option("--out", flags.out, "Output directory");
  auto* o_format = app.add_option("--format", flags.format, "Report format")
                       ->check(CLI::IsMember({"json", "csv"}));
  auto* o_selector = app.add_option("--selector", flags.selectors,
                                    "Localizer(s): bayes|window|global, comma separated")
                         ->delimiter(',')
                         ->check(CLI::IsMember({"bayes", "window", "global"}));
  auto* o_wl = app.add_option("--w-l", flags.w_l, "Motion model backward bound");
  auto* o_wu = app.add_option("--w-u", flags.w_u, "Motion model forward bound");
  auto* o_kappa = app.add_option("--kappa", flags.kappa, "lambda1 calibration ratio (> 1)");
  auto* o_window = app.add_option("--window-size", flags.window_size, "Sliding window width (odd)");
  auto* o_threshold = app.add_option("--pairwise-threshold", flags.pairwise_threshold,
                                     "Pairwise baseline temporal-distance threshold");

  // map build
  auto* map_cmd = app.add_subcommand("map", "Topological map tools");
  map_cmd->require_subcommand(1);
  auto* map_build = map_cmd->add_subcommand("build", "Build a map from an embedding file + sidecar");
  std::string map_input;
  std::size_t stride = defaults.map_stride;
  map_build->add_option("--embeddings", map_input, "Embedding file (sidecar <name>.meta.json)")->required();
  auto* o_stride = map_build->add_option("--stride", stride, "Keep every stride-th sample");

  // sim run
  auto* sim_cmd = app.add_subcommand("sim", "Simulated navigation");
  sim_cmd->require_subcommand(1);
  auto* sim_run = sim_cmd->add_subcommand("run", "Run a batch of seeded episodes");
  std::size_t episodes = defaults.episodes;
  std::string scenario = sim::to_string(defaults.scenario);
  bool kidnapped = false;
  std::string map_dir;
  double noise = defaults.policy.observation.noise_sigma;
  double length = defaults.world.length;
  unsigned threads = 0;
  auto* o_episodes = sim_run->add_option("--episodes", episodes, "Episodes per selector");
  auto* o_scenario = sim_run->add_option("--scenario", scenario, "Scenario preset")
                         ->check(CLI::IsMember({"nominal", "bursty", "kidnapped"}));
  sim_run->add_flag("--kidnapped", kidnapped, "Teleport the start to mid-route (same as --scenario kidnapped)");
  sim_run->add_option("--map", map_dir, "Use a saved map's embeddings as the world");
  auto* o_noise = sim_run->add_option("--noise", noise, "Observation noise sigma");
  auto* o_length = sim_run->add_option("--length", length, "Generated route length in meters");
  sim_run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  // eval recall
  auto* eval_cmd = app.add_subcommand("eval", "Retrieval evaluation");
  eval_cmd->require_subcommand(1);
  auto* eval_recall = eval_cmd->add_subcommand("recall", "Recall@N with a metric positive radius");
  std::string queries_path, database_path, method = "embedding_nn";
  std::size_t recall_n = defaults.recall_n;
  double radius = defaults.positive_radius;
  std::uint64_t recall_flops = 0;
  eval_recall->add_option("--queries", queries_path, "Query embedding file")->required();
  eval_recall->add_option("--database", database_path, "Database embedding file")->required();
  auto* o_n = eval_recall->add_option("--n", recall_n, "Top-N");
  auto* o_radius = eval_recall->add_option("--radius", radius, "Positive radius in meters");
  eval_recall->add_option("--method", method, "Ranking method")
      ->check(CLI::IsMember({"embedding_nn", "pairwise_stub"}));
  eval_recall->add_option("--stub-flops", recall_flops, "Synthetic work per pair for pairwise_stub");

  // bench runtime
  auto* bench_cmd = app.add_subcommand("bench", "Benchmarks");
  bench_cmd->require_subcommand(1);
  auto* bench_runtime = bench_cmd->add_subcommand("runtime", "Selection latency vs candidate count");
  std::vector<std::size_t> counts = defaults.bench_counts;
  std::uint64_t flops = defaults.per_pair_flops;
  std::size_t reps = defaults.bench_repetitions;
  std::size_t bench_dim = defaults.bench_dim;
  auto* o_counts = bench_runtime->add_option("--counts", counts, "Candidate counts, ascending")->delimiter(',');
  auto* o_flops = bench_runtime->add_option("--flops", flops, "Synthetic work per network evaluation");
  auto* o_reps = bench_runtime->add_option("--reps", reps, "Repetitions per point (median reported)");
  auto* o_dim = bench_runtime->add_option("--dim", bench_dim, "Descriptor dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (*o_config) apply_config_file(cfg, flags.config_path);
    if (*o_seed) cfg.seed = flags.seed;
    if (*o_out) cfg.out = flags.out;
    if (*o_format) cfg.format = eval::parse_format(flags.format);
    if (*o_selector) cfg.localizer.selector = parse_selector(flags.selectors.front());
    if (*o_wl) cfg.localizer.motion.w_l = flags.w_l;
    if (*o_wu) cfg.localizer.motion.w_u = flags.w_u;
    if (*o_kappa) cfg.localizer.kappa = flags.kappa;
    if (*o_window) cfg.localizer.window_size = flags.window_size;
    if (*o_threshold) cfg.pairwise_threshold = flags.pairwise_threshold;
    if (*o_stride) cfg.map_stride = stride;
    if (*o_episodes) cfg.episodes = episodes;
    if (*o_scenario) cfg.scenario = sim::parse_scenario(scenario);
    if (kidnapped) cfg.scenario = sim::Scenario::kKidnapped;
    if (*o_noise) cfg.policy.observation.noise_sigma = noise;
    if (*o_length) cfg.world.length = length;
    if (*o_n) cfg.recall_n = recall_n;
    if (*o_radius) cfg.positive_radius = radius;
    if (*o_counts) cfg.bench_counts = counts;
    if (*o_flops) cfg.per_pair_flops = flops;
    if (*o_reps) cfg.bench_repetitions = reps;
    if (*o_dim) cfg.bench_dim = bench_dim;
    cfg.validate();

    if (map_build->parsed()) {
      const EmbeddingSet set = read_embedding_set(map_input, true);
      const TopologicalMap map = build_map(samples_from_set(set), cfg.map_stride);
      save_map(map, cfg.out);
      std::cout << "wrote " << map.size() << "-node map (dim " << map.dim() << ") to " << cfg.out.string()
                << "\n";
      return 0;
    }

    if (sim_run->parsed()) {
      std::vector<Selector> selectors;
      if (*o_selector) {
        for (const auto& s : flags.selectors) selectors.push_back(parse_selector(s));
      } else {
        selectors.push_back(cfg.localizer.selector);
      }
      std::optional<sim::RouteWorld> fixed;
      if (!map_dir.empty()) {
        if (cfg.scenario == sim::Scenario::kBursty) {
          throw InvalidArgument("the bursty scenario needs a generated world, not --map");
        }
        fixed = sim::world_from_map(load_map(map_dir), cfg.world.node_spacing);
      }
      std::vector<std::uint64_t> seeds(cfg.episodes);
      std::iota(seeds.begin(), seeds.end(), cfg.seed);

      std::vector<sim::BatchCell> cells;
      for (Selector s : selectors) {
        sim::BatchCell cell;
        cell.scenario = cfg.scenario;
        cell.world = sim::scenario_world(cfg.scenario, cfg.world);
        cell.localizer = cfg.localizer;
        cell.localizer.selector = s;
        cell.policy = cfg.policy;
        cell.seeds = seeds;
        cell.fixed_world = fixed;
        cells.push_back(std::move(cell));
      }
      const auto batch = sim::run_batch(cells, threads);

      ensure_dir(cfg.out);
      const std::string hash = config_hash(cfg);
      eval::emit_records(batch.records, cfg.out / "episodes.jsonl");
      eval::emit_report(batch.summary, cfg.out / ("summary." + format_name(cfg.format)), cfg.format, hash);
      write_run_manifest(cfg, "sim run");
      for (const auto& row : batch.summary) {
        std::printf("%-8s %-10s episodes=%zu success_rate=%.3f\n", row.selector.c_str(), row.scenario.c_str(),
                    row.episodes, row.success_rate);
      }
      return 0;
    }

    if (eval_recall->parsed()) {
      const auto dataset = eval::load_retrieval_dataset(queries_path, database_path, cfg.positive_radius);
      const auto m = eval::parse_retrieval_method(method);
      PairwiseScorerStub stub;
      stub.per_pair_flops = recall_flops;
      const double recall = eval::recall_at_n(dataset, cfg.recall_n, m, stub);
      std::printf("recall@%zu (%s, radius %.3g m) = %.6f\n", cfg.recall_n, method.c_str(), cfg.positive_radius,
                  recall);

      ensure_dir(cfg.out);
      const fs::path path = cfg.out / ("recall." + format_name(cfg.format));
      std::ofstream out(path, std::ios::trunc);
      if (!out) throw FormatError(FormatErrorKind::kIo, "cannot write " + path.string());
      if (cfg.format == eval::ReportFormat::kJson) {
        nlohmann::ordered_json j;
        j["config_hash"] = config_hash(cfg);
        j["method"] = method;
        j["n"] = cfg.recall_n;
        j["positive_radius"] = cfg.positive_radius;
        j["queries"] = dataset.queries.count();
        j["database"] = dataset.database.count();
        j["recall"] = recall;
        out << j.dump(2) << "\n";
      } else {
        out << "method,n,positive_radius,queries,database,recall\n"
            << method << ',' << cfg.recall_n << ',' << eval::format_double(cfg.positive_radius) << ','
            << dataset.queries.count() << ',' << dataset.database.count() << ',' << eval::format_double(recall)
            << "\n";
      }
      return 0;
    }

    if (bench_runtime->parsed()) {
      const auto report = eval::runtime_scaling_bench(cfg.bench_config());
      ensure_dir(cfg.out);
      eval::emit_report(report, cfg.out / ("bench." + format_name(cfg.format)), cfg.format, config_hash(cfg));
      for (const auto& r : report.rows) {
        std::printf("n=%-5zu embedding=%.3f ms  pairwise=%.3f ms  pair_evaluations=%zu\n", r.candidates,
                    r.embedding_ns / 1e6, r.pairwise_ns / 1e6, r.pair_evaluations);
      }
      std::printf("pairwise fit: slope %.3f ms/candidate, R^2 %.4f; embedding max/min ratio %.3f\n",
                  report.pairwise_fit.slope / 1e6, report.pairwise_fit.r_squared, report.embedding_ratio());
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
