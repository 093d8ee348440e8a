// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>

#include "placenav/config.hpp"
#include "placenav/eval.hpp"
#include "placenav/localization.hpp"
#include "placenav/simulator.hpp"
#include "support.hpp"

using namespace placenav;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BeliefState random_belief(std::size_t n, std::mt19937_64& rng, double zero_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BeliefState b{std::vector<double>(n)};
  for (double& p : b.probs) p = u(rng) < zero_fraction ? 0.0 : u(rng);
  if (b.total() == 0.0) b.probs[rng() % n] = 1.0;
  const double t = b.total();
  for (double& p : b.probs) p /= t;
  return b;
}

std::int64_t ulp_distance(double a, double b) {
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, 8);
  std::memcpy(&ib, &b, 8);
  return std::llabs(ia - ib);
}

void filter_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double worst_norm = 0.0;
  std::size_t steps = 0;
  BeliefState b = BeliefState::uniform(30);
  MotionModel m{-1, 2};
  for (; steps < 100'000; ++steps) {
    if (steps % 50 == 0) {
      const std::size_t n = 2 + rng() % 60;
      m = MotionModel{-static_cast<int>(rng() % 4), static_cast<int>(rng() % 4), 0.0};
      b = random_belief(n, rng, 0.5);
    }
    b = predict(b, m);
    worst_norm = std::max(worst_norm, std::abs(b.total() - 1.0));
    std::vector<double> l(b.size());
    const double lambda = 0.1 + 10.0 * u(rng);
    for (double& x : l) x = std::exp(-lambda * 5.0 * u(rng));
    b = update(b, l);
    worst_norm = std::max(worst_norm, std::abs(b.total() - 1.0));
  }

  double worst_linear = 0.0;
  bool identity = true;
  bool support = true;
  for (int trial = 0; trial < 20'000; ++trial) {
    const std::size_t n = 2 + rng() % 50;
    const MotionModel mm{-static_cast<int>(rng() % 4), static_cast<int>(rng() % 4), 0.0};
    const auto b1 = random_belief(n, rng, 0.5), b2 = random_belief(n, rng, 0.5);
    const double a = u(rng);
    BeliefState mix{std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) mix.probs[i] = a * b1.probs[i] + (1 - a) * b2.probs[i];
    const auto p1 = predict(b1, mm), p2 = predict(b2, mm), pm = predict(mix, mm);
    for (std::size_t i = 0; i < n; ++i) {
      worst_linear = std::max(worst_linear, std::abs(pm.probs[i] - (a * p1.probs[i] + (1 - a) * p2.probs[i])));
    }

    identity = identity && predict(b1, MotionModel{0, 0, 0.0}).probs == b1.probs;

    const std::size_t lo = rng() % n, hi = lo + rng() % (n - lo);
    BeliefState band{std::vector<double>(n, 0.0)};
    for (std::size_t i = lo; i <= hi; ++i) band.probs[i] = u(rng) + 1e-3;
    const double t = band.total();
    for (double& p : band.probs) p /= t;
    const auto out = predict(band, mm);
    const long lo_bound = std::max<long>(0, long(lo) + mm.w_l);
    const long hi_bound = std::min<long>(long(n) - 1, long(hi) + mm.w_u);
    for (std::size_t i = 0; i < n; ++i) {
      if ((long(i) < lo_bound || long(i) > hi_bound) && out.probs[i] != 0.0) support = false;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_norm < 1e-9 && worst_linear <= 1e-12 && identity && support && secs < 30.0;
  report(ok, "filter-correctness",
         fmt("%zu steps, max|sum-1|=%.2e, max linearity err=%.2e, identity=%s, support=%s, %.1fs", steps,
             worst_norm, worst_linear, identity ? "ok" : "broken", support ? "ok" : "violated", secs));
}

void point_checks() {
  const auto d = predict(BeliefState::delta(21, 5), MotionModel{-1, 2});
  bool delta_ok = true;
  for (std::size_t i = 0; i < 21; ++i) delta_ok = delta_ok && d.probs[i] == ((i >= 4 && i <= 7) ? 0.25 : 0.0);

  std::mt19937_64 rng(1002);
  const auto map = test::random_map(12, 64, rng);
  bool zero_ok = true;
  for (std::size_t s = 0; s < map.size(); ++s) {
    zero_ok = zero_ok && measurement_likelihood(map.node(s).embedding, map, MeasurementModel{2.5})[s] == 1.0;
  }

  std::int64_t worst_ulp = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto obs = test::random_vector(64, rng);
    const double lambda = 0.05 + 0.01 * trial;
    const auto l1 = measurement_likelihood(obs, map, MeasurementModel{lambda});
    const auto l2 = measurement_likelihood(obs, map, MeasurementModel{2 * lambda});
    for (std::size_t i = 0; i < l1.size(); ++i) worst_ulp = std::max(worst_ulp, ulp_distance(l2[i], l1[i] * l1[i]));
  }
  report(delta_ok && zero_ok && worst_ulp <= 4, "motion/measurement-points",
         fmt("delta->[0.25 x4]=%s, L(d=0)==1 %s, doubling lambda1 squares likelihoods (max %lld ulp)",
             delta_ok ? "exact" : "wrong", zero_ok ? "exact" : "wrong", static_cast<long long>(worst_ulp)));
}

void oracle_equivalence() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  bool argmax_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto map = test::random_map(30, 32, rng);
    const auto prior = random_belief(30, rng, 0.2);
    const auto obs = test::random_vector(32, rng);
    const int w_l = -static_cast<int>(rng() % 3), w_u = static_cast<int>(rng() % 4);
    const MeasurementModel meas{0.2 + (rng() % 1000) / 250.0};
    const auto step = bayes_localize_step(prior, obs, map, MotionModel{w_l, w_u, 0.0}, meas);
    const auto oracle = test::oracle_bayes_step(prior.probs, obs, map, w_l, w_u, meas.lambda1);
    for (std::size_t i = 0; i < 30; ++i) worst = std::max(worst, std::abs(step.belief.probs[i] - oracle[i]));
    std::size_t best = 0;
    for (std::size_t i = 1; i < 30; ++i) {
      if (oracle[i] > oracle[best]) best = i;
    }
    argmax_ok = argmax_ok && best == step.best_node;
  }
  report(worst <= 1e-10 && argmax_ok, "dense-oracle-equivalence",
         fmt("100 maps x 30 nodes, max |diff|=%.2e, argmax %s", worst, argmax_ok ? "agrees" : "differs"));
}

void kidnapped() {
  const RunConfig cfg;
  const auto world_cfg = sim::scenario_world(sim::Scenario::kKidnapped, cfg.world);
  LocalizerConfig bayes = cfg.localizer;
  bayes.selector = Selector::kBayes;
  LocalizerConfig window = cfg.localizer;
  window.selector = Selector::kWindow;
  window.window_start = 0;

  const std::size_t episodes = 50;
  std::size_t bayes_ok = 0, window_lost = 0;
  for (std::uint64_t seed = 0; seed < episodes; ++seed) {
    const auto world = sim::generate_world(world_cfg, sim::world_seed(seed));
    const double start = sim::start_position(sim::Scenario::kKidnapped, world, seed);
    const auto rb = sim::run_episode(world, bayes, cfg.policy, start, seed);
    for (std::size_t t = 0; t < std::min<std::size_t>(20, rb.localization_error_series.size()); ++t) {
      if (rb.localization_error_series[t] <= 1) {
        ++bayes_ok;
        break;
      }
    }
    const auto rw = sim::run_episode(world, window, cfg.policy, start, seed);
    if (rw.localization_error_series.size() >= 20 && rw.localization_error_series[19] > 5) ++window_lost;
  }
  const double b = double(bayes_ok) / episodes, w = double(window_lost) / episodes;
  report(b >= 0.9 && w >= 0.9, "kidnapped-robot",
         fmt("bayes err<=1 within 20 steps: %.0f%%; window err>5 at step 20: %.0f%% (50 episodes)", 100 * b,
             100 * w));
}

void bursty() {
  const auto t0 = Clock::now();
  const RunConfig cfg;
  std::vector<std::uint64_t> seeds(100);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  std::vector<sim::BatchCell> cells;
  for (Selector s : {Selector::kBayes, Selector::kWindow}) {
    sim::BatchCell c;
    c.scenario = sim::Scenario::kBursty;
    c.world = sim::scenario_world(sim::Scenario::kBursty, cfg.world);
    c.localizer = cfg.localizer;
    c.localizer.selector = s;
    c.policy = cfg.policy;
    c.seeds = seeds;
    cells.push_back(std::move(c));
  }
  const auto r = sim::run_batch(cells);
  const double bayes = r.summary[0].success_rate, window = r.summary[1].success_rate;
  const std::size_t region = cells[0].world.bursty_regions.at(0).last - cells[0].world.bursty_regions.at(0).first + 1;
  const double secs = seconds_since(t0);
  report(bayes > window && bayes - window >= 0.10 && region == 10 && secs < 120.0, "bursty-region",
         fmt("SR bayes %.2f vs window %.2f (gap %.0f pts), %zu-node region, noise %.2f, %.1fs", bayes, window,
             100 * (bayes - window), region, cfg.policy.observation.noise_sigma, secs));
}

void runtime_scaling() {
  const RunConfig cfg;
  const auto report_data = eval::runtime_scaling_bench(cfg.bench_config());
  bool counts_ok = true;
  for (const auto& row : report_data.rows) counts_ok = counts_ok && row.pair_evaluations == row.candidates;
  const auto& fit = report_data.pairwise_fit;
  const double ratio = report_data.embedding_ratio();
  std::string timings;
  for (const auto& row : report_data.rows) {
    timings += fmt(" n=%zu: %.2f/%.2f ms;", row.candidates, row.embedding_ns / 1e6, row.pairwise_ns / 1e6);
  }
  report(fit.r_squared > 0.95 && fit.slope > 0 && ratio < 2.0 && counts_ok, "runtime-scaling",
         fmt("pairwise R^2=%.4f slope=%.3f ms/cand, embedding max/min=%.3f, pair counts %s;%s", fit.r_squared,
             fit.slope / 1e6, ratio, counts_ok ? "exact" : "wrong", timings.c_str()));
}

void recall() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> pos(0.0, 300.0);
  eval::RetrievalDataset ds{EmbeddingStore(16), {}, EmbeddingStore(16), {}, 25.0};
  for (int i = 0; i < 50; ++i) {
    ds.queries.add(test::random_vector(16, rng));
    ds.query_positions.push_back({pos(rng), pos(rng)});
  }
  for (int i = 0; i < 200; ++i) {
    ds.database.add(test::random_vector(16, rng));
    ds.database_positions.push_back({pos(rng), pos(rng)});
  }
  bool exact = true, monotone = true;
  double prev = -1.0;
  std::string values;
  for (std::size_t n : {1u, 5u, 10u}) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < 50; ++q) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < 200; ++i) all.emplace_back(test::naive_l2(ds.queries.row(q), ds.database.row(i)), i);
      std::sort(all.begin(), all.end());
      for (std::size_t k = 0; k < n; ++k) {
        const auto& a = ds.query_positions[q];
        const auto& b = ds.database_positions[all[k].second];
        if (std::hypot(a.x - b.x, a.y - b.y) <= 25.0) {
          ++hits;
          break;
        }
      }
    }
    const double oracle = double(hits) / 50.0;
    const double got = eval::recall_at_n(ds, n, eval::RetrievalMethod::kEmbeddingNN);
    exact = exact && got == oracle;
    monotone = monotone && got >= prev;
    prev = got;
    values += fmt(" R@%zu=%.2f", n, got);
  }
  report(exact && monotone, "recall-equivalence",
         fmt("50x200:%s, oracle %s, %s", values.c_str(), exact ? "exact" : "differs",
             monotone ? "nondecreasing" : "decreasing"));
}

void determinism() {
  test::TempDir dir;
  bool same = true;
  std::string detail;
  const std::vector<std::string> runs{"--seed 7 sim run --selector bayes --episodes 20",
                                      "--seed 3 sim run --selector window,bayes --scenario bursty --episodes 20",
                                      "--seed 11 --format csv sim run --selector bayes,window,global --kidnapped "
                                      "--episodes 10 --threads 3"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto a = dir / ("a" + std::to_string(i));
    const auto b = dir / ("b" + std::to_string(i));
    const auto ra = test::run_cli(runs[i] + " --out \"" + a.string() + "\"", dir / "log.txt");
    const auto rb = test::run_cli(runs[i] + " --out \"" + b.string() + "\"", dir / "log.txt");
    const auto ea = test::read_file(a / "episodes.jsonl");
    same = same && ra.exit_code == 0 && rb.exit_code == 0 && !ea.empty() && ea == test::read_file(b / "episodes.jsonl");
  }
  report(same, "sim-run-determinism",
         fmt("%zu sim run configurations repeated, episode records %s", runs.size(),
             same ? "byte-identical" : "differ"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::pair<const char*, void (*)()> checks[] = {
      {"filter-correctness", filter_suite},   {"motion/measurement-points", point_checks},
      {"dense-oracle-equivalence", oracle_equivalence}, {"kidnapped-robot", kidnapped},
      {"bursty-region", bursty},               {"runtime-scaling", runtime_scaling},
      {"recall-equivalence", recall},          {"sim-run-determinism", determinism}};
  for (const auto& [name, fn] : checks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d failed, %.1fs total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
