#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "placenav/eval.hpp"

namespace placenav::eval {

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InvalidArgument("line fit needs >= 2 paired points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("line fit needs at least two distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

double BenchReport::embedding_ratio() const {
  if (rows.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.embedding_ns < b.embedding_ns;
  });
  return lo->embedding_ns > 0.0 ? hi->embedding_ns / lo->embedding_ns
                                : std::numeric_limits<double>::infinity();
}

void BenchConfig::validate() const {
  if (candidate_counts.size() < 3) throw InvalidArgument("benchmark needs >= 3 candidate counts");
  if (candidate_counts.front() == 0) throw InvalidArgument("candidate counts must be positive");
  if (!std::is_sorted(candidate_counts.begin(), candidate_counts.end()) ||
      std::adjacent_find(candidate_counts.begin(), candidate_counts.end()) != candidate_counts.end()) {
    throw InvalidArgument("candidate counts must be strictly ascending");
  }
  if (dim == 0) throw InvalidArgument("embedding dim must be positive");
  if (repetitions == 0) throw InvalidArgument("repetitions must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double median_ns(std::size_t repetitions, F&& body) {
  body();  // warm-up
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = Clock::now();
    body();
    const auto t1 = Clock::now();
    samples.push_back(static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

TopologicalMap random_map(std::size_t nodes, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<RouteSample> samples;
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<float> v(dim);
    for (float& x : v) x = gauss(rng);
    samples.push_back({EmbeddingVector(std::move(v)), std::nullopt, std::nullopt, std::nullopt});
  }
  return TopologicalMap(std::move(samples));
}

}  // namespace

BenchReport runtime_scaling_bench(const BenchConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const std::size_t max_n = std::max<std::size_t>(config.candidate_counts.back(), 2);
  const TopologicalMap map = random_map(max_n, config.dim, rng);
  const EmbeddingVector observation = random_map(2, config.dim, rng).node(0).embedding;
  const PairwiseScorerStub stub{config.per_pair_flops, 10.0, {}};

  BenchReport report;
  report.dim = config.dim;
  report.per_pair_flops = config.per_pair_flops;
  report.repetitions = config.repetitions;

  volatile std::size_t sink = 0;
  for (std::size_t n : config.candidate_counts) {
    std::vector<std::size_t> candidates(n);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});

    BenchRow row;
    row.candidates = n;
    row.embedding_ns = median_ns(config.repetitions, [&] {
      synthetic_work(config.per_pair_flops, observation[0]);
      std::size_t best = 0;
      double best_d = l2_distance(observation.values(), map.store().row(0));
      for (std::size_t i = 1; i < n; ++i) {
        const double d = l2_distance(observation.values(), map.store().row(i));
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      sink = best;
    });
    row.pairwise_ns = median_ns(config.repetitions, [&] {
      const auto sel = pairwise_select(observation, candidates, map, stub, config.pairwise_threshold);
      row.pair_evaluations = sel.evaluations;
      sink = sel.node;
    });
    report.rows.push_back(row);
  }
  (void)sink;

  const bool all_zero = std::all_of(report.rows.begin(), report.rows.end(), [](const BenchRow& r) {
    return r.embedding_ns == 0.0 && r.pairwise_ns == 0.0;
  });
  if (all_zero) {
    throw InvalidArgument("all benchmark medians are 0 ns; the timer cannot resolve this workload, "
                          "raise per_pair_flops");
  }

  std::vector<double> xs, emb, pair;
  for (const auto& r : report.rows) {
    xs.push_back(static_cast<double>(r.candidates));
    emb.push_back(r.embedding_ns);
    pair.push_back(r.pairwise_ns);
  }
  report.embedding_fit = fit_line(xs, emb);
  report.pairwise_fit = fit_line(xs, pair);
  return report;
}

}  // namespace placenav::eval
