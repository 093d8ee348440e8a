#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "placenav/embedding.hpp"
#include "placenav/embedding_io.hpp"
#include "placenav/simulator.hpp"
#include "placenav/subgoal.hpp"

#include <json.hpp>

namespace placenav::eval {

inline constexpr double kDefaultPositiveRadius = 25.0;

/// Queries and database rows, each with a planar position in meters.
struct RetrievalDataset {
  EmbeddingStore queries;
  std::vector<Point2> query_positions;
  EmbeddingStore database;
  std::vector<Point2> database_positions;
  double positive_radius = kDefaultPositiveRadius;

  void validate() const;
};

/// Loads two embedding sets whose sidecars must carry a position per row.
RetrievalDataset load_retrieval_dataset(const std::filesystem::path& queries,
                                        const std::filesystem::path& database,
                                        double positive_radius = kDefaultPositiveRadius);

enum class RetrievalMethod { kEmbeddingNN, kPairwiseStub };

std::string to_string(RetrievalMethod m);
RetrievalMethod parse_retrieval_method(const std::string& name);

/// Database rows ranked for one query: by embedding distance, or by the
/// stub's surrogate temporal distance. Ties go to the lower row.
std::vector<std::size_t> rank_database(std::span<const float> query, const EmbeddingStore& database,
                                       RetrievalMethod method, const PairwiseScorerStub& stub);

/// Fraction of queries with at least one of their top-n rows within the
/// positive radius.
double recall_at_n(const RetrievalDataset& dataset, std::size_t n, RetrievalMethod method,
                   const PairwiseScorerStub& stub = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  friend bool operator==(const LinearFit&, const LinearFit&) = default;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct BenchRow {
  std::size_t candidates = 0;
  double embedding_ns = 0.0;  // medians
  double pairwise_ns = 0.0;
  std::size_t pair_evaluations = 0;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  std::size_t dim = 0;
  std::uint64_t per_pair_flops = 0;
  std::size_t repetitions = 0;
  std::vector<BenchRow> rows;
  LinearFit embedding_fit;
  LinearFit pairwise_fit;

  /// Largest over smallest embedding-search median.
  double embedding_ratio() const;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

struct BenchConfig {
  std::vector<std::size_t> candidate_counts{5, 21, 101};
  std::size_t dim = 512;
  std::uint64_t per_pair_flops = 2'000'000;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  double pairwise_threshold = kDefaultPairwiseThreshold;

  void validate() const;
};

/// Times subgoal selection over n candidates for both designs. The embedding
/// route runs the encoder once on the observation (per_pair_flops of
/// synthetic work) and then an argmin over precomputed map descriptors; the
/// pairwise route runs the stub once per candidate. Medians over
/// `repetitions`, measured on the calling thread.
BenchReport runtime_scaling_bench(const BenchConfig& config);

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_format(const std::string& name);

nlohmann::ordered_json to_json(const BenchReport& report);
BenchReport bench_report_from_json(const nlohmann::json& j);
std::string to_csv(const BenchReport& report);

nlohmann::ordered_json to_json(const std::vector<sim::SummaryRow>& summary);
std::string to_csv(const std::vector<sim::SummaryRow>& summary);

inline constexpr const char* kSummaryCsvHeader = "selector,scenario,episodes,success_rate";
inline constexpr const char* kBenchCsvHeader = "candidates,embedding_ns,pairwise_ns,pair_evaluations";

/// One JSON object per line, fields in a fixed order.
std::string to_jsonl(const std::vector<sim::EpisodeRecord>& records);

/// Writes the report; `config_hash`, when given, is embedded in JSON output.
/// Refuses to write an empty summary.
void emit_report(const BenchReport& report, const std::filesystem::path& path, ReportFormat format,
                 const std::optional<std::string>& config_hash = std::nullopt);
void emit_report(const std::vector<sim::SummaryRow>& summary, const std::filesystem::path& path,
                 ReportFormat format, const std::optional<std::string>& config_hash = std::nullopt);
void emit_records(const std::vector<sim::EpisodeRecord>& records, const std::filesystem::path& path);

/// Shortest decimal form that round-trips.
std::string format_double(double v);

}  // namespace placenav::eval
