#include <algorithm>
#include <numeric>

#include "placenav/eval.hpp"

namespace placenav::eval {

void RetrievalDataset::validate() const {
  if (queries.empty() || database.empty()) throw InvalidArgument("retrieval needs queries and a database");
  if (queries.dim() != database.dim()) {
    throw DimensionMismatch("query dim " + std::to_string(queries.dim()) + " vs database dim " +
                            std::to_string(database.dim()));
  }
  if (query_positions.size() != queries.count() || database_positions.size() != database.count()) {
    throw InvalidArgument("every query and database row needs a position");
  }
  if (!(positive_radius > 0.0)) throw InvalidArgument("positive radius must be > 0");
}

namespace {

std::vector<Point2> require_positions(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::vector<Point2> out;
  out.reserve(set.rows.size());
  for (std::size_t i = 0; i < set.rows.size(); ++i) {
    if (!set.rows[i].position) {
      throw InvalidArgument(path.string() + ": row " + std::to_string(i) + " has no position");
    }
    out.push_back(*set.rows[i].position);
  }
  return out;
}

}  // namespace

RetrievalDataset load_retrieval_dataset(const std::filesystem::path& queries,
                                        const std::filesystem::path& database,
                                        double positive_radius) {
  EmbeddingSet q = read_embedding_set(queries, true);
  EmbeddingSet db = read_embedding_set(database, true);
  auto qpos = require_positions(q, queries);
  auto dbpos = require_positions(db, database);
  RetrievalDataset ds{std::move(q.store), std::move(qpos), std::move(db.store), std::move(dbpos),
                      positive_radius};
  ds.validate();
  return ds;
}

std::string to_string(RetrievalMethod m) {
  return m == RetrievalMethod::kEmbeddingNN ? "embedding_nn" : "pairwise_stub";
}

RetrievalMethod parse_retrieval_method(const std::string& name) {
  if (name == "embedding_nn") return RetrievalMethod::kEmbeddingNN;
  if (name == "pairwise_stub") return RetrievalMethod::kPairwiseStub;
  throw InvalidArgument("unknown retrieval method '" + name + "' (expected embedding_nn|pairwise_stub)");
}

std::vector<std::size_t> rank_database(std::span<const float> query, const EmbeddingStore& database,
                                       RetrievalMethod method, const PairwiseScorerStub& stub) {
  std::vector<double> score(database.count());
  for (std::size_t i = 0; i < score.size(); ++i) {
    score[i] = method == RetrievalMethod::kEmbeddingNN ? l2_distance(query, database.row(i))
                                                       : stub.evaluate(query, database.row(i));
  }
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  return order;
}

double recall_at_n(const RetrievalDataset& dataset, std::size_t n, RetrievalMethod method,
                   const PairwiseScorerStub& stub) {
  dataset.validate();
  if (n == 0 || n > dataset.database.count()) {
    throw InvalidArgument("n=" + std::to_string(n) + " outside [1, " +
                          std::to_string(dataset.database.count()) + "]");
  }
  std::size_t hits = 0;
  for (std::size_t q = 0; q < dataset.queries.count(); ++q) {
    const auto order = rank_database(dataset.queries.row(q), dataset.database, method, stub);
    const bool hit = std::any_of(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                                 [&](std::size_t row) {
                                   return planar_distance(dataset.query_positions[q],
                                                          dataset.database_positions[row]) <=
                                          dataset.positive_radius;
                                 });
    hits += hit;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.queries.count());
}

}  // namespace placenav::eval
