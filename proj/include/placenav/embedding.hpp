#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "placenav/errors.hpp"

namespace placenav {

/// Fixed-dimension descriptor. Stored as 32-bit floats, compared in double.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  /// Throws InvalidArgument on an empty vector or a non-finite component.
  explicit EmbeddingVector(std::vector<float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<float> values_;
};

/// Row-major, insertion-ordered set of same-dimension embeddings. Immutable
/// once handed out as const; concurrent const access is safe.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);
  EmbeddingStore(std::size_t dim, std::vector<float> flat);

  static EmbeddingStore from_vectors(const std::vector<EmbeddingVector>& vectors);

  void add(const EmbeddingVector& v);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> row(std::size_t i) const;
  EmbeddingVector vector(std::size_t i) const;
  std::span<const float> flat() const noexcept { return data_; }

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  std::size_t dim_;
  std::vector<float> data_;
};

struct Neighbor {
  std::size_t index;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Summation runs over components in index order, so the result is symmetric
// bit-for-bit.
double l2_distance(std::span<const float> a, std::span<const float> b);
double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// Distances from `query` to every row of `store`, in row order.
std::vector<double> distance_profile(const EmbeddingVector& query, const EmbeddingStore& store);

/// The k nearest rows, ordered by (distance, index).
std::vector<Neighbor> nn_search(const EmbeddingVector& query, const EmbeddingStore& store,
                                std::size_t k);

/// Index of the smallest entry, lowest index on ties. Throws on empty input.
std::size_t argmin(std::span<const double> values);
std::size_t argmax(std::span<const double> values);

}  // namespace placenav
