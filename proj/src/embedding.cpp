#include "placenav/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace placenav {

const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kIo: return "io error";
    case FormatErrorKind::kBadMagic: return "bad magic";
    case FormatErrorKind::kVersionMismatch: return "version mismatch";
    case FormatErrorKind::kCountInconsistency: return "count inconsistency";
    case FormatErrorKind::kAlignmentMismatch: return "sidecar alignment mismatch";
    case FormatErrorKind::kMalformedMetadata: return "malformed metadata";
  }
  return "unknown format error";
}

namespace {

void check_finite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidArgument("embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionMismatch("embedding dimension " + std::to_string(a) +
                            " incompatible with " + std::to_string(b));
  }
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("embedding must have dimension >= 1");
  check_finite(values_);
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("embedding store dimension must be >= 1");
}

EmbeddingStore::EmbeddingStore(std::size_t dim, std::vector<float> flat)
    : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0) throw InvalidArgument("embedding store dimension must be >= 1");
  if (data_.size() % dim_ != 0) {
    throw DimensionMismatch("flat buffer of " + std::to_string(data_.size()) +
                            " floats is not a multiple of dim " + std::to_string(dim_));
  }
  check_finite(data_);
}

EmbeddingStore EmbeddingStore::from_vectors(const std::vector<EmbeddingVector>& vectors) {
  if (vectors.empty()) throw InvalidArgument("cannot infer dimension of an empty vector list");
  EmbeddingStore store(vectors.front().dim());
  store.data_.reserve(vectors.size() * store.dim_);
  for (const auto& v : vectors) store.add(v);
  return store;
}

void EmbeddingStore::add(const EmbeddingVector& v) {
  check_dims(v.dim(), dim_);
  data_.insert(data_.end(), v.values().begin(), v.values().end());
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
  if (i >= count()) {
    throw InvalidArgument("row " + std::to_string(i) + " out of range for store of " +
                          std::to_string(count()));
  }
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

EmbeddingVector EmbeddingStore::vector(std::size_t i) const {
  auto r = row(i);
  return EmbeddingVector(std::vector<float>(r.begin(), r.end()));
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
  check_dims(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return l2_distance(a.values(), b.values());
}

std::vector<double> distance_profile(const EmbeddingVector& query, const EmbeddingStore& store) {
  check_dims(query.dim(), store.dim());
  if (store.empty()) throw InvalidArgument("distance profile over an empty store");
  std::vector<double> out(store.count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = l2_distance(query.values(), store.row(i));
  return out;
}

std::vector<Neighbor> nn_search(const EmbeddingVector& query, const EmbeddingStore& store,
                                std::size_t k) {
  check_dims(query.dim(), store.dim());
  if (store.empty()) throw InvalidArgument("nearest-neighbor search over an empty store");
  if (k == 0 || k > store.count()) {
    throw InvalidArgument("k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(store.count()) + "]");
  }
  const auto dists = distance_profile(query, store);
  std::vector<Neighbor> all(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) all[i] = {i, dists[i]};
  const auto by_distance_then_index = [](const Neighbor& x, const Neighbor& y) {
    return x.distance < y.distance || (x.distance == y.distance && x.index < y.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    by_distance_then_index);
  all.resize(k);
  return all;
}

std::size_t argmin(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("argmin of an empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("argmax of an empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace placenav
