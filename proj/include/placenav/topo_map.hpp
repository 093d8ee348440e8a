#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "placenav/embedding.hpp"
#include "placenav/embedding_io.hpp"

namespace placenav {

struct MapNode {
  std::size_t index = 0;
  EmbeddingVector embedding;
  std::optional<Point2> position;
  std::optional<std::string> image_ref;
  std::optional<double> timestamp;

  friend bool operator==(const MapNode&, const MapNode&) = default;
};

/// One entry of a reference-run capture.
struct RouteSample {
  EmbeddingVector embedding;
  std::optional<Point2> position;
  std::optional<std::string> image_ref;
  std::optional<double> timestamp;
};

/// Linear-chain topological map: node 0 is the start, node S = size()-1 the
/// goal. Row i of store() is node i's embedding.
class TopologicalMap {
 public:
  /// Throws InvalidArgument with fewer than two nodes or mixed dimensions.
  explicit TopologicalMap(std::vector<RouteSample> samples);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t goal() const noexcept { return nodes_.size() - 1; }
  std::size_t dim() const noexcept { return store_.dim(); }

  const MapNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<MapNode>& nodes() const noexcept { return nodes_; }
  const EmbeddingStore& store() const noexcept { return store_; }

  friend bool operator==(const TopologicalMap&, const TopologicalMap&) = default;

 private:
  std::vector<MapNode> nodes_;
  EmbeddingStore store_;
};

/// Keeps every `stride`-th sample plus the last one.
TopologicalMap build_map(const std::vector<RouteSample>& sequence, std::size_t stride);

/// Source positions kept by build_map for a sequence of `length` samples.
std::vector<std::size_t> stride_selection(std::size_t length, std::size_t stride);

std::vector<RouteSample> samples_from_set(const EmbeddingSet& set);

inline constexpr const char* kManifestName = "map.json";
inline constexpr const char* kMapEmbeddingFile = "embeddings.bin";

/// Writes `dir/map.json`, `dir/embeddings.bin` and `dir/embeddings.meta.json`.
void save_map(const TopologicalMap& map, const std::filesystem::path& dir);
TopologicalMap load_map(const std::filesystem::path& dir);

}  // namespace placenav
