#include "placenav/topo_map.hpp"

#include <fstream>

#include <json.hpp>

namespace placenav {

namespace fs = std::filesystem;

namespace {

EmbeddingStore store_of(const std::vector<MapNode>& nodes) {
  EmbeddingStore store(nodes.front().embedding.dim());
  for (const auto& n : nodes) store.add(n.embedding);
  return store;
}

std::vector<MapNode> to_nodes(std::vector<RouteSample> samples) {
  if (samples.size() < 2) {
    throw InvalidArgument("a topological map needs at least 2 nodes, got " +
                          std::to_string(samples.size()));
  }
  std::vector<MapNode> nodes;
  nodes.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& s = samples[i];
    nodes.push_back({i, std::move(s.embedding), s.position, std::move(s.image_ref), s.timestamp});
  }
  return nodes;
}

}  // namespace

TopologicalMap::TopologicalMap(std::vector<RouteSample> samples)
    : nodes_(to_nodes(std::move(samples))), store_(store_of(nodes_)) {}

std::vector<std::size_t> stride_selection(std::size_t length, std::size_t stride) {
  if (stride == 0) throw InvalidArgument("stride must be positive");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < length; i += stride) keep.push_back(i);
  if (length > 0 && keep.back() != length - 1) keep.push_back(length - 1);
  return keep;
}

TopologicalMap build_map(const std::vector<RouteSample>& sequence, std::size_t stride) {
  std::vector<RouteSample> kept;
  for (std::size_t i : stride_selection(sequence.size(), stride)) kept.push_back(sequence[i]);
  return TopologicalMap(std::move(kept));
}

std::vector<RouteSample> samples_from_set(const EmbeddingSet& set) {
  std::vector<RouteSample> out;
  out.reserve(set.store.count());
  for (std::size_t i = 0; i < set.store.count(); ++i) {
    const auto& r = set.rows.at(i);
    out.push_back({set.store.vector(i), r.position, r.image, r.timestamp});
  }
  return out;
}

void save_map(const TopologicalMap& map, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(FormatErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

  EmbeddingSet set{map.store(), {}};
  for (const auto& n : map.nodes()) set.rows.push_back({n.position, n.image_ref, n.timestamp});
  const fs::path emb = dir / kMapEmbeddingFile;
  write_embedding_set(emb, set);

  nlohmann::ordered_json manifest;
  manifest["version"] = 1;
  manifest["embedding_file"] = emb.filename().string();
  manifest["meta_file"] = sidecar_path(emb).filename().string();
  manifest["node_count"] = map.size();
  manifest["dim"] = map.dim();
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, "cannot write " + (dir / kManifestName).string());
  out << manifest.dump(2) << "\n";
}

TopologicalMap load_map(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw FormatError(FormatErrorKind::kIo, "manifest not found: " + manifest_path.string());

  nlohmann::json manifest;
  std::string emb_name, meta_name;
  std::size_t node_count = 0, dim = 0;
  try {
    manifest = nlohmann::json::parse(in);
    if (manifest.at("version").get<int>() != 1) {
      throw FormatError(FormatErrorKind::kVersionMismatch,
                        manifest_path.string() + ": unsupported manifest version");
    }
    emb_name = manifest.at("embedding_file").get<std::string>();
    meta_name = manifest.at("meta_file").get<std::string>();
    node_count = manifest.at("node_count").get<std::size_t>();
    dim = manifest.at("dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::kMalformedMetadata, manifest_path.string() + ": " + e.what());
  }

  EmbeddingStore store = read_embeddings(dir / emb_name);
  std::vector<RowMeta> rows = read_sidecar(dir / meta_name);
  if (store.count() != node_count || store.dim() != dim) {
    throw FormatError(FormatErrorKind::kCountInconsistency,
                      manifest_path.string() + " declares " + std::to_string(node_count) + "x" +
                          std::to_string(dim) + " but embedding file holds " +
                          std::to_string(store.count()) + "x" + std::to_string(store.dim()));
  }
  if (rows.size() != store.count()) {
    throw FormatError(FormatErrorKind::kAlignmentMismatch,
                      meta_name + " has " + std::to_string(rows.size()) + " rows but " + emb_name +
                          " has " + std::to_string(store.count()));
  }
  return TopologicalMap(samples_from_set({std::move(store), std::move(rows)}));
}

}  // namespace placenav
