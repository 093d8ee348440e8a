#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "placenav/embedding.hpp"

namespace placenav {

/// Planar position in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double planar_distance(const Point2& a, const Point2& b);

/// Per-row metadata carried by the `.meta.json` sidecar.
struct RowMeta {
  std::optional<Point2> position;
  std::optional<std::string> image;
  std::optional<double> timestamp;

  friend bool operator==(const RowMeta&, const RowMeta&) = default;
};

struct EmbeddingSet {
  EmbeddingStore store;
  std::vector<RowMeta> rows;
};

inline constexpr char kEmbeddingMagic[4] = {'P', 'N', 'A', 'V'};
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

/// `route.bin` -> `route.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& embedding_file);

// Binary layout (little-endian): magic "PNAV", u32 version, u32 dim, u64 count,
// then count*dim IEEE-754 binary32 values, row-major.
void write_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);
EmbeddingStore read_embeddings(const std::filesystem::path& path);

// The sidecar is `{"version": 1, "rows": [...]}`; a bare top-level array of
// row objects is also accepted on read.
void write_sidecar(const std::filesystem::path& path, const std::vector<RowMeta>& rows);
std::vector<RowMeta> read_sidecar(const std::filesystem::path& path);

void write_embedding_set(const std::filesystem::path& embedding_file, const EmbeddingSet& set);

/// Reads the binary and its sidecar and checks that row counts agree. A
/// missing sidecar is an error when `require_sidecar`, otherwise rows are
/// filled with empty metadata.
EmbeddingSet read_embedding_set(const std::filesystem::path& embedding_file,
                                bool require_sidecar = true);

}  // namespace placenav
