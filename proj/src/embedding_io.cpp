#include "placenav/embedding_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

namespace placenav {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

double planar_distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

fs::path sidecar_path(const fs::path& embedding_file) {
  fs::path p = embedding_file;
  p.replace_extension(".meta.json");
  return p;
}

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<unsigned char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw FormatError(FormatErrorKind::kIo, "write failed for " + path.string());
}

RowMeta row_from_json(const json& j, std::size_t i) {
  if (!j.is_object()) {
    throw FormatError(FormatErrorKind::kMalformedMetadata,
                      "sidecar row " + std::to_string(i) + " is not an object");
  }
  RowMeta row;
  try {
    if (auto it = j.find("position"); it != j.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2) throw std::runtime_error("position must be [x, y]");
      row.position = Point2{it->at(0).get<double>(), it->at(1).get<double>()};
    }
    if (auto it = j.find("image"); it != j.end() && !it->is_null()) row.image = it->get<std::string>();
    if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
      row.timestamp = it->get<double>();
    }
  } catch (const std::exception& e) {
    throw FormatError(FormatErrorKind::kMalformedMetadata,
                      "sidecar row " + std::to_string(i) + ": " + e.what());
  }
  return row;
}

}  // namespace

void write_embeddings(const fs::path& path, const EmbeddingStore& store) {
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderBytes + store.flat().size() * 4);
  buf.insert(buf.end(), std::begin(kEmbeddingMagic), std::end(kEmbeddingMagic));
  put_le<std::uint32_t>(buf, kEmbeddingFormatVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(store.dim()));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(store.count()));
  for (float f : store.flat()) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(f));
  spill(path, reinterpret_cast<const char*>(buf.data()), buf.size());
}

EmbeddingStore read_embeddings(const fs::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic, path.string() + " is not a PNAV embedding file");
  }
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(FormatErrorKind::kCountInconsistency, path.string() + ": truncated header");
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kEmbeddingFormatVersion) {
    throw FormatError(FormatErrorKind::kVersionMismatch,
                      path.string() + ": version " + std::to_string(version) + ", expected " +
                          std::to_string(kEmbeddingFormatVersion));
  }
  const auto dim = get_le<std::uint32_t>(bytes.data() + 8);
  const auto count = get_le<std::uint64_t>(bytes.data() + 12);
  if (dim == 0) throw FormatError(FormatErrorKind::kCountInconsistency, path.string() + ": dim is 0");
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (count > payload / 4 / dim || payload != count * dim * 4) {
    throw FormatError(FormatErrorKind::kCountInconsistency,
                      path.string() + ": header declares " + std::to_string(count) + "x" +
                          std::to_string(dim) + " floats but payload holds " +
                          std::to_string(payload) + " bytes");
  }
  std::vector<float> flat(count * dim);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < flat.size(); ++i, p += 4) {
    flat[i] = std::bit_cast<float>(get_le<std::uint32_t>(p));
  }
  try {
    return EmbeddingStore(dim, std::move(flat));
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatErrorKind::kMalformedMetadata, path.string() + ": " + e.what());
  }
}

void write_sidecar(const fs::path& path, const std::vector<RowMeta>& rows) {
  ordered_json doc;
  doc["version"] = kEmbeddingFormatVersion;
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o = ordered_json::object();
    if (r.position) o["position"] = {r.position->x, r.position->y};
    if (r.image) o["image"] = *r.image;
    if (r.timestamp) o["timestamp"] = *r.timestamp;
    arr.push_back(std::move(o));
  }
  doc["rows"] = std::move(arr);
  const std::string text = doc.dump(2) + "\n";
  spill(path, text.data(), text.size());
}

std::vector<RowMeta> read_sidecar(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::kIo, "meta file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(FormatErrorKind::kMalformedMetadata, path.string() + ": " + e.what());
  }
  const json* rows = &doc;
  if (doc.is_object()) {
    auto it = doc.find("rows");
    if (it == doc.end()) {
      throw FormatError(FormatErrorKind::kMalformedMetadata, path.string() + ": missing \"rows\"");
    }
    rows = &*it;
  }
  if (!rows->is_array()) {
    throw FormatError(FormatErrorKind::kMalformedMetadata, path.string() + ": rows is not an array");
  }
  std::vector<RowMeta> out;
  out.reserve(rows->size());
  for (std::size_t i = 0; i < rows->size(); ++i) out.push_back(row_from_json((*rows)[i], i));
  return out;
}

void write_embedding_set(const fs::path& embedding_file, const EmbeddingSet& set) {
  if (set.rows.size() != set.store.count()) {
    throw FormatError(FormatErrorKind::kAlignmentMismatch,
                      std::to_string(set.rows.size()) + " metadata rows for " +
                          std::to_string(set.store.count()) + " embeddings");
  }
  write_embeddings(embedding_file, set.store);
  write_sidecar(sidecar_path(embedding_file), set.rows);
}

EmbeddingSet read_embedding_set(const fs::path& embedding_file, bool require_sidecar) {
  EmbeddingStore store = read_embeddings(embedding_file);
  const fs::path meta = sidecar_path(embedding_file);
  std::vector<RowMeta> rows;
  if (fs::exists(meta)) {
    rows = read_sidecar(meta);
  } else if (require_sidecar) {
    throw FormatError(FormatErrorKind::kIo, "meta file not found: " + meta.string());
  } else {
    rows.resize(store.count());
  }
  if (rows.size() != store.count()) {
    throw FormatError(FormatErrorKind::kAlignmentMismatch,
                      meta.string() + " has " + std::to_string(rows.size()) + " rows but " +
                          embedding_file.string() + " has " + std::to_string(store.count()));
  }
  return {std::move(store), std::move(rows)};
}

}  // namespace placenav
