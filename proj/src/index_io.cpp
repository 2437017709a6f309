#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>
#include <zlib.h>

#include "autostyle/catalog.hpp"
#include "autostyle/error.hpp"

namespace autostyle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint32_t kIndexVersion = 1;
constexpr uint32_t kFeatureFileVersion = 1;

// --- little-endian byte packing -------------------------------------------

void put_u32(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

struct ByteReader {
  const std::string& data;
  size_t off = 0;
  std::string name;

  uint32_t u32() {
    if (off + 4 > data.size())
      throw Error(Errc::invalid_format, name + ": truncated");
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | uint8_t(data[off + i]);
    off += 4;
    return v;
  }
  float f32() {
    const uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  void magic(const char* want) {
    if (off + 4 > data.size() || std::memcmp(data.data() + off, want, 4) != 0)
      throw Error(Errc::invalid_format, name + ": bad magic, expected " + want);
    off += 4;
  }
  void done() {
    if (off != data.size())
      throw Error(Errc::invalid_format, name + ": trailing bytes");
  }
};

// --- file plumbing ----------------------------------------------------------

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, path.string() + ": cannot open for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error(Errc::io_error, path.string() + ": write failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path))
      throw Error(Errc::file_not_found, path.string() + ": no such file");
    throw Error(Errc::io_error, path.string() + ": cannot open for reading");
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

uint32_t checksum(const std::string& bytes) {
  return uint32_t(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), uInt(bytes.size())));
}

// --- payload encodings ------------------------------------------------------

std::string encode_centers(const ClusterModel& model) {
  std::string out = "CACE";
  put_u32(out, kIndexVersion);
  put_u32(out, model.k);
  put_u32(out, model.dim);
  for (float v : model.centers) put_f32(out, v);
  return out;
}

ClusterModel decode_centers(const std::string& bytes) {
  ByteReader r{bytes, 0, "centers.bin"};
  r.magic("CACE");
  const uint32_t version = r.u32();
  if (version != kIndexVersion)
    throw Error(Errc::version_mismatch,
                "centers.bin: version " + std::to_string(version) +
                    " unsupported (expected " + std::to_string(kIndexVersion) + ")");
  ClusterModel model;
  model.k = r.u32();
  model.dim = r.u32();
  if (model.k < 1 || model.dim < 1)
    throw Error(Errc::invalid_format, "centers.bin: empty model");
  model.centers.resize(size_t(model.k) * model.dim);
  for (float& v : model.centers) v = r.f32();
  r.done();
  return model;
}

std::string encode_rankings(const RankingTable& table, uint32_t n_styles) {
  std::string out = "CARK";
  put_u32(out, kIndexVersion);
  put_u32(out, uint32_t(table.per_cluster.size()));
  put_u32(out, n_styles);
  for (const auto& list : table.per_cluster)
    for (const RankedStyle& rs : list) {
      put_u32(out, rs.style_id);
      put_f32(out, rs.score);
    }
  return out;
}

RankingTable decode_rankings(const std::string& bytes, uint32_t* n_styles) {
  ByteReader r{bytes, 0, "rankings.bin"};
  r.magic("CARK");
  const uint32_t version = r.u32();
  if (version != kIndexVersion)
    throw Error(Errc::version_mismatch,
                "rankings.bin: version " + std::to_string(version) + " unsupported");
  const uint32_t k = r.u32();
  const uint32_t n = r.u32();
  RankingTable table;
  table.per_cluster.resize(k);
  for (uint32_t c = 0; c < k; ++c) {
    auto& list = table.per_cluster[c];
    list.resize(n);
    for (uint32_t s = 0; s < n; ++s) {
      list[s].style_id = r.u32();
      list[s].score = r.f32();
    }
  }
  r.done();
  *n_styles = n;
  return table;
}

json descriptor_to_json(const StyleDescriptor& d) {
  json j;
  j["chroma"]["mean"] = {d.chroma.mean.x, d.chroma.mean.y};
  j["chroma"]["cov"] = {d.chroma.cov.m00, d.chroma.cov.m01, d.chroma.cov.m10,
                        d.chroma.cov.m11};
  j["luma"] = d.luma.q;
  return j;
}

StyleDescriptor descriptor_from_json(const json& j) {
  StyleDescriptor d;
  const auto& mean = j.at("chroma").at("mean");
  const auto& cov = j.at("chroma").at("cov");
  d.chroma.mean = {mean.at(0).get<double>(), mean.at(1).get<double>()};
  d.chroma.cov = Mat2{cov.at(0).get<double>(), cov.at(1).get<double>(),
                      cov.at(2).get<double>(), cov.at(3).get<double>()};
  const auto& luma = j.at("luma");
  if (luma.size() != kLumaFeatureSize)
    throw Error(Errc::invalid_format, "styles.json: luma feature size mismatch");
  for (size_t i = 0; i < kLumaFeatureSize; ++i)
    d.luma.q[i] = luma.at(i).get<double>();
  return d;
}

std::string encode_styles(const std::vector<StyleEntry>& styles) {
  json root;
  root["version"] = kIndexVersion;
  root["styles"] = json::array();
  for (const StyleEntry& s : styles) {
    json e = descriptor_to_json(s.descriptor);
    e["id"] = s.style_id;
    e["source_path"] = s.source_path;
    root["styles"].push_back(std::move(e));
  }
  return root.dump(2) + "\n";
}

std::vector<StyleEntry> decode_styles(const std::string& bytes) {
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_format, std::string("styles.json: ") + e.what());
  }
  if (root.at("version").get<uint32_t>() != kIndexVersion)
    throw Error(Errc::version_mismatch, "styles.json: unsupported version");
  std::vector<StyleEntry> styles;
  for (const json& e : root.at("styles")) {
    StyleEntry s;
    s.style_id = e.at("id").get<uint32_t>();
    s.source_path = e.at("source_path").get<std::string>();
    s.descriptor = descriptor_from_json(e);
    styles.push_back(std::move(s));
  }
  return styles;
}

void validate_index(const StyleIndex& index) {
  const uint32_t k = index.model.k;
  if (index.rankings.per_cluster.size() != k)
    throw Error(Errc::invalid_format, "index: ranking table cluster count mismatch");
  std::vector<uint32_t> ids;
  for (const StyleEntry& s : index.styles) ids.push_back(s.style_id);
  std::sort(ids.begin(), ids.end());
  for (const auto& list : index.rankings.per_cluster) {
    if (list.size() != ids.size())
      throw Error(Errc::invalid_format, "index: ranking row size mismatch");
    std::vector<uint32_t> seen;
    for (size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i].score > list[i - 1].score)
        throw Error(Errc::invalid_format, "index: ranking scores not sorted");
      seen.push_back(list[i].style_id);
    }
    std::sort(seen.begin(), seen.end());
    if (seen != ids)
      throw Error(Errc::invalid_format,
                  "index: ranking row is not a permutation of style ids");
  }
}

}  // namespace

void save_index(const StyleIndex& index, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, dir + ": " + ec.message());

  const std::string centers = encode_centers(index.model);
  const std::string rankings =
      encode_rankings(index.rankings, uint32_t(index.styles.size()));
  const std::string styles = encode_styles(index.styles);

  json manifest;
  manifest["version"] = kIndexVersion;
  manifest["k"] = index.model.k;
  manifest["dim"] = index.model.dim;
  manifest["fingerprint"] = index.fingerprint;
  manifest["checksums"]["centers.bin"] = checksum(centers);
  manifest["checksums"]["rankings.bin"] = checksum(rankings);
  manifest["checksums"]["styles.json"] = checksum(styles);

  const fs::path base(dir);
  write_file(base / "centers.bin", centers);
  write_file(base / "rankings.bin", rankings);
  write_file(base / "styles.json", styles);
  write_file(base / "manifest.json", manifest.dump(2) + "\n");
}

StyleIndex load_index(const std::string& dir) {
  const fs::path base(dir);
  json manifest;
  try {
    manifest = json::parse(read_file(base / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_format, std::string("manifest.json: ") + e.what());
  }
  const uint32_t version = manifest.at("version").get<uint32_t>();
  if (version != kIndexVersion)
    throw Error(Errc::version_mismatch,
                "index version " + std::to_string(version) +
                    " unsupported (expected " + std::to_string(kIndexVersion) + ")");

  const auto load_checked = [&](const char* name) {
    const std::string bytes = read_file(base / name);
    const uint32_t want = manifest.at("checksums").at(name).get<uint32_t>();
    if (checksum(bytes) != want)
      throw Error(Errc::checksum_mismatch,
                  std::string(name) + ": checksum mismatch (file corrupted?)");
    return bytes;
  };

  StyleIndex index;
  index.model = decode_centers(load_checked("centers.bin"));
  uint32_t n_styles = 0;
  index.rankings = decode_rankings(load_checked("rankings.bin"), &n_styles);
  index.styles = decode_styles(load_checked("styles.json"));
  index.fingerprint = manifest.at("fingerprint").get<std::string>();

  if (index.model.k != manifest.at("k").get<uint32_t>() ||
      index.model.dim != manifest.at("dim").get<uint32_t>())
    throw Error(Errc::invalid_format, "manifest.json: k/dim disagree with centers.bin");
  if (n_styles != index.styles.size())
    throw Error(Errc::invalid_format,
                "rankings.bin style count disagrees with styles.json");
  validate_index(index);
  return index;
}

void save_semantic_feature(const std::string& path, const SemanticFeature& f) {
  std::string out = "CAFT";
  put_u32(out, kFeatureFileVersion);
  put_u32(out, uint32_t(f.v.size()));
  for (float v : f.v) put_f32(out, v);
  write_file(path, out);
}

namespace {

SemanticFeature load_feature_file(const fs::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    if (e.code() == Errc::file_not_found)
      throw Error(Errc::missing_entry,
                  path.string() + ": feature file listed in manifest is missing");
    throw;
  }
  try {
    ByteReader r{bytes, 0, path.filename().string()};
    r.magic("CAFT");
    const uint32_t version = r.u32();
    if (version != kFeatureFileVersion)
      throw Error(Errc::version_mismatch,
                  path.string() + ": unsupported feature file version");
    const uint32_t dim = r.u32();
    if (dim < 1) throw Error(Errc::invalid_format, "empty feature");
    SemanticFeature f;
    f.v.resize(dim);
    for (float& v : f.v) v = r.f32();
    r.done();

    double norm_sq = 0.0;
    for (float v : f.v) {
      if (!std::isfinite(v))
        throw Error(Errc::invalid_format, "non-finite feature value");
      norm_sq += double(v) * double(v);
    }
    if (norm_sq <= 0.0) throw Error(Errc::invalid_format, "zero feature vector");
    const float inv = float(1.0 / std::sqrt(norm_sq));
    for (float& v : f.v) v *= inv;
    return f;
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_format)
      throw Error(Errc::corrupt_feature_file, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace

std::map<uint32_t, SemanticFeature> load_external_features(
    const std::string& dir, const std::string& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_format,
                manifest_path + ": " + std::string(e.what()));
  }
  if (manifest.at("version").get<uint32_t>() != kFeatureFileVersion)
    throw Error(Errc::version_mismatch, manifest_path + ": unsupported version");

  std::map<uint32_t, SemanticFeature> features;
  uint32_t dim = 0;
  for (const auto& [key, value] : manifest.at("features").items()) {
    uint32_t id = 0;
    try {
      id = uint32_t(std::stoul(key));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_format,
                  manifest_path + ": non-numeric feature id '" + key + "'");
    }
    SemanticFeature f =
        load_feature_file(fs::path(dir) / value.get<std::string>());
    if (dim == 0) dim = uint32_t(f.v.size());
    if (f.v.size() != dim)
      throw Error(Errc::dimension_mismatch,
                  "feature files disagree on dimension: expected " +
                      std::to_string(dim) + ", got " +
                      std::to_string(f.v.size()) + " for id " + key);
    features.emplace(id, std::move(f));
  }
  return features;
}

}  // namespace autostyle
