#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "autostyle/image.hpp"
#include "autostyle/similarity.hpp"
#include "autostyle/stylestats.hpp"

namespace autostyle {

inline constexpr uint32_t kBuiltinFeatureDim = 512;

/// L2-normalized semantic embedding of an image.
struct SemanticFeature {
  std::vector<float> v;
};

struct ClusterModel {
  uint32_t k = 0;
  uint32_t dim = 0;
  std::vector<float> centers;  // row-major k x dim

  const float* center(uint32_t c) const { return centers.data() + size_t(c) * dim; }
};

struct StyleEntry {
  uint32_t style_id = 0;
  StyleDescriptor descriptor;
  std::string source_path;
};

struct RankedStyle {
  uint32_t style_id = 0;
  float score = 0.0f;
};

/// Per cluster, every style exactly once, scores nonincreasing.
struct RankingTable {
  std::vector<std::vector<RankedStyle>> per_cluster;
};

struct StyleIndex {
  ClusterModel model;
  RankingTable rankings;
  std::vector<StyleEntry> styles;
  std::string fingerprint;  // hash of the parameters the index was built with
};

/// Deterministic handcrafted 512-d stand-in for a learned embedding:
/// 8x8 luminance means (64) + 8x8 a,b means (128) + 16x16 joint (a,b)
/// histogram over [-60,60]^2 (256) + 64-bin luminance histogram (64),
/// histograms as fractions, the concatenation L2-normalized.
SemanticFeature builtin_semantic_feature(const RgbImage& img);

/// Reads binary feature files listed in a JSON manifest
/// {"version":1,"features":{"<id>":"<relative path>", ...}}.
/// All files must share one dimension.
std::map<uint32_t, SemanticFeature> load_external_features(
    const std::string& dir, const std::string& manifest_path);

/// Writes one feature vector in the binary format load_external_features
/// expects per file (magic "CAFT", version, dim, f32 little-endian payload).
void save_semantic_feature(const std::string& path, const SemanticFeature& f);

struct KMeansStats {
  std::vector<double> distortion_history;  // after each assignment pass
  int iterations = 0;
};

/// Deterministic k-means++ / Lloyd. Same features, k, and seed give
/// bit-identical centers (no platform-dependent RNG distributions).
ClusterModel kmeans_cluster(const std::vector<SemanticFeature>& features,
                            uint32_t k, uint64_t seed,
                            KMeansStats* stats = nullptr);

/// Nearest center by squared Euclidean distance, ties to the lowest id.
uint32_t assign_cluster(const SemanticFeature& f, const ClusterModel& model);

/// Style voting: per cluster sums style_similarity over member photographs;
/// lists sorted by score descending, ties by style_id ascending.
RankingTable build_ranking(
    const ClusterModel& model,
    const std::vector<std::pair<SemanticFeature, StyleDescriptor>>& collection,
    const std::vector<StyleEntry>& styles, const SimilarityParams& params = {});

/// Directory layout: manifest.json (version, k, dim, fingerprint, per-file
/// CRC32), centers.bin, styles.json, rankings.bin. save/load round-trips
/// bit-exactly; load rejects unknown versions and checksum mismatches.
void save_index(const StyleIndex& index, const std::string& dir);
StyleIndex load_index(const std::string& dir);

/// FNV-1a hash of a canonical parameter string, as fixed-width hex.
std::string fingerprint_string(const std::string& canonical_params);

}  // namespace autostyle
