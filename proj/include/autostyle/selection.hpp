#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "autostyle/catalog.hpp"

namespace autostyle {

struct SelectionConfig {
  uint32_t n_clusters = 3;         // nearest semantic clusters to merge
  double diversity_threshold = 7.5;  // minimum pairwise chroma distance
  uint32_t k_outputs = 5;
};

/// A chosen style together with its merged-ranking score.
struct SelectedStyle {
  StyleEntry entry;
  float score = 0.0f;
};

/// The n cluster ids nearest to f, ascending by squared Euclidean distance,
/// ties by id. Requires 1 <= n <= model.k.
std::vector<uint32_t> nearest_clusters(const SemanticFeature& f,
                                       const ClusterModel& model, uint32_t n);

/// Sums each style's per-cluster scores over the chosen clusters into one
/// list, sorted descending, ties by style_id. Every style appears once.
std::vector<RankedStyle> merge_rankings(const RankingTable& table,
                                        const std::vector<uint32_t>& clusters);

/// Greedy scan in rank order: a candidate is kept iff its chroma Gaussian is
/// at least `threshold` away (Fréchet distance) from every style already
/// kept. The top-ranked style is always kept. Stops at k accepted; may
/// return fewer when the list runs out.
std::vector<uint32_t> sample_diverse(
    const std::vector<RankedStyle>& ranked,
    const std::function<const StyleDescriptor&(uint32_t)>& descriptor_of,
    double threshold, uint32_t k);

/// Full run-time query: feature -> nearest clusters -> merged ranking ->
/// diverse sampling. Deterministic for fixed inputs.
std::vector<SelectedStyle> select_styles(
    const RgbImage& input, const StyleIndex& index,
    const std::function<SemanticFeature(const RgbImage&)>& feature_provider,
    const SelectionConfig& cfg = {});

}  // namespace autostyle
