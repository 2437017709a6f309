#include "autostyle/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "autostyle/error.hpp"
#include "autostyle/similarity.hpp"

namespace autostyle {

std::vector<uint32_t> nearest_clusters(const SemanticFeature& f,
                                       const ClusterModel& model, uint32_t n) {
  if (n < 1 || n > model.k)
    throw Error(Errc::invalid_config,
                "nearest_clusters: n=" + std::to_string(n) +
                    " out of range for k=" + std::to_string(model.k));
  if (f.v.size() != model.dim)
    throw Error(Errc::dimension_mismatch,
                "feature dim " + std::to_string(f.v.size()) +
                    " does not match model dim " + std::to_string(model.dim));

  std::vector<std::pair<double, uint32_t>> by_dist;
  by_dist.reserve(model.k);
  for (uint32_t c = 0; c < model.k; ++c) {
    const float* ctr = model.center(c);
    double d = 0.0;
    for (uint32_t j = 0; j < model.dim; ++j) {
      const double t = double(f.v[j]) - double(ctr[j]);
      d += t * t;
    }
    by_dist.emplace_back(d, c);
  }
  std::sort(by_dist.begin(), by_dist.end());  // pair order = (distance, id)

  std::vector<uint32_t> ids(n);
  for (uint32_t i = 0; i < n; ++i) ids[i] = by_dist[i].second;
  return ids;
}

std::vector<RankedStyle> merge_rankings(const RankingTable& table,
                                        const std::vector<uint32_t>& clusters) {
  if (clusters.empty())
    throw Error(Errc::invalid_config, "merge_rankings: no clusters given");

  std::map<uint32_t, double> sums;
  for (uint32_t c : clusters) {
    if (c >= table.per_cluster.size())
      throw Error(Errc::unknown_cluster,
                  "cluster " + std::to_string(c) + " not in ranking table of " +
                      std::to_string(table.per_cluster.size()));
    for (const RankedStyle& rs : table.per_cluster[c])
      sums[rs.style_id] += double(rs.score);
  }

  std::vector<RankedStyle> merged;
  merged.reserve(sums.size());
  for (const auto& [id, sum] : sums) merged.push_back({id, float(sum)});
  // freeze to f32 before sorting so the published order matches the
  // published scores even when the doubles differ below f32 resolution
  std::sort(merged.begin(), merged.end(),
            [](const RankedStyle& a, const RankedStyle& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.style_id < b.style_id;
            });
  return merged;
}

std::vector<uint32_t> sample_diverse(
    const std::vector<RankedStyle>& ranked,
    const std::function<const StyleDescriptor&(uint32_t)>& descriptor_of,
    double threshold, uint32_t k) {
  std::vector<uint32_t> accepted;
  for (const RankedStyle& rs : ranked) {
    if (accepted.size() >= k) break;
    bool diverse = true;
    for (uint32_t prev : accepted) {
      const double d = frechet(descriptor_of(rs.style_id).chroma,
                               descriptor_of(prev).chroma);
      if (d < threshold) {
        diverse = false;
        break;
      }
    }
    if (diverse) accepted.push_back(rs.style_id);
  }
  return accepted;
}

std::vector<SelectedStyle> select_styles(
    const RgbImage& input, const StyleIndex& index,
    const std::function<SemanticFeature(const RgbImage&)>& feature_provider,
    const SelectionConfig& cfg) {
  if (cfg.n_clusters < 1 || cfg.k_outputs < 1 ||
      !(cfg.diversity_threshold >= 0.0) ||
      !std::isfinite(cfg.diversity_threshold))
    throw Error(Errc::invalid_config,
                "selection config: need n_clusters >= 1, k_outputs >= 1, "
                "finite diversity_threshold >= 0");
  if (cfg.n_clusters > index.model.k)
    throw Error(Errc::invalid_config,
                "selection config: n_clusters=" + std::to_string(cfg.n_clusters) +
                    " exceeds index cluster count " +
                    std::to_string(index.model.k));

  std::map<uint32_t, const StyleEntry*> by_id;
  for (const StyleEntry& s : index.styles) by_id[s.style_id] = &s;
  const auto descriptor_of = [&](uint32_t id) -> const StyleDescriptor& {
    const auto it = by_id.find(id);
    if (it == by_id.end())
      throw Error(Errc::missing_entry,
                  "style " + std::to_string(id) + " not present in the index");
    return it->second->descriptor;
  };

  const SemanticFeature f = feature_provider(input);
  const std::vector<uint32_t> clusters =
      nearest_clusters(f, index.model, cfg.n_clusters);
  const std::vector<RankedStyle> merged = merge_rankings(index.rankings, clusters);
  const std::vector<uint32_t> chosen =
      sample_diverse(merged, descriptor_of, cfg.diversity_threshold, cfg.k_outputs);

  std::vector<SelectedStyle> result;
  result.reserve(chosen.size());
  for (uint32_t id : chosen) {
    const auto it = std::find_if(merged.begin(), merged.end(),
                                 [&](const RankedStyle& rs) {
                                   return rs.style_id == id;
                                 });
    result.push_back({*by_id.at(id), it->score});
  }
  return result;
}

}  // namespace autostyle
