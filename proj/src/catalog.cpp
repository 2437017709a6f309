#include "autostyle/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "autostyle/colorspace.hpp"
#include "autostyle/error.hpp"

namespace autostyle {

namespace {

// 8x8 block ranges; blocks stay nonempty even for images narrower than the
// grid (ranges then overlap)
struct BlockRange {
  int lo, hi;  // [lo, hi)
};

BlockRange block_range(int extent, int block, int grid) {
  int lo = extent * block / grid;
  int hi = extent * (block + 1) / grid;
  lo = std::min(lo, extent - 1);
  hi = std::max(hi, lo + 1);
  return {lo, std::min(hi, extent)};
}

void push_grid_means(const std::vector<float>& plane, int w, int h,
                     std::vector<float>& out) {
  for (int gy = 0; gy < 8; ++gy) {
    const BlockRange ry = block_range(h, gy, 8);
    for (int gx = 0; gx < 8; ++gx) {
      const BlockRange rx = block_range(w, gx, 8);
      double sum = 0.0;
      for (int y = ry.lo; y < ry.hi; ++y)
        for (int x = rx.lo; x < rx.hi; ++x) sum += plane[size_t(y) * w + x];
      const double count = double(ry.hi - ry.lo) * double(rx.hi - rx.lo);
      out.push_back(float(sum / count));
    }
  }
}

int hist_bin(double v, double lo, double hi, int bins) {
  const int i = int(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp(i, 0, bins - 1);
}

}  // namespace

SemanticFeature builtin_semantic_feature(const RgbImage& img) {
  const LabImage lab = srgb_to_lab(img, kDefaultGamma);
  const int w = lab.width, h = lab.height;
  const size_t n = lab.pixel_count();

  std::vector<float> v;
  v.reserve(kBuiltinFeatureDim);
  push_grid_means(lab.L, w, h, v);
  push_grid_means(lab.a, w, h, v);
  push_grid_means(lab.b, w, h, v);

  // joint (a,b) occupancy as fractions, so the block is resolution-invariant
  std::array<double, 256> joint{};
  std::array<double, 64> lhist{};
  for (size_t i = 0; i < n; ++i) {
    const int ia = hist_bin(lab.a[i], -60.0, 60.0, 16);
    const int ib = hist_bin(lab.b[i], -60.0, 60.0, 16);
    joint[size_t(ia) * 16 + ib] += 1.0;
    lhist[hist_bin(lab.L[i], 0.0, 1.0, 64)] += 1.0;
  }
  for (double c : joint) v.push_back(float(c / double(n)));
  for (double c : lhist) v.push_back(float(c / double(n)));

  double norm_sq = 0.0;
  for (float x : v) norm_sq += double(x) * double(x);
  const float inv = float(1.0 / std::sqrt(norm_sq));  // histograms make this > 0
  for (float& x : v) x *= inv;
  return SemanticFeature{std::move(v)};
}

namespace {

double sqdist(const float* a, const float* b, uint32_t dim) {
  double s = 0.0;
  for (uint32_t i = 0; i < dim; ++i) {
    const double d = double(a[i]) - double(b[i]);
    s += d * d;
  }
  return s;
}

double sqdist_d(const float* a, const double* b, uint32_t dim) {
  double s = 0.0;
  for (uint32_t i = 0; i < dim; ++i) {
    const double d = double(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

// uniform in [0,1) from the top 53 bits; std::*_distribution sequences are
// implementation-defined, which would break cross-toolchain determinism
double unit_double(uint64_t raw) { return double(raw >> 11) * 0x1.0p-53; }

}  // namespace

ClusterModel kmeans_cluster(const std::vector<SemanticFeature>& features,
                            uint32_t k, uint64_t seed, KMeansStats* stats) {
  const size_t n = features.size();
  if (k < 1 || n < k)
    throw Error(Errc::too_few_points,
                "kmeans needs at least k points (k=" + std::to_string(k) +
                    ", points=" + std::to_string(n) + ")");
  const uint32_t dim = uint32_t(features[0].v.size());
  for (const SemanticFeature& f : features)
    if (f.v.size() != dim)
      throw Error(Errc::dimension_mismatch,
                  "inconsistent feature dimensions in kmeans input");

  std::mt19937_64 rng(seed);
  std::vector<double> centers(size_t(k) * dim);
  const auto set_center = [&](uint32_t c, const SemanticFeature& f) {
    for (uint32_t j = 0; j < dim; ++j) centers[size_t(c) * dim + j] = f.v[j];
  };

  // k-means++ seeding
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  set_center(0, features[rng() % n]);
  for (uint32_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i],
                       sqdist_d(features[i].v.data(),
                                centers.data() + size_t(c - 1) * dim, dim));
      total += d2[i];
    }
    size_t pick = 0;
    if (total > 0.0) {
      const double target = unit_double(rng()) * total;
      double cum = 0.0;
      size_t last_positive = 0;
      bool found = false;
      for (size_t i = 0; i < n && !found; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cum += d2[i];
        if (cum > target) {
          pick = i;
          found = true;
        }
      }
      if (!found) pick = last_positive;
    } else {
      pick = rng() % n;  // all duplicates: any choice is equivalent
    }
    set_center(c, features[pick]);
  }

  // Lloyd iterations
  std::vector<uint32_t> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<double> sums(size_t(k) * dim);
  std::vector<size_t> counts(k);
  if (stats) {
    stats->distortion_history.clear();
    stats->iterations = 0;
  }

  for (int iter = 0; iter < 100; ++iter) {
    double distortion = 0.0;
    for (size_t i = 0; i < n; ++i) {
      uint32_t best = 0;
      double best_d = sqdist_d(features[i].v.data(), centers.data(), dim);
      for (uint32_t c = 1; c < k; ++c) {
        const double d =
            sqdist_d(features[i].v.data(), centers.data() + size_t(c) * dim, dim);
        if (d < best_d) {  // strict: ties stay at the lowest id
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      dist[i] = best_d;
      distortion += best_d;
    }
    if (stats) {
      stats->distortion_history.push_back(distortion);
      stats->iterations = iter + 1;
    }

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0u);
    for (size_t i = 0; i < n; ++i) {
      double* row = sums.data() + size_t(assign[i]) * dim;
      for (uint32_t j = 0; j < dim; ++j) row[j] += features[i].v[j];
      ++counts[assign[i]];
    }

    double moved_sq = 0.0, base_sq = 0.0;
    for (uint32_t c = 0; c < k; ++c) {
      double* row = centers.data() + size_t(c) * dim;
      if (counts[c] > 0) {
        for (uint32_t j = 0; j < dim; ++j) {
          const double nc = sums[size_t(c) * dim + j] / double(counts[c]);
          const double d = nc - row[j];
          moved_sq += d * d;
          base_sq += row[j] * row[j];
          row[j] = nc;
        }
      }
    }
    // empty clusters grab the farthest points (ascending cluster id,
    // each reseed consumes its point)
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      size_t far_i = 0;
      double far_d = -1.0;
      for (size_t i = 0; i < n; ++i)
        if (dist[i] > far_d) {
          far_d = dist[i];
          far_i = i;
        }
      double* row = centers.data() + size_t(c) * dim;
      for (uint32_t j = 0; j < dim; ++j) {
        const double d = double(features[far_i].v[j]) - row[j];
        moved_sq += d * d;
        base_sq += row[j] * row[j];
        row[j] = features[far_i].v[j];
      }
      dist[far_i] = -1.0;
    }

    const double rel =
        std::sqrt(moved_sq) / std::max(std::sqrt(base_sq), 1e-12);
    if (rel < 1e-4) break;
  }

  ClusterModel model;
  model.k = k;
  model.dim = dim;
  model.centers.resize(centers.size());
  for (size_t i = 0; i < centers.size(); ++i)
    model.centers[i] = float(centers[i]);
  return model;
}

uint32_t assign_cluster(const SemanticFeature& f, const ClusterModel& model) {
  if (f.v.size() != model.dim)
    throw Error(Errc::dimension_mismatch,
                "feature dim " + std::to_string(f.v.size()) +
                    " does not match model dim " + std::to_string(model.dim));
  uint32_t best = 0;
  double best_d = sqdist(f.v.data(), model.center(0), model.dim);
  for (uint32_t c = 1; c < model.k; ++c) {
    const double d = sqdist(f.v.data(), model.center(c), model.dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

RankingTable build_ranking(
    const ClusterModel& model,
    const std::vector<std::pair<SemanticFeature, StyleDescriptor>>& collection,
    const std::vector<StyleEntry>& styles, const SimilarityParams& params) {
  std::vector<std::vector<double>> sums(
      model.k, std::vector<double>(styles.size(), 0.0));
  for (const auto& [feature, descriptor] : collection) {
    const uint32_t c = assign_cluster(feature, model);
    for (size_t s = 0; s < styles.size(); ++s)
      sums[c][s] += style_similarity(descriptor, styles[s].descriptor, params);
  }

  RankingTable table;
  table.per_cluster.resize(model.k);
  for (uint32_t c = 0; c < model.k; ++c) {
    auto& list = table.per_cluster[c];
    list.reserve(styles.size());
    for (size_t s = 0; s < styles.size(); ++s)
      list.push_back({styles[s].style_id, float(sums[c][s])});
    // order on the frozen f32 scores so the persisted table satisfies its
    // own invariant bit-for-bit
    std::sort(list.begin(), list.end(), [](const RankedStyle& a, const RankedStyle& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.style_id < b.style_id;
    });
  }
  return table;
}

std::string fingerprint_string(const std::string& canonical_params) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_params) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

}  // namespace autostyle
