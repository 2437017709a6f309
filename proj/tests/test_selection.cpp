#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <doctest.h>

#include "autostyle/error.hpp"
#include "autostyle/selection.hpp"
#include "autostyle/similarity.hpp"
#include "testutil.hpp"

using namespace autostyle;

namespace {

SemanticFeature feat2(double x, double y) {
  return SemanticFeature{{float(x), float(y)}};
}

// identical unit covariances make the diversity distance exactly the mean gap
StyleDescriptor descriptor_at(double ax, double bx) {
  StyleDescriptor d;
  d.chroma.mean = {ax, bx};
  d.chroma.cov = Mat2{1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < kLumaFeatureSize; ++i)
    d.luma.q[i] = double(i) / (kLumaFeatureSize - 1);
  return d;
}

std::function<const StyleDescriptor&(uint32_t)> lookup(
    const std::map<uint32_t, StyleDescriptor>& styles) {
  return [&styles](uint32_t id) -> const StyleDescriptor& {
    return styles.at(id);
  };
}

ClusterModel grid_model(const std::vector<std::pair<double, double>>& centers) {
  ClusterModel m;
  m.k = uint32_t(centers.size());
  m.dim = 2;
  for (const auto& [x, y] : centers) {
    m.centers.push_back(float(x));
    m.centers.push_back(float(y));
  }
  return m;
}

}  // namespace

// --- nearest_clusters --------------------------------------------------------

TEST_CASE("nearest_clusters returns the center itself first") {
  const ClusterModel model = grid_model({{0, 0}, {3, 0}, {0, 4}, {5, 5}});
  CHECK(nearest_clusters(feat2(0, 4), model, 1) == std::vector<uint32_t>{2});
  CHECK(nearest_clusters(feat2(3, 0), model, 1) == std::vector<uint32_t>{1});
}

TEST_CASE("nearest_clusters with n=k is a distance-sorted permutation") {
  const ClusterModel model = grid_model({{0, 0}, {3, 0}, {0, 4}, {5, 5}});
  const auto ids = nearest_clusters(feat2(0.2, 0.1), model, 4);
  REQUIRE(ids.size() == 4);

  auto sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<uint32_t>{0, 1, 2, 3});

  const auto dist = [&](uint32_t c) {
    const double dx = 0.2 - double(model.center(c)[0]);
    const double dy = 0.1 - double(model.center(c)[1]);
    return dx * dx + dy * dy;
  };
  for (size_t i = 1; i < ids.size(); ++i)
    CHECK(dist(ids[i - 1]) <= dist(ids[i]));
}

TEST_CASE("nearest_clusters breaks exact distance ties by id") {
  const ClusterModel model = grid_model({{9, 9}, {1, 0}, {-1, 0}});
  const auto ids = nearest_clusters(feat2(0, 0), model, 3);
  CHECK(ids == std::vector<uint32_t>{1, 2, 0});
}

TEST_CASE("nearest_clusters matches a brute-force sort oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ClusterModel model;
  model.k = 8;
  model.dim = 5;
  for (uint32_t i = 0; i < model.k * model.dim; ++i)
    model.centers.push_back(float(u(rng)));

  for (int trial = 0; trial < 100; ++trial) {
    SemanticFeature f;
    for (uint32_t j = 0; j < model.dim; ++j) f.v.push_back(float(u(rng)));

    std::vector<std::pair<double, uint32_t>> oracle;
    for (uint32_t c = 0; c < model.k; ++c) {
      double d = 0.0;
      for (uint32_t j = 0; j < model.dim; ++j) {
        const double t = double(f.v[j]) - double(model.center(c)[j]);
        d += t * t;
      }
      oracle.emplace_back(d, c);
    }
    std::sort(oracle.begin(), oracle.end());

    const auto got = nearest_clusters(f, model, 3);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == oracle[i].second);
  }
}

TEST_CASE("nearest_clusters validates its arguments") {
  const ClusterModel model = grid_model({{0, 0}, {1, 1}});
  try {
    nearest_clusters(SemanticFeature{{1.0f, 2.0f, 3.0f}}, model, 1);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
  try {
    nearest_clusters(feat2(0, 0), model, 3);
    FAIL("expected config rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
  CHECK_THROWS_AS(nearest_clusters(feat2(0, 0), model, 0), Error);
}

// --- merge_rankings ----------------------------------------------------------

TEST_CASE("merging a single cluster reproduces its ranking") {
  RankingTable table;
  table.per_cluster = {{{4, 0.9f}, {1, 0.5f}, {9, 0.2f}},
                       {{1, 0.8f}, {9, 0.6f}, {4, 0.1f}}};
  const auto merged = merge_rankings(table, {1});
  REQUIRE(merged.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(merged[i].style_id == table.per_cluster[1][i].style_id);
    CHECK(merged[i].score == table.per_cluster[1][i].score);
  }
}

TEST_CASE("merging two identical clusters doubles scores, keeps order") {
  RankingTable table;
  table.per_cluster = {{{4, 0.9f}, {1, 0.5f}, {9, 0.2f}},
                       {{4, 0.9f}, {1, 0.5f}, {9, 0.2f}}};
  const auto merged = merge_rankings(table, {0, 1});
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].style_id == 4);
  CHECK(merged[0].score == doctest::Approx(1.8).epsilon(1e-7));
  CHECK(merged[1].style_id == 1);
  CHECK(merged[1].score == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(merged[2].style_id == 9);
  CHECK(merged[2].score == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("merged order follows the aggregate, not any single cluster") {
  // cluster A favors s1, cluster B favors s2; the sums flip the order
  RankingTable table;
  table.per_cluster = {{{1, 0.9f}, {2, 0.1f}}, {{2, 0.85f}, {1, 0.0f}}};
  const auto merged = merge_rankings(table, {0, 1});
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].style_id == 2);
  CHECK(merged[0].score == doctest::Approx(0.95).epsilon(1e-7));
  CHECK(merged[1].style_id == 1);
  CHECK(merged[1].score == doctest::Approx(0.9).epsilon(1e-7));
}

TEST_CASE("merge_rankings breaks score ties by ascending style id") {
  RankingTable table;
  table.per_cluster = {{{7, 0.5f}, {2, 0.5f}, {5, 0.25f}}};
  const auto merged = merge_rankings(table, {0});
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].style_id == 2);
  CHECK(merged[1].style_id == 7);
  CHECK(merged[2].style_id == 5);
}

TEST_CASE("merge_rankings rejects unknown clusters and empty input") {
  RankingTable table;
  table.per_cluster = {{{1, 1.0f}}};
  try {
    merge_rankings(table, {0, 5});
    FAIL("expected unknown cluster");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_cluster);
  }
  CHECK_THROWS_AS(merge_rankings(table, {}), Error);
}

// --- sample_diverse -----------------------------------------------------------

TEST_CASE("threshold zero keeps the top-k ranking verbatim") {
  std::map<uint32_t, StyleDescriptor> styles;
  std::vector<RankedStyle> ranked;
  for (uint32_t id = 0; id < 6; ++id) {
    styles[id] = descriptor_at(0.0, 0.0);  // all coincident
    ranked.push_back({id, float(1.0 - 0.1 * id)});
  }
  const auto got = sample_diverse(ranked, lookup(styles), 0.0, 4);
  CHECK(got == std::vector<uint32_t>{0, 1, 2, 3});
}

TEST_CASE("identical styles collapse to a single selection") {
  std::map<uint32_t, StyleDescriptor> styles;
  std::vector<RankedStyle> ranked;
  for (uint32_t id = 0; id < 5; ++id) {
    styles[id] = descriptor_at(12.0, -4.0);
    ranked.push_back({id, float(1.0 - 0.1 * id)});
  }
  const auto got = sample_diverse(ranked, lookup(styles), 7.5, 5);
  CHECK(got == std::vector<uint32_t>{0});
}

TEST_CASE("greedy rule drops a near style but keeps a far one") {
  // pairwise distances: d(1,2)=5, d(1,3)=10, d(2,3)=10
  std::map<uint32_t, StyleDescriptor> styles;
  styles[1] = descriptor_at(0.0, 0.0);
  styles[2] = descriptor_at(5.0, 0.0);
  styles[3] = descriptor_at(2.5, std::sqrt(93.75));
  CHECK(frechet(styles.at(1).chroma, styles.at(2).chroma) ==
        doctest::Approx(5.0).epsilon(1e-9));
  CHECK(frechet(styles.at(1).chroma, styles.at(3).chroma) ==
        doctest::Approx(10.0).epsilon(1e-9));
  CHECK(frechet(styles.at(2).chroma, styles.at(3).chroma) ==
        doctest::Approx(10.0).epsilon(1e-9));

  const std::vector<RankedStyle> ranked = {{1, 0.9f}, {2, 0.8f}, {3, 0.7f}};
  const auto got = sample_diverse(ranked, lookup(styles), 7.5, 3);
  CHECK(got == std::vector<uint32_t>{1, 3});
}

TEST_CASE("sampling properties hold on random instances") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> um(-30.0, 30.0);
  std::uniform_real_distribution<double> ut(0.0, 20.0);

  for (int trial = 0; trial < 50; ++trial) {
    std::map<uint32_t, StyleDescriptor> styles;
    std::vector<RankedStyle> ranked;
    const int n = 12;
    for (uint32_t id = 0; id < n; ++id) {
      StyleDescriptor d;
      d.chroma.mean = {um(rng), um(rng)};
      d.chroma.cov = testutil::random_spd(rng, 1.0, 50.0);
      styles[id] = d;
      ranked.push_back({id, float(n - id)});
    }
    const double t_lo = ut(rng);
    const double t_hi = t_lo + ut(rng);

    const auto lo = sample_diverse(ranked, lookup(styles), t_lo, 5);
    const auto hi = sample_diverse(ranked, lookup(styles), t_hi, 5);

    REQUIRE(!lo.empty());
    CHECK(lo.front() == ranked.front().style_id);  // top rank always kept
    CHECK(hi.size() <= lo.size());                 // threshold monotonicity

    // pairwise separation and rank-order preservation
    for (size_t i = 0; i < lo.size(); ++i) {
      for (size_t j = i + 1; j < lo.size(); ++j) {
        CHECK(frechet(styles.at(lo[i]).chroma, styles.at(lo[j]).chroma) >=
              t_lo - 1e-12);
        CHECK(lo[i] < lo[j]);  // ranked list was in ascending id order
      }
    }
  }
}

TEST_CASE("selection returns short when diversity exhausts the list") {
  std::map<uint32_t, StyleDescriptor> styles;
  styles[0] = descriptor_at(0.0, 0.0);
  styles[1] = descriptor_at(100.0, 0.0);
  styles[2] = descriptor_at(1.0, 0.0);  // crowds style 0
  const std::vector<RankedStyle> ranked = {{0, 3.0f}, {1, 2.0f}, {2, 1.0f}};
  const auto got = sample_diverse(ranked, lookup(styles), 7.5, 3);
  CHECK(got == std::vector<uint32_t>{0, 1});
}

// --- select_styles -------------------------------------------------------------

namespace {

StyleIndex single_cluster_index() {
  StyleIndex index;
  index.model = grid_model({{0, 0}});
  index.styles.resize(3);
  index.styles[0] = {10, {}, "a.png"};
  index.styles[1] = {11, {}, "b.png"};
  index.styles[2] = {12, {}, "c.png"};
  index.styles[0].descriptor = descriptor_at(0.0, 0.0);
  index.styles[1].descriptor = descriptor_at(50.0, 0.0);
  index.styles[2].descriptor = descriptor_at(0.0, 50.0);
  index.rankings.per_cluster = {{{11, 0.9f}, {10, 0.6f}, {12, 0.3f}}};
  index.fingerprint = "f";
  return index;
}

SemanticFeature constant_feature(const RgbImage&) {
  return SemanticFeature{{0.0f, 0.0f}};
}

}  // namespace

TEST_CASE("select_styles composes retrieval, merging, and sampling") {
  const StyleIndex index = single_cluster_index();
  SelectionConfig cfg;
  cfg.n_clusters = 1;
  cfg.k_outputs = 2;
  cfg.diversity_threshold = 7.5;

  const RgbImage img(4, 4);
  const auto picked = select_styles(img, index, constant_feature, cfg);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].entry.style_id == 11);
  CHECK(picked[0].score == 0.9f);
  CHECK(picked[0].entry.source_path == "b.png");
  CHECK(picked[1].entry.style_id == 10);
  CHECK(picked[1].score == 0.6f);

  // deterministic: a second identical query returns the same list
  const auto again = select_styles(img, index, constant_feature, cfg);
  REQUIRE(again.size() == picked.size());
  for (size_t i = 0; i < picked.size(); ++i) {
    CHECK(again[i].entry.style_id == picked[i].entry.style_id);
    CHECK(again[i].score == picked[i].score);
  }
}

TEST_CASE("select_styles validates configuration up front") {
  const StyleIndex index = single_cluster_index();
  const RgbImage img(2, 2);

  SelectionConfig bad;
  bad.n_clusters = 0;
  CHECK_THROWS_AS(select_styles(img, index, constant_feature, bad), Error);

  bad = SelectionConfig{};
  bad.n_clusters = 2;  // index only has one cluster
  try {
    select_styles(img, index, constant_feature, bad);
    FAIL("expected config rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }

  bad = SelectionConfig{};
  bad.diversity_threshold = -1.0;
  CHECK_THROWS_AS(select_styles(img, index, constant_feature, bad), Error);

  bad = SelectionConfig{};
  bad.k_outputs = 0;
  CHECK_THROWS_AS(select_styles(img, index, constant_feature, bad), Error);
}

TEST_CASE("select_styles propagates a feature dimension mismatch") {
  const StyleIndex index = single_cluster_index();
  const RgbImage img(2, 2);
  SelectionConfig cfg;
  cfg.n_clusters = 1;
  const auto bad_provider = [](const RgbImage&) {
    return SemanticFeature{{1.0f, 2.0f, 3.0f}};
  };
  try {
    select_styles(img, index, bad_provider, cfg);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}

TEST_CASE("raising the threshold never grows the selection") {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> um(-25.0, 25.0);

  StyleIndex index;
  index.model = grid_model({{0, 0}, {5, 5}});
  std::vector<std::pair<SemanticFeature, StyleDescriptor>> collection;
  for (uint32_t id = 0; id < 10; ++id) {
    StyleEntry e;
    e.style_id = id;
    e.descriptor.chroma.mean = {um(rng), um(rng)};
    e.descriptor.chroma.cov = testutil::random_spd(rng, 1.0, 60.0);
    for (int i = 0; i < kLumaFeatureSize; ++i)
      e.descriptor.luma.q[i] = double(i) / (kLumaFeatureSize - 1);
    index.styles.push_back(std::move(e));
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    StyleDescriptor d;
    d.chroma.mean = {um(rng), um(rng)};
    d.chroma.cov = testutil::random_spd(rng, 1.0, 60.0);
    for (int q = 0; q < kLumaFeatureSize; ++q)
      d.luma.q[q] = double(q) / (kLumaFeatureSize - 1);
    collection.emplace_back(feat2(u01(rng) * 6, u01(rng) * 6), d);
  }
  index.rankings = build_ranking(index.model, collection, index.styles);
  index.fingerprint = "t";

  const RgbImage img(3, 3);
  SelectionConfig cfg;
  cfg.n_clusters = 2;
  cfg.k_outputs = 8;

  size_t prev = SIZE_MAX;
  for (double t : {0.0, 2.0, 5.0, 10.0, 25.0, 80.0}) {
    cfg.diversity_threshold = t;
    const auto picked = select_styles(img, index, constant_feature, cfg);
    CHECK(picked.size() <= prev);
    prev = picked.size();
  }
}
