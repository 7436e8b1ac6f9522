#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cge/complexity.hpp"
#include "cge/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

const cge::GraphletClass& class_with(int k, std::initializer_list<std::pair<int, int>> arcs) {
  oracle::Matrix m(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 0));
  for (auto [u, v] : arcs) m[u][v] = 1;
  auto code = oracle::min_string(m);
  for (const auto& c : cge::catalog_for(k).classes())
    if (c.canonical_code() == code) return c;
  throw std::logic_error("class not found");
}

oracle::Matrix matrix_of(const cge::GraphletClass& c) {
  oracle::Matrix m(static_cast<std::size_t>(c.size), std::vector<int>(static_cast<std::size_t>(c.size), 0));
  for (auto [u, v] : c.arcs()) m[u][v] = 1;
  return m;
}

}  // namespace

TEST(Cyclomatic, Examples) {
  EXPECT_EQ(cge::cyclomatic(class_with(4, {{0, 1}, {0, 2}, {0, 3}})), 1);
  EXPECT_EQ(cge::cyclomatic(class_with(4, {{0, 1}, {1, 2}, {2, 3}})), 1);
  EXPECT_EQ(cge::cyclomatic(class_with(3, {{0, 1}, {1, 2}, {2, 0}})), 2);
  EXPECT_EQ(cge::cyclomatic(class_with(2, {{0, 1}, {1, 0}})), 2);
}

TEST(Cyclomatic, AgreesWithCycleRankAcrossCatalog) {
  for (int k : {2, 3, 4})
    for (const auto& c : cge::catalog_for(k).classes()) {
      int rank = oracle::cycle_rank(matrix_of(c));
      EXPECT_EQ(cge::cyclomatic(c), rank + 1) << c.canonical_code();
      if (c.arc_count() == k - 1) {
        EXPECT_EQ(cge::cyclomatic(c), 1);
      }
    }
}

TEST(CgCx, Examples) {
  const auto& tree = class_with(3, {{0, 1}, {1, 2}});
  const auto& cycle = class_with(3, {{0, 1}, {1, 2}, {2, 0}});
  std::vector<std::pair<cge::GraphletClass, double>> one{{tree, 100.0}};
  EXPECT_DOUBLE_EQ(cge::cg_cx(one).value, 1.0);
  std::vector<std::pair<cge::GraphletClass, double>> two{{tree, 50.0}, {cycle, 50.0}};
  EXPECT_DOUBLE_EQ(cge::cg_cx(two).value, 1.5);
  auto empty = cge::cg_cx({});
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_TRUE(empty.degenerate);
}

TEST(CgCx, TreeDominatedVersionStaysNearOne) {
  // Three tree classes at 39.55%, 34.25% and 13.85%, the rest on the most
  // cyclic size-4 class.
  const auto& cat = cge::catalog_for(4);
  std::vector<const cge::GraphletClass*> trees;
  const cge::GraphletClass* densest = &cat.classes().front();
  for (const auto& c : cat.classes()) {
    if (c.arc_count() == 3) trees.push_back(&c);
    if (cge::cyclomatic(c) > cge::cyclomatic(*densest)) densest = &c;
  }
  ASSERT_GE(trees.size(), 3u);
  const double tree_share = 39.55 + 34.25 + 13.85;
  EXPECT_NEAR(tree_share, 87.65, 1e-9);
  std::vector<std::pair<cge::GraphletClass, double>> f{
      {*trees[0], 39.55}, {*trees[1], 34.25}, {*trees[2], 13.85}, {*densest, 100.0 - tree_share}};
  auto v = cge::cg_cx(f).value;
  const double bound = 1.0 * tree_share / 100.0 + cge::cyclomatic(*densest) * (100.0 - tree_share) / 100.0;
  EXPECT_LE(v, bound + 1e-12);
  EXPECT_GE(v, 1.0);
}

TEST(CgCx, BetweenMinAndMaxUsedComplexity) {
  std::mt19937_64 rng(8);
  const auto& classes = cge::catalog_for(4).classes();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<cge::GraphletClass, double>> f;
    std::vector<double> w;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) w.push_back(1.0 + static_cast<double>(rng() % 100));
    double total = 0;
    for (auto x : w) total += x;
    int lo = 100, hi = 0;
    for (auto x : w) {
      const auto& c = classes[rng() % classes.size()];
      f.emplace_back(c, 100.0 * x / total);
      lo = std::min(lo, cge::cyclomatic(c));
      hi = std::max(hi, cge::cyclomatic(c));
    }
    auto v = cge::cg_cx(f).value;
    EXPECT_GE(v, lo - 1e-9);
    EXPECT_LE(v, hi + 1e-9);
  }
}

TEST(CgCx, AbsoluteWeights) {
  const auto& tree = class_with(3, {{0, 1}, {1, 2}});
  const auto& cycle = class_with(3, {{0, 1}, {1, 2}, {2, 0}});
  std::vector<std::pair<cge::GraphletClass, std::uint64_t>> counts{{tree, 3}, {cycle, 2}};
  EXPECT_DOUBLE_EQ(cge::cg_cx_absolute(counts).value, 7.0);
  EXPECT_TRUE(cge::cg_cx_absolute({}).degenerate);
}

TEST(EcgCx, MeanOfVersions) {
  std::vector<cge::VersionComplexity> v{{"a", 1.0, false}, {"b", 2.0, false}};
  EXPECT_DOUBLE_EQ(cge::mean_of(v), 1.5);
}

TEST(EcgCx, IdenticalVersionsGiveFlatSeries) {
  std::mt19937_64 rng(12);
  auto arcs = oracle::random_digraph(40, 2.4, rng);
  std::vector<cge::CallGraph> graphs;
  for (int v = 0; v < 4; ++v) graphs.push_back(testutil::numbered_graph(40, arcs, "v" + std::to_string(v)));
  cge::VersionSeries s("s", std::move(graphs));
  auto r = cge::ecg_cx(cge::frequency_series(s, {3, 4}));
  for (const auto& v : r.per_version) EXPECT_DOUBLE_EQ(v.cg_cx, r.ecg_cx);
}

TEST(EcgCx, InvariantUnderVersionOrder) {
  cge::SynthParams p;
  p.nodes = 80;
  p.versions = 5;
  p.churn = 0.2;
  auto graphs = cge::synthesize_series(p);
  auto forward = cge::ecg_cx(cge::frequency_series(cge::VersionSeries("s", graphs), {3, 4}));
  std::reverse(graphs.begin(), graphs.end());
  auto backward = cge::ecg_cx(cge::frequency_series(cge::VersionSeries("s", graphs), {3, 4}));
  EXPECT_NEAR(forward.ecg_cx, backward.ecg_cx, 1e-12);
  for (std::size_t i = 0; i < forward.per_version.size(); ++i)
    EXPECT_EQ(forward.per_version[i].cg_cx, backward.per_version[forward.per_version.size() - 1 - i].cg_cx);
}

TEST(EcgCx, DegenerateVersionScoresZero) {
  cge::VersionSeries s("s", {testutil::graph({{"a", "b"}}, "tiny"), testutil::graph({{"a", "b"}, {"b", "c"}}, "path")});
  auto r = cge::ecg_cx(cge::frequency_series(s, {3}));
  EXPECT_TRUE(r.per_version[0].degenerate);
  EXPECT_EQ(r.per_version[0].cg_cx, 0.0);
  EXPECT_DOUBLE_EQ(r.per_version[1].cg_cx, 1.0);
  EXPECT_DOUBLE_EQ(r.ecg_cx, 0.5);
  auto csv = cge::complexity_to_csv(r);
  EXPECT_NE(csv.find("tiny;0;1\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("ECG-Cx;0.5;0\n"), std::string::npos) << csv;
}

TEST(Weights, ParseAndPrint) {
  EXPECT_EQ(cge::parse_weights("absolute"), cge::ComplexityWeights::Absolute);
  EXPECT_EQ(cge::to_string(cge::ComplexityWeights::Relative), "relative");
  EXPECT_THROW(cge::parse_weights("log"), cge::Error);
}
