#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cge/core_model.hpp"
#include "test_util.hpp"

using testutil::graph;

namespace {

// Mean size of each node's set of distinct neighbours, ignoring direction.
double neighbour_set_mean(const cge::CallGraph& g) {
  std::vector<std::set<std::string>> nb(g.procedures().size());
  for (const auto& cp : g.call_pairs()) {
    nb[*g.find(cp.caller)].insert(cp.callee);
    nb[*g.find(cp.callee)].insert(cp.caller);
  }
  double total = 0;
  for (const auto& s : nb) total += static_cast<double>(s.size());
  return total / static_cast<double>(nb.size());
}

}  // namespace

TEST(GraphStats, Triangle) {
  auto s = cge::graph_stats(graph({{"a", "b"}, {"b", "c"}, {"c", "a"}}));
  EXPECT_EQ(s.procedure_count, 3u);
  EXPECT_EQ(s.edge_count, 3u);
  EXPECT_DOUBLE_EQ(s.avg_neighbours, 2.0);
}

TEST(GraphStats, SingleEdge) {
  EXPECT_DOUBLE_EQ(cge::graph_stats(graph({{"a", "b"}})).avg_neighbours, 1.0);
}

TEST(GraphStats, OutStar) {
  auto g = graph({{"s", "x"}, {"s", "y"}, {"s", "z"}});
  EXPECT_DOUBLE_EQ(neighbour_set_mean(g), 1.5);
  EXPECT_DOUBLE_EQ(cge::graph_stats(g).avg_neighbours, 1.5);
}

TEST(GraphStats, ReciprocalPairCountsOneNeighbour) {
  auto s = cge::graph_stats(graph({{"a", "b"}, {"b", "a"}}));
  EXPECT_EQ(s.edge_count, 2u);
  EXPECT_DOUBLE_EQ(s.avg_neighbours, 1.0);
}

TEST(GraphStats, BoundsOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng() % 30;
    auto arcs = oracle::random_digraph(n, 1.0 + static_cast<double>(rng() % 30) / 10.0, rng);
    auto g = testutil::numbered_graph(n, arcs);
    auto s = cge::graph_stats(g);
    EXPECT_NEAR(s.avg_neighbours, neighbour_set_mean(g), 1e-12);
    EXPECT_LE(s.avg_neighbours, static_cast<double>(n - 1) + 1e-12);
    const double bound = 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(n);
    EXPECT_LE(s.avg_neighbours, bound + 1e-12);
    bool reciprocal = false;
    for (auto [u, v] : arcs) reciprocal = reciprocal || g.digraph().has_arc(v, u);
    if (!reciprocal) {
      EXPECT_NEAR(s.avg_neighbours, bound, 1e-12);
    }
  }
}

TEST(CallGraph, NormalizesSelfLoopsAndDuplicates) {
  auto g = cge::CallGraph::make("v", {{"a", "m"}, {"b", "m"}}, {{"a", "b"}, {"a", "b"}, {"b", "b"}});
  EXPECT_EQ(g.call_pairs().size(), 1u);
  EXPECT_EQ(g.self_loop_count(), 1u);
  EXPECT_EQ(g.digraph().arc_count(), 1u);
}

TEST(CallGraph, RejectsInvalidInput) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const cge::Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return cge::ErrorCode::IoError;
  };
  EXPECT_EQ(code_of([] { cge::CallGraph::make("v", {}, {}); }), cge::ErrorCode::EmptyGraph);
  EXPECT_EQ(code_of([] { cge::CallGraph::make("v", {{"a", "m"}}, {{"a", "q"}}); }), cge::ErrorCode::UnknownProcedure);
  EXPECT_EQ(code_of([] { cge::CallGraph::make("v", {{"a", "m"}, {"a", "n"}}, {}); }), cge::ErrorCode::ConflictingModule);
  EXPECT_EQ(code_of([] { cge::CallGraph::make("v", {{"a b", "m"}}, {}); }), cge::ErrorCode::InvalidGraph);
}

TEST(CallGraph, ProceduresSortedAndIndexed) {
  auto g = graph({{"zeta", "alpha"}, {"mid", "zeta"}});
  ASSERT_EQ(g.procedures().size(), 3u);
  EXPECT_EQ(g.procedures()[0].name, "alpha");
  EXPECT_EQ(g.name_of(*g.find("mid")), "mid");
  EXPECT_FALSE(g.find("nope").has_value());
  EXPECT_TRUE(g.digraph().has_arc(*g.find("zeta"), *g.find("alpha")));
  EXPECT_FALSE(g.digraph().has_arc(*g.find("alpha"), *g.find("zeta")));
  EXPECT_TRUE(g.digraph().adjacent(*g.find("alpha"), *g.find("zeta")));
}

TEST(VersionSeries, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(cge::VersionSeries("s", {}), cge::Error);
  try {
    cge::VersionSeries("s", {graph({{"a", "b"}}, "v1"), graph({{"a", "b"}}, "v1")});
    FAIL();
  } catch (const cge::Error& e) {
    EXPECT_EQ(e.code(), cge::ErrorCode::DuplicateVersion);
  }
  cge::VersionSeries ok("s", {graph({{"a", "b"}}, "v1"), graph({{"a", "b"}}, "v2")});
  EXPECT_EQ(ok.version_labels(), (std::vector<std::string>{"v1", "v2"}));
}
