#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cge/rule_mining.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using cge::Itemset;
using testutil::graph;

namespace {

cge::TransactionDb db_of(oracle::Transactions tx) { return {"v", cge::TransactionScheme::CallerNeighborhood, std::move(tx)}; }

std::set<std::pair<Itemset, Itemset>> rule_keys(const std::vector<cge::CallGraphRule>& rules) {
  std::set<std::pair<Itemset, Itemset>> out;
  for (const auto& r : rules) out.emplace(r.antecedent, r.consequent);
  return out;
}

}  // namespace

TEST(Transactions, CallerNeighborhood) {
  auto g = graph({{"a", "x"}, {"a", "y"}, {"b", "x"}}, "v", {"c"});
  auto db = cge::build_transactions(g);
  EXPECT_EQ(db.transactions, (oracle::Transactions{{"a", "x", "y"}, {"b", "x"}}));
}

TEST(Transactions, ModuleScoped) {
  auto g = cge::CallGraph::make("v", {{"a", "M1"}, {"b", "M1"}, {"x", "M2"}, {"y", "M2"}}, {{"a", "x"}, {"b", "y"}});
  auto db = cge::build_transactions(g, cge::TransactionScheme::ModuleScoped);
  EXPECT_EQ(db.transactions, (oracle::Transactions{{"a", "b", "x", "y"}}));
}

TEST(Transactions, IsolatedNodeAppearsNowhere) {
  auto g = graph({{"a", "b"}}, "v", {"c"});
  for (auto scheme : {cge::TransactionScheme::CallerNeighborhood, cge::TransactionScheme::ModuleScoped})
    for (const auto& t : cge::build_transactions(g, scheme).transactions) {
      EXPECT_FALSE(t.empty());
      EXPECT_EQ(std::count(t.begin(), t.end(), "c"), 0);
    }
}

TEST(FrequentItemsets, SmallExampleAtHalfSupport) {
  oracle::Transactions tx{{"a", "x", "y"}, {"b", "x"}};
  auto fi = cge::mine_frequent_itemsets(db_of(tx), 0.5, 4);
  std::map<Itemset, std::size_t> expected{{{"x"}, 2},      {{"a"}, 1},      {{"y"}, 1},      {{"b"}, 1},
                                          {{"a", "x"}, 1}, {{"a", "y"}, 1}, {{"x", "y"}, 1}, {{"b", "x"}, 1},
                                          {{"a", "x", "y"}, 1}};
  EXPECT_EQ(fi.counts, expected);
  EXPECT_EQ(fi.counts, oracle::frequent_itemsets(tx, 0.5, 4));
  EXPECT_DOUBLE_EQ(fi.support({"x"}), 1.0);
  EXPECT_DOUBLE_EQ(fi.support({"a", "x", "y"}), 0.5);
}

TEST(FrequentItemsets, SmallExampleAtFullSupport) {
  oracle::Transactions tx{{"a", "x", "y"}, {"b", "x"}};
  auto fi = cge::mine_frequent_itemsets(db_of(tx), 1.0, 4);
  EXPECT_EQ(fi.counts, (std::map<Itemset, std::size_t>{{{"x"}, 2}}));
}

TEST(FrequentItemsets, EmptyDatabase) {
  auto fi = cge::mine_frequent_itemsets(db_of({}), 0.5, 4);
  EXPECT_TRUE(fi.empty_database);
  EXPECT_TRUE(fi.counts.empty());
  EXPECT_TRUE(cge::generate_rules(fi, 0.5).empty());
}

TEST(FrequentItemsets, ThresholdValidation) {
  EXPECT_THROW(cge::mine_frequent_itemsets(db_of({{"a"}}), 0.0, 4), cge::Error);
  EXPECT_THROW(cge::mine_frequent_itemsets(db_of({{"a"}}), 1.5, 4), cge::Error);
  EXPECT_THROW(cge::mine_frequent_itemsets(db_of({{"a"}}), 0.5, 0), cge::Error);
  cge::FrequentItemsets fi;
  EXPECT_THROW(cge::generate_rules(fi, -0.1), cge::Error);
  EXPECT_THROW(cge::generate_rules(fi, 1.1), cge::Error);
}

TEST(FrequentItemsets, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    auto tx = oracle::random_transactions(3 + rng() % 10, 1 + rng() % 40, rng);
    double min_sup = 0.05 + 0.05 * static_cast<double>(rng() % 19);
    std::size_t max_size = 1 + rng() % 5;
    EXPECT_EQ(cge::mine_frequent_itemsets(db_of(tx), min_sup, max_size).counts,
              oracle::frequent_itemsets(tx, min_sup, max_size))
        << "trial " << trial;
  }
}

TEST(GenerateRules, ConfidenceSuppressesReverseRule) {
  auto fi = cge::mine_frequent_itemsets(db_of({{"a", "x"}, {"x"}}), 0.5, 4);
  auto rules = cge::generate_rules(fi, 0.8);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].antecedent, Itemset{"a"});
  EXPECT_EQ(rules[0].consequent, Itemset{"x"});
  EXPECT_DOUBLE_EQ(rules[0].confidence, 1.0);
  EXPECT_DOUBLE_EQ(rules[0].support, 0.5);
}

TEST(GenerateRules, ZeroConfidenceEmitsEveryPartition) {
  oracle::Transactions tx{{"a", "x", "y"}, {"b", "x"}};
  auto fi = cge::mine_frequent_itemsets(db_of(tx), 0.5, 4);
  std::size_t expected = 0;
  for (const auto& [z, c] : fi.counts)
    if (z.size() >= 2) expected += (std::size_t{1} << z.size()) - 2;
  EXPECT_EQ(cge::generate_rules(fi, 0.0).size(), expected);
}

TEST(GenerateRules, FourItemRuleFromFourItemset) {
  // Every caller of getKey also calls the three getters.
  oracle::Transactions tx{{"getArtifactId", "getGroupId", "getId", "getKey"},
                          {"getArtifactId", "getGroupId", "getId", "getKey"},
                          {"getArtifactId", "getGroupId", "getId"}};
  auto rules = cge::generate_rules(cge::mine_frequent_itemsets(db_of(tx), 0.5, 4), 0.8);
  auto keys = rule_keys(rules);
  EXPECT_TRUE(keys.count({{"getKey"}, {"getArtifactId", "getGroupId", "getId"}}));
  EXPECT_FALSE(keys.count({{"getArtifactId"}, {"getGroupId", "getId", "getKey"}}));
}

TEST(GenerateRules, MissingSubsetIsMalformed) {
  cge::FrequentItemsets fi;
  fi.transaction_count = 2;
  fi.counts[{"a", "b"}] = 1;
  fi.counts[{"a"}] = 1;
  EXPECT_THROW(cge::generate_rules(fi, 0.5), cge::Error);
}

TEST(GenerateRules, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    auto tx = oracle::random_transactions(3 + rng() % 10, 1 + rng() % 40, rng);
    double min_sup = 0.1 + 0.05 * static_cast<double>(rng() % 17);
    double min_conf = 0.05 * static_cast<double>(rng() % 21);
    auto got = cge::generate_rules(cge::mine_frequent_itemsets(db_of(tx), min_sup, 4), min_conf);
    auto want = oracle::rules(tx, min_sup, min_conf, 4);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].antecedent, want[i].lhs);
      EXPECT_EQ(got[i].consequent, want[i].rhs);
      EXPECT_DOUBLE_EQ(got[i].support, want[i].support);
      EXPECT_DOUBLE_EQ(got[i].confidence, want[i].confidence);
    }
  }
}

TEST(RuleProperties, AntiMonotoneConfidenceAboveSupportAndOrderFree) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    auto tx = oracle::random_transactions(4 + rng() % 8, 5 + rng() % 35, rng);
    double s1 = 0.1 + 0.05 * static_cast<double>(rng() % 8), s2 = s1 + 0.05 * static_cast<double>(1 + rng() % 6);
    double c1 = 0.05 * static_cast<double>(rng() % 15), c2 = std::min(1.0, c1 + 0.05 * static_cast<double>(1 + rng() % 5));
    auto base = cge::generate_rules(cge::mine_frequent_itemsets(db_of(tx), s1, 4), c1);
    auto tighter = cge::generate_rules(cge::mine_frequent_itemsets(db_of(tx), s2, 4), c2);
    auto kb = rule_keys(base), kt = rule_keys(tighter);
    EXPECT_TRUE(std::includes(kb.begin(), kb.end(), kt.begin(), kt.end()));
    for (const auto& r : base) {
      EXPECT_GE(r.confidence + 1e-12, r.support);
      Itemset both = r.antecedent;
      both.insert(both.end(), r.consequent.begin(), r.consequent.end());
      std::sort(both.begin(), both.end());
      EXPECT_EQ(std::adjacent_find(both.begin(), both.end()), both.end()) << "antecedent and consequent overlap";
    }
    auto shuffled = tx;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto again = cge::generate_rules(cge::mine_frequent_itemsets(db_of(shuffled), s1, 4), c1);
    EXPECT_EQ(rule_keys(again), kb);
  }
}

TEST(MineVersionRules, EndToEndOnGraph) {
  auto g = graph({{"c1", "x"}, {"c1", "y"}, {"c2", "x"}, {"c2", "y"}, {"c3", "x"}});
  auto vr = cge::mine_version_rules(g, {0.6, 0.9, 4, cge::TransactionScheme::CallerNeighborhood});
  EXPECT_EQ(vr.transaction_count, 3u);
  auto keys = rule_keys(vr.rules);
  EXPECT_TRUE(keys.count({{"y"}, {"x"}}));
  EXPECT_FALSE(keys.count({{"x"}, {"y"}}));
}

TEST(Schemes, ParseAndPrint) {
  EXPECT_EQ(cge::parse_scheme("module"), cge::TransactionScheme::ModuleScoped);
  EXPECT_EQ(cge::to_string(cge::parse_scheme("caller")), "caller");
  EXPECT_THROW(cge::parse_scheme("pair"), cge::Error);
}
