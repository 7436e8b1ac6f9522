#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cge/core_model.hpp"
#include "cge/error.hpp"

namespace cge {

/// Sorted, duplicate-free list of procedure names.
using Itemset = std::vector<std::string>;

/// Tolerance on threshold comparisons, so that e.g. 3/10 passes minSup = 0.3.
inline constexpr double kThresholdEpsilon = 1e-12;

inline bool meets_threshold(double value, double threshold) { return value >= threshold - kThresholdEpsilon; }

enum class TransactionScheme {
  /// One transaction per calling procedure: the caller and all its callees.
  CallerNeighborhood,
  /// One transaction per module: its calling procedures and their callees.
  ModuleScoped,
};

inline std::string_view to_string(TransactionScheme s) {
  return s == TransactionScheme::CallerNeighborhood ? "caller" : "module";
}

inline TransactionScheme parse_scheme(std::string_view s) {
  if (s == "caller") return TransactionScheme::CallerNeighborhood;
  if (s == "module") return TransactionScheme::ModuleScoped;
  throw Error(ErrorCode::InvalidParams, "unknown transaction scheme '" + std::string(s) + "' (caller|module)");
}

struct TransactionDb {
  std::string version_label;
  TransactionScheme scheme = TransactionScheme::CallerNeighborhood;
  std::vector<Itemset> transactions;
};

inline TransactionDb build_transactions(const CallGraph& cg,
                                        TransactionScheme scheme = TransactionScheme::CallerNeighborhood) {
  const auto& g = cg.digraph();
  TransactionDb db{cg.version_label(), scheme, {}};

  // Node ids follow name order, so sorted id lists map to sorted name lists.
  auto to_names = [&](std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Itemset items;
    items.reserve(ids.size());
    for (auto id : ids) items.push_back(cg.name_of(id));
    return items;
  };

  if (scheme == TransactionScheme::CallerNeighborhood) {
    for (NodeId u = 0; u < g.node_count(); ++u) {
      if (g.out(u).empty()) continue;
      std::vector<NodeId> ids(g.out(u).begin(), g.out(u).end());
      ids.push_back(u);
      db.transactions.push_back(to_names(std::move(ids)));
    }
  } else {
    std::map<std::string_view, std::vector<NodeId>> per_module;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      if (g.out(u).empty()) continue;
      auto& ids = per_module[cg.module_of(u)];
      ids.push_back(u);
      ids.insert(ids.end(), g.out(u).begin(), g.out(u).end());
    }
    for (auto& [module, ids] : per_module) db.transactions.push_back(to_names(std::move(ids)));
  }
  return db;
}

struct FrequentItemsets {
  std::size_t transaction_count = 0;
  /// Occurrence count per frequent itemset.
  std::map<Itemset, std::size_t> counts;
  /// Set when the database had no transactions; the result is then empty.
  bool empty_database = false;

  double support(const Itemset& items) const {
    auto it = counts.find(items);
    if (it == counts.end() || transaction_count == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(transaction_count);
  }
};

namespace detail {

using ItemIds = std::vector<std::uint32_t>;

inline std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::size_t{1} << 40)) return r;
  }
  return r;
}

template <class Fn>
void for_each_subset(const ItemIds& items, std::size_t k, Fn&& fn) {
  ItemIds current;
  current.reserve(k);
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (current.size() == k) {
      fn(current);
      return;
    }
    for (std::size_t i = start; i + (k - current.size()) <= items.size(); ++i) {
      current.push_back(items[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace detail

/// Level-wise (Apriori) mining of every itemset with at most `max_size` items
/// and support >= min_support.
inline FrequentItemsets mine_frequent_itemsets(const TransactionDb& db, double min_support, std::size_t max_size) {
  if (!(min_support > 0.0 && min_support <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "minSup must be in (0, 1]");
  if (max_size < 1) throw Error(ErrorCode::InvalidThreshold, "max itemset size must be >= 1");

  FrequentItemsets result;
  result.transaction_count = db.transactions.size();
  if (db.transactions.empty()) {
    result.empty_database = true;
    return result;
  }
  const double total = static_cast<double>(db.transactions.size());
  auto frequent = [&](std::size_t count) { return meets_threshold(static_cast<double>(count) / total, min_support); };

  std::vector<std::string> items;
  for (const auto& t : db.transactions) items.insert(items.end(), t.begin(), t.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  auto id_of = [&](const std::string& s) {
    return static_cast<std::uint32_t>(std::lower_bound(items.begin(), items.end(), s) - items.begin());
  };

  std::vector<std::size_t> item_counts(items.size(), 0);
  std::vector<detail::ItemIds> encoded;
  encoded.reserve(db.transactions.size());
  for (const auto& t : db.transactions) {
    detail::ItemIds ids;
    ids.reserve(t.size());
    for (const auto& s : t) ids.push_back(id_of(s));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) ++item_counts[id];
    encoded.push_back(std::move(ids));
  }

  auto emit = [&](const detail::ItemIds& ids, std::size_t count) {
    Itemset names;
    names.reserve(ids.size());
    for (auto id : ids) names.push_back(items[id]);
    result.counts.emplace(std::move(names), count);
  };

  std::vector<detail::ItemIds> level;
  std::vector<char> item_frequent(items.size(), 0);
  for (std::uint32_t id = 0; id < items.size(); ++id) {
    if (!frequent(item_counts[id])) continue;
    item_frequent[id] = 1;
    level.push_back({id});
    emit(level.back(), item_counts[id]);
  }

  // Infrequent items can never be part of a frequent itemset.
  for (auto& t : encoded)
    t.erase(std::remove_if(t.begin(), t.end(), [&](std::uint32_t id) { return !item_frequent[id]; }), t.end());

  for (std::size_t k = 2; k <= max_size && level.size() >= 2; ++k) {
    // Join (k-1)-itemsets sharing their first k-2 items; prune by downward closure.
    std::vector<detail::ItemIds> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (!std::equal(level[a].begin(), level[a].end() - 1, level[b].begin())) break;
        detail::ItemIds cand = level[a];
        cand.push_back(level[b].back());
        bool closed = true;
        for (std::size_t drop = 0; drop + 2 < cand.size() && closed; ++drop) {
          detail::ItemIds sub;
          sub.reserve(k - 1);
          for (std::size_t j = 0; j < cand.size(); ++j)
            if (j != drop) sub.push_back(cand[j]);
          closed = std::binary_search(level.begin(), level.end(), sub);
        }
        if (closed) candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;

    std::map<detail::ItemIds, std::size_t> counts;
    for (const auto& c : candidates) counts.emplace(c, 0);
    for (const auto& t : encoded) {
      if (t.size() < k) continue;
      if (detail::choose(t.size(), k) <= candidates.size()) {
        detail::for_each_subset(t, k, [&](const detail::ItemIds& sub) {
          auto it = counts.find(sub);
          if (it != counts.end()) ++it->second;
        });
      } else {
        for (auto& [cand, count] : counts)
          if (std::includes(t.begin(), t.end(), cand.begin(), cand.end())) ++count;
      }
    }

    level.clear();
    for (const auto& [cand, count] : counts) {
      if (!frequent(count)) continue;
      level.push_back(cand);
      emit(cand, count);
    }
  }
  return result;
}

struct CallGraphRule {
  Itemset antecedent;
  Itemset consequent;
  double support = 0.0;
  double confidence = 0.0;
};

/// Every rule X -> Z\X over frequent itemsets Z (|Z| >= 2) whose confidence
/// count(Z)/count(X) reaches min_confidence. Sorted by (antecedent, consequent).
inline std::vector<CallGraphRule> generate_rules(const FrequentItemsets& frequent, double min_confidence) {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "minConf must be in [0, 1]");
  std::vector<CallGraphRule> rules;
  if (frequent.transaction_count == 0) return rules;
  const double total = static_cast<double>(frequent.transaction_count);

  for (const auto& [itemset, count] : frequent.counts) {
    const std::size_t n = itemset.size();
    if (n < 2) continue;
    if (n > 30) throw Error(ErrorCode::MalformedInput, "itemset too large for rule generation");
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      Itemset lhs, rhs;
      for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? lhs : rhs).push_back(itemset[i]);
      auto it = frequent.counts.find(lhs);
      if (it == frequent.counts.end() || it->second == 0)
        throw Error(ErrorCode::MalformedInput, "support of a subset of a frequent itemset is missing");
      double confidence = static_cast<double>(count) / static_cast<double>(it->second);
      if (!meets_threshold(confidence, min_confidence)) continue;
      rules.push_back({std::move(lhs), std::move(rhs), static_cast<double>(count) / total, confidence});
    }
  }
  std::sort(rules.begin(), rules.end(), [](const CallGraphRule& a, const CallGraphRule& b) {
    return std::tie(a.antecedent, a.consequent) < std::tie(b.antecedent, b.consequent);
  });
  return rules;
}

struct RuleMiningParams {
  double min_support = 0.4;
  double min_confidence = 0.8;
  std::size_t max_itemset = 4;
  TransactionScheme scheme = TransactionScheme::CallerNeighborhood;
};

struct VersionRules {
  std::string version_label;
  std::size_t transaction_count = 0;
  bool empty_database = false;
  std::vector<CallGraphRule> rules;
};

/// Transaction database, frequent itemsets and rules for one version.
inline VersionRules mine_version_rules(const CallGraph& cg, const RuleMiningParams& params) {
  auto db = build_transactions(cg, params.scheme);
  auto frequent = mine_frequent_itemsets(db, params.min_support, params.max_itemset);
  return {cg.version_label(), frequent.transaction_count, frequent.empty_database,
          generate_rules(frequent, params.min_confidence)};
}

}  // namespace cge
