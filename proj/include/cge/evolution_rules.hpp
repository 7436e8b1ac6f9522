#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cge/csv.hpp"
#include "cge/error.hpp"
#include "cge/rule_mining.hpp"

namespace cge {

/// Canonical identity of a rule across versions: both sides sorted.
struct RuleKey {
  Itemset antecedent;
  Itemset consequent;

  static RuleKey canonical(Itemset lhs, Itemset rhs) {
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    return {std::move(lhs), std::move(rhs)};
  }

  friend auto operator<=>(const RuleKey&, const RuleKey&) = default;
};

struct RuleMetrics {
  double support = 0.0;
  double confidence = 0.0;
};

struct EvolutionRule {
  RuleKey key;
  /// Versions where the rule is interesting, in series order.
  std::vector<std::pair<std::string, RuleMetrics>> per_version;

  std::size_t stability() const noexcept { return per_version.size(); }

  double mean_support() const {
    if (per_version.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [label, m] : per_version) s += m.support;
    return s / static_cast<double>(per_version.size());
  }

  double mean_confidence() const {
    if (per_version.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [label, m] : per_version) s += m.confidence;
    return s / static_cast<double>(per_version.size());
  }
};

/// Merges per-version rules (given in series order) into distinct evolution
/// rules keyed canonically. Output sorted by key.
inline std::vector<EvolutionRule> aggregate_cgers(std::span<const VersionRules> per_version_rules) {
  std::map<RuleKey, EvolutionRule> merged;
  for (const auto& version : per_version_rules) {
    for (const auto& r : version.rules) {
      auto key = RuleKey::canonical(r.antecedent, r.consequent);
      auto& er = merged[key];
      if (er.per_version.empty()) er.key = key;
      // A version reporting the same rule twice still counts once.
      if (!er.per_version.empty() && er.per_version.back().first == version.version_label) continue;
      er.per_version.emplace_back(version.version_label, RuleMetrics{r.support, r.confidence});
    }
  }
  std::vector<EvolutionRule> out;
  out.reserve(merged.size());
  for (auto& [key, er] : merged) out.push_back(std::move(er));
  return out;
}

/// minStab as an absolute version count or as a fraction of the series.
class MinStability {
 public:
  static MinStability count(double n) { return MinStability(Kind::Count, n); }
  static MinStability fraction(double f) { return MinStability(Kind::Fraction, f); }

  bool is_fraction() const noexcept { return kind_ == Kind::Fraction; }
  double value() const noexcept { return value_; }

  /// Required number of versions for a series of the given length.
  std::size_t resolve(std::size_t series_length) const {
    if (kind_ == Kind::Count) {
      if (!(value_ >= 1.0) || value_ != std::floor(value_))
        throw Error(ErrorCode::InvalidThreshold, "minStab count must be a positive integer");
      if (value_ > static_cast<double>(series_length))
        throw Error(ErrorCode::InvalidThreshold, "minStab count " + csv::format_number(value_) +
                                                     " exceeds series length " + std::to_string(series_length));
      return static_cast<std::size_t>(value_);
    }
    if (!(value_ > 0.0 && value_ <= 1.0)) throw Error(ErrorCode::InvalidThreshold, "minStab fraction must be in (0, 1]");
    auto n = static_cast<std::size_t>(std::ceil(value_ * static_cast<double>(series_length) - 1e-9));
    return std::max<std::size_t>(n, 1);
  }

  std::string describe() const {
    return (kind_ == Kind::Count ? "count:" : "fraction:") + csv::format_number(value_);
  }

 private:
  enum class Kind { Count, Fraction };
  MinStability(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct StableRuleSet {
  std::vector<EvolutionRule> rules;
  double min_support = 0.0;
  double min_confidence = 0.0;
  MinStability min_stability = MinStability::count(1);
  std::size_t resolved_min_stability = 1;
};

/// Report order: stability desc, mean support desc, key ascending.
inline void sort_for_report(std::vector<EvolutionRule>& rules) {
  std::stable_sort(rules.begin(), rules.end(), [](const EvolutionRule& a, const EvolutionRule& b) {
    if (a.stability() != b.stability()) return a.stability() > b.stability();
    double sa = a.mean_support(), sb = b.mean_support();
    if (sa != sb) return sa > sb;
    return a.key < b.key;
  });
}

inline StableRuleSet filter_stable(std::span<const EvolutionRule> rules, MinStability min_stab, std::size_t series_length,
                                   double min_support = 0.0, double min_confidence = 0.0) {
  StableRuleSet out;
  out.min_support = min_support;
  out.min_confidence = min_confidence;
  out.min_stability = min_stab;
  out.resolved_min_stability = min_stab.resolve(series_length);
  for (const auto& r : rules)
    if (r.stability() >= out.resolved_min_stability) out.rules.push_back(r);
  sort_for_report(out.rules);
  return out;
}

struct RuleCounts {
  std::string label;
  std::size_t cgrs = 0;
  std::size_t distinct = 0;
  std::size_t stable = 0;
};

struct RuleCountSummary {
  std::vector<RuleCounts> per_version;
  RuleCounts overall{"ALL"};
};

/// Counts of rules, distinct rules and stable rules. Within a version every
/// rule is distinct; overall, `cgrs` counts occurrences across versions.
inline RuleCountSummary count_summary(std::span<const VersionRules> per_version_rules,
                                      std::span<const EvolutionRule> cgers, const StableRuleSet& stable) {
  std::set<RuleKey> stable_keys;
  for (const auto& r : stable.rules) stable_keys.insert(r.key);

  RuleCountSummary s;
  for (const auto& v : per_version_rules) {
    RuleCounts c{v.version_label};
    std::set<RuleKey> keys;
    for (const auto& r : v.rules) keys.insert(RuleKey::canonical(r.antecedent, r.consequent));
    c.cgrs = v.rules.size();
    c.distinct = keys.size();
    c.stable = static_cast<std::size_t>(
        std::count_if(keys.begin(), keys.end(), [&](const RuleKey& k) { return stable_keys.count(k) > 0; }));
    s.overall.cgrs += c.cgrs;
    s.per_version.push_back(std::move(c));
  }
  s.overall.distinct = cgers.size();
  s.overall.stable = stable.rules.size();
  return s;
}

/// Directed graph implied by singleton-antecedent stable rules.
struct TransitivityGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  /// Strongly connected components, each sorted; ordered by first member.
  std::vector<std::vector<std::string>> components;
  /// Maximal source-to-sink paths through the component DAG.
  std::vector<std::vector<std::vector<std::string>>> chains;
  bool chains_truncated = false;
};

inline constexpr std::size_t kMaxChains = 10000;

inline TransitivityGraph build_transitivity_graph(const StableRuleSet& stable) {
  TransitivityGraph tg;
  std::set<std::pair<std::string, std::string>> edge_set;
  for (const auto& r : stable.rules) {
    if (r.key.antecedent.size() != 1) continue;
    for (const auto& y : r.key.consequent) edge_set.emplace(r.key.antecedent.front(), y);
  }
  std::set<std::string> node_set;
  for (const auto& [a, b] : edge_set) {
    node_set.insert(a);
    node_set.insert(b);
  }
  tg.nodes.assign(node_set.begin(), node_set.end());
  tg.edges.assign(edge_set.begin(), edge_set.end());
  const std::size_t n = tg.nodes.size();
  if (n == 0) return tg;

  auto id = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(tg.nodes.begin(), tg.nodes.end(), s) - tg.nodes.begin());
  };
  std::vector<std::vector<std::size_t>> adj(n), radj(n);
  for (const auto& [a, b] : tg.edges) {
    adj[id(a)].push_back(id(b));
    radj[id(b)].push_back(id(a));
  }

  // Kosaraju, iterative.
  std::vector<std::size_t> order;
  std::vector<char> seen(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj[v].size()) {
        auto w = adj[v][i++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> comp(n, n);
  std::size_t comp_count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != n) continue;
    std::vector<std::size_t> stack{*it};
    comp[*it] = comp_count;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : radj[v])
        if (comp[w] == n) {
          comp[w] = comp_count;
          stack.push_back(w);
        }
    }
    ++comp_count;
  }

  // Renumber components by smallest member so output order is canonical.
  std::vector<std::size_t> first_member(comp_count, n);
  for (std::size_t v = 0; v < n; ++v) first_member[comp[v]] = std::min(first_member[comp[v]], v);
  std::vector<std::size_t> perm(comp_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return first_member[a] < first_member[b]; });
  std::vector<std::size_t> rank(comp_count);
  for (std::size_t i = 0; i < comp_count; ++i) rank[perm[i]] = i;
  tg.components.assign(comp_count, {});
  for (std::size_t v = 0; v < n; ++v) {
    comp[v] = rank[comp[v]];
    tg.components[comp[v]].push_back(tg.nodes[v]);
  }

  std::vector<std::set<std::size_t>> dag(comp_count);
  std::vector<std::size_t> indeg(comp_count, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : adj[v])
      if (comp[v] != comp[w] && dag[comp[v]].insert(comp[w]).second) ++indeg[comp[w]];

  std::vector<std::size_t> path;
  auto walk = [&](auto&& self, std::size_t c) -> void {
    if (tg.chains.size() >= kMaxChains) {
      tg.chains_truncated = true;
      return;
    }
    path.push_back(c);
    if (dag[c].empty()) {
      std::vector<std::vector<std::string>> chain;
      for (auto p : path) chain.push_back(tg.components[p]);
      tg.chains.push_back(std::move(chain));
    } else {
      for (auto next : dag[c]) self(self, next);
    }
    path.pop_back();
  };
  for (std::size_t c = 0; c < comp_count; ++c)
    if (indeg[c] == 0) walk(walk, c);
  return tg;
}

/// Hasse diagram over the itemsets of stable rules (X and X u Y).
struct RuleLattice {
  /// Ordered by (size, lexicographic).
  std::vector<Itemset> nodes;
  /// Covering pairs (subset index, superset index).
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline RuleLattice build_lattice(const StableRuleSet& stable) {
  std::set<Itemset> sets;
  for (const auto& r : stable.rules) {
    sets.insert(r.key.antecedent);
    Itemset all = r.key.antecedent;
    all.insert(all.end(), r.key.consequent.begin(), r.key.consequent.end());
    std::sort(all.begin(), all.end());
    sets.insert(std::move(all));
  }
  RuleLattice lat;
  lat.nodes.assign(sets.begin(), sets.end());
  std::stable_sort(lat.nodes.begin(), lat.nodes.end(),
                   [](const Itemset& a, const Itemset& b) { return a.size() < b.size(); });

  const std::size_t n = lat.nodes.size();
  auto proper_subset = [&](std::size_t a, std::size_t b) {
    const auto& A = lat.nodes[a];
    const auto& B = lat.nodes[b];
    return A.size() < B.size() && std::includes(B.begin(), B.end(), A.begin(), A.end());
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!proper_subset(a, b)) continue;
      bool covered = true;
      for (std::size_t c = a + 1; c < b && covered; ++c)
        if (proper_subset(a, c) && proper_subset(c, b)) covered = false;
      if (covered) lat.edges.emplace_back(a, b);
    }
  }
  return lat;
}

inline constexpr const char* kRulesCsvHeader = "antecedent;consequent;stability;versions;mean_support;mean_confidence";

inline std::string rules_to_csv(std::span<const EvolutionRule> rules) {
  std::string out = kRulesCsvHeader;
  out += '\n';
  for (const auto& r : rules) {
    std::vector<std::string> labels;
    for (const auto& [label, m] : r.per_version) labels.push_back(label);
    out += csv::join(r.key.antecedent) + ';' + csv::join(r.key.consequent) + ';' + std::to_string(r.stability()) + ';' +
           csv::join(labels) + ';' + csv::format_number(r.mean_support()) + ';' +
           csv::format_number(r.mean_confidence()) + '\n';
  }
  return out;
}

inline constexpr const char* kRuleCountsCsvHeader = "version;cgrs;distinct_cgers;stable_cgers";

inline std::string counts_to_csv(const RuleCountSummary& s) {
  std::string out = kRuleCountsCsvHeader;
  out += '\n';
  auto row = [&](const RuleCounts& c) {
    out += c.label + ';' + std::to_string(c.cgrs) + ';' + std::to_string(c.distinct) + ';' + std::to_string(c.stable) +
           '\n';
  };
  for (const auto& c : s.per_version) row(c);
  row(s.overall);
  return out;
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}
}  // namespace detail

inline std::string transitivity_to_dot(const TransitivityGraph& tg) {
  std::ostringstream os;
  os << "digraph transitivity {\n";
  for (std::size_t c = 0; c < tg.components.size(); ++c) {
    const auto& members = tg.components[c];
    if (members.size() > 1) {
      os << "  subgraph cluster_scc" << c << " {\n    label=\"SCC " << c << "\";\n";
      for (const auto& m : members) os << "    " << detail::dot_quote(m) << ";\n";
      os << "  }\n";
    } else {
      os << "  " << detail::dot_quote(members.front()) << ";\n";
    }
  }
  for (const auto& [a, b] : tg.edges) os << "  " << detail::dot_quote(a) << " -> " << detail::dot_quote(b) << ";\n";
  for (std::size_t i = 0; i < tg.chains.size(); ++i) {
    os << "  // chain " << i << ":";
    for (std::size_t j = 0; j < tg.chains[i].size(); ++j)
      os << (j ? " -> " : " ") << '{' << csv::join(tg.chains[i][j]) << '}';
    os << '\n';
  }
  if (tg.chains_truncated) os << "  // chains truncated at " << kMaxChains << '\n';
  os << "}\n";
  return os.str();
}

inline std::string lattice_to_dot(const RuleLattice& lat) {
  std::ostringstream os;
  os << "digraph lattice {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < lat.nodes.size(); ++i)
    os << "  n" << i << " [label=" << detail::dot_quote('{' + csv::join(lat.nodes[i]) + '}') << "];\n";
  for (const auto& [a, b] : lat.edges) os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace cge
