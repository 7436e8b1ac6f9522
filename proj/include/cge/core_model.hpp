#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cge/error.hpp"

namespace cge {

struct Procedure {
  std::string name;
  std::string module;

  friend auto operator<=>(const Procedure&, const Procedure&) = default;
};

struct CallPair {
  std::string caller;
  std::string callee;

  friend auto operator<=>(const CallPair&, const CallPair&) = default;
};

/// True when `name` can be used as a procedure or module symbol: non-empty,
/// no whitespace, none of `#` (comment marker) or `;` (report delimiter).
inline bool is_valid_symbol(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == '#' ||
           c == ';';
  });
}

using NodeId = std::uint32_t;

/// Compact simple digraph over dense node ids. Self-loops and parallel arcs
/// are dropped on construction. Adjacency lists are sorted.
class Digraph {
 public:
  Digraph() = default;

  Digraph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> arcs)
      : out_(node_count), in_(node_count), und_(node_count) {
    for (auto [u, v] : arcs) {
      if (u >= node_count || v >= node_count)
        throw Error(ErrorCode::InvalidGraph, "arc endpoint out of range");
      if (u == v) continue;
      out_[u].push_back(v);
      in_[v].push_back(u);
    }
    for (std::size_t i = 0; i < node_count; ++i) {
      sort_unique(out_[i]);
      sort_unique(in_[i]);
      arc_count_ += out_[i].size();
      und_[i].reserve(out_[i].size() + in_[i].size());
      std::set_union(out_[i].begin(), out_[i].end(), in_[i].begin(), in_[i].end(),
                     std::back_inserter(und_[i]));
    }
  }

  std::size_t node_count() const noexcept { return out_.size(); }
  std::size_t arc_count() const noexcept { return arc_count_; }

  std::span<const NodeId> out(NodeId u) const { return out_[u]; }
  std::span<const NodeId> in(NodeId u) const { return in_[u]; }
  /// Distinct neighbours ignoring direction.
  std::span<const NodeId> neighbours(NodeId u) const { return und_[u]; }

  bool has_arc(NodeId u, NodeId v) const {
    const auto& o = out_[u];
    return std::binary_search(o.begin(), o.end(), v);
  }

  bool adjacent(NodeId u, NodeId v) const {
    const auto& n = und_[u];
    return std::binary_search(n.begin(), n.end(), v);
  }

  std::vector<std::pair<NodeId, NodeId>> arcs() const {
    std::vector<std::pair<NodeId, NodeId>> result;
    result.reserve(arc_count_);
    for (NodeId u = 0; u < out_.size(); ++u)
      for (NodeId v : out_[u]) result.emplace_back(u, v);
    return result;
  }

  std::vector<std::size_t> out_degrees() const {
    std::vector<std::size_t> d(out_.size());
    for (std::size_t i = 0; i < out_.size(); ++i) d[i] = out_[i].size();
    return d;
  }

  std::vector<std::size_t> in_degrees() const {
    std::vector<std::size_t> d(in_.size());
    for (std::size_t i = 0; i < in_.size(); ++i) d[i] = in_[i].size();
    return d;
  }

 private:
  static void sort_unique(std::vector<NodeId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> und_;
  std::size_t arc_count_ = 0;
};

/// One version's call graph. Immutable once built; procedures are kept sorted
/// by name and node ids follow that order.
class CallGraph {
 public:
  /// Validates and normalizes: duplicate call pairs collapse, caller == callee
  /// pairs are moved into the self-loop counter.
  static CallGraph make(std::string version_label, std::vector<Procedure> procedures,
                        std::vector<CallPair> call_pairs, std::size_t extra_self_loops = 0) {
    if (procedures.empty())
      throw Error(ErrorCode::EmptyGraph, "version '" + version_label + "' declares no procedures");

    std::sort(procedures.begin(), procedures.end());
    procedures.erase(std::unique(procedures.begin(), procedures.end()), procedures.end());
    for (std::size_t i = 0; i < procedures.size(); ++i) {
      const auto& p = procedures[i];
      if (!is_valid_symbol(p.name) || !is_valid_symbol(p.module))
        throw Error(ErrorCode::InvalidGraph, "invalid procedure or module symbol '" + p.name + "'");
      if (i > 0 && procedures[i - 1].name == p.name)
        throw Error(ErrorCode::ConflictingModule,
                    "procedure '" + p.name + "' declared in modules '" + procedures[i - 1].module +
                        "' and '" + p.module + "'");
    }

    CallGraph g;
    g.version_label_ = std::move(version_label);
    g.procedures_ = std::move(procedures);
    g.self_loop_count_ = extra_self_loops;
    g.index_.reserve(g.procedures_.size());
    for (NodeId i = 0; i < g.procedures_.size(); ++i) g.index_.emplace(g.procedures_[i].name, i);

    std::vector<std::pair<NodeId, NodeId>> arcs;
    arcs.reserve(call_pairs.size());
    for (auto& cp : call_pairs) {
      auto a = g.find(cp.caller);
      auto b = g.find(cp.callee);
      if (!a || !b)
        throw Error(ErrorCode::UnknownProcedure,
                    "call pair " + cp.caller + " -> " + cp.callee + " references an undeclared procedure");
      if (*a == *b) {
        ++g.self_loop_count_;
        continue;
      }
      arcs.emplace_back(*a, *b);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    g.call_pairs_.reserve(arcs.size());
    for (auto [a, b] : arcs) g.call_pairs_.push_back({g.procedures_[a].name, g.procedures_[b].name});
    g.digraph_ = Digraph(g.procedures_.size(), arcs);
    return g;
  }

  const std::string& version_label() const noexcept { return version_label_; }
  const std::vector<Procedure>& procedures() const noexcept { return procedures_; }
  /// Sorted by (caller, callee); never contains caller == callee.
  const std::vector<CallPair>& call_pairs() const noexcept { return call_pairs_; }
  std::size_t self_loop_count() const noexcept { return self_loop_count_; }
  const Digraph& digraph() const noexcept { return digraph_; }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name_of(NodeId id) const { return procedures_[id].name; }
  const std::string& module_of(NodeId id) const { return procedures_[id].module; }

  /// Same label, procedures and call pairs.
  friend bool operator==(const CallGraph& a, const CallGraph& b) {
    return a.version_label_ == b.version_label_ && a.procedures_ == b.procedures_ &&
           a.call_pairs_ == b.call_pairs_ && a.self_loop_count_ == b.self_loop_count_;
  }

 private:
  CallGraph() = default;

  std::string version_label_;
  std::vector<Procedure> procedures_;
  std::vector<CallPair> call_pairs_;
  std::size_t self_loop_count_ = 0;
  std::unordered_map<std::string, NodeId> index_;
  Digraph digraph_;
};

/// Chronologically ordered call graphs of one system.
class VersionSeries {
 public:
  VersionSeries(std::string label, std::vector<CallGraph> graphs)
      : label_(std::move(label)), graphs_(std::move(graphs)) {
    if (graphs_.empty()) throw Error(ErrorCode::InvalidManifest, "version series is empty");
    std::set<std::string_view> seen;
    for (const auto& g : graphs_)
      if (!seen.insert(g.version_label()).second)
        throw Error(ErrorCode::DuplicateVersion, "duplicate version label '" + g.version_label() + "'");
  }

  const std::string& label() const noexcept { return label_; }
  const std::vector<CallGraph>& graphs() const noexcept { return graphs_; }
  std::size_t size() const noexcept { return graphs_.size(); }

  std::vector<std::string> version_labels() const {
    std::vector<std::string> out;
    out.reserve(graphs_.size());
    for (const auto& g : graphs_) out.push_back(g.version_label());
    return out;
  }

 private:
  std::string label_;
  std::vector<CallGraph> graphs_;
};

struct GraphStats {
  std::size_t procedure_count = 0;
  std::size_t edge_count = 0;
  double avg_neighbours = 0.0;
};

/// Size figures for one version. avg_neighbours is the mean number of distinct
/// adjacent procedures ignoring call direction.
inline GraphStats graph_stats(const CallGraph& cg) {
  const auto& g = cg.digraph();
  GraphStats s;
  s.procedure_count = g.node_count();
  s.edge_count = g.arc_count();
  std::size_t total = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) total += g.neighbours(u).size();
  s.avg_neighbours = s.procedure_count ? static_cast<double>(total) / static_cast<double>(s.procedure_count) : 0.0;
  return s;
}

}  // namespace cge
