#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cge/core_model.hpp"
#include "cge/error.hpp"
#include "cge/ingestion.hpp"
#include "cge/parallel.hpp"

namespace cge {

struct SynthParams {
  std::size_t nodes = 600;
  std::size_t versions = 9;
  double churn = 0.05;
  std::uint64_t seed = 20220801;
  std::string system = "synthetic";
};

namespace detail {

/// Mutable working state of the generator; converted to a CallGraph per version.
class SynthGraph {
 public:
  SynthGraph(std::size_t hubs, std::uint64_t seed) : hubs_(hubs), rng_(seed) {
    for (std::size_t h = 0; h < hubs; ++h) names_.push_back("hub" + std::to_string(h));
  }

  std::size_t node_count() const { return names_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  // With these shares about a fifth of all procedures call a hub bundle, so in
  // caller-neighbourhood transactions the core hubs reach support near 0.5.
  static constexpr double kCallerShare = 0.4;
  static constexpr double kBundleShare = 0.55;
  static constexpr double kArcsPerNode = 1.2;

  NodeId add_procedure() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%06zu", names_.size() - hubs_);
    names_.emplace_back(buf);
    return static_cast<NodeId>(names_.size() - 1);
  }

  /// A fresh procedure becomes a bundle caller, a plain caller with one random
  /// callee, or stays a pure callee.
  void wire_new(NodeId v) {
    if (!chance(kCallerShare)) return;
    callers_.push_back(v);
    if (chance(kBundleShare)) {
      bundle_callers_.push_back(v);
      for (auto h : pick_bundle()) arcs_.emplace(v, h);
    } else {
      add_random_arc_from(v);
    }
  }

  /// Adds random caller -> non-hub arcs until the arc target is met.
  void top_up(std::size_t target) {
    for (std::size_t guard = 0; arcs_.size() < target && guard < target * 20; ++guard) {
      if (callers_.empty()) return;
      add_random_arc_from(callers_[uniform_below(rng_, callers_.size())]);
    }
  }

  /// Deletes a churn fraction of arcs, replacing each with an arc of the same
  /// kind (hub arcs stay hub arcs), then adds `new_nodes` procedures.
  void churn(double fraction, std::size_t new_nodes) {
    auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(arcs_.size())));
    for (std::size_t i = 0; i < k && !arcs_.empty(); ++i) {
      auto it = arcs_.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(uniform_below(rng_, arcs_.size())));
      auto [a, b] = *it;
      arcs_.erase(it);
      if (b < hubs_ && !bundle_callers_.empty()) {
        for (int attempt = 0; attempt < 8; ++attempt)
          if (arcs_.emplace(bundle_callers_[uniform_below(rng_, bundle_callers_.size())], b).second) break;
      } else if (!callers_.empty()) {
        add_random_arc_from(callers_[uniform_below(rng_, callers_.size())]);
      }
    }
    for (std::size_t i = 0; i < new_nodes; ++i) wire_new(add_procedure());
  }

  CallGraph snapshot(const std::string& label) const {
    std::vector<Procedure> procs;
    procs.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) procs.push_back({names_[i], module_of(i)});
    std::vector<CallPair> pairs;
    pairs.reserve(arcs_.size());
    for (auto [a, b] : arcs_) pairs.push_back({names_[a], names_[b]});
    return CallGraph::make(label, std::move(procs), std::move(pairs));
  }

 private:
  bool chance(double p) { return uniform_unit(rng_) < p; }

  std::string module_of(std::size_t i) const {
    if (i < hubs_) return "core";
    return "m" + std::to_string((i - hubs_) / 16);
  }

  std::vector<NodeId> pick_bundle() {
    std::vector<NodeId> all(hubs_);
    for (std::size_t h = 0; h < hubs_; ++h) all[h] = static_cast<NodeId>(h);
    if (hubs_ < 4) return all;
    double r = uniform_unit(rng_);
    if (r < 0.50) return {0, 1, 2};
    if (r < 0.75) return {0, 1, 2, 3};
    if (r < 0.90) return {0, 1};
    return {1, 2};
  }

  void add_random_arc_from(NodeId v) {
    if (names_.size() <= hubs_ + 1) return;
    for (int attempt = 0; attempt < 8; ++attempt) {
      auto w = static_cast<NodeId>(hubs_ + uniform_below(rng_, names_.size() - hubs_));
      if (w == v) continue;
      if (arcs_.emplace(v, w).second) return;
    }
  }

  std::size_t hubs_;
  std::mt19937_64 rng_;
  std::vector<std::string> names_;
  std::vector<NodeId> callers_;
  std::vector<NodeId> bundle_callers_;
  std::set<std::pair<NodeId, NodeId>> arcs_;
};

}  // namespace detail

inline void validate_synth(const SynthParams& p) {
  if (p.nodes < 4) throw Error(ErrorCode::InvalidParams, "synthetic series needs at least 4 nodes");
  if (p.versions < 1) throw Error(ErrorCode::InvalidParams, "synthetic series needs at least 1 version");
  if (!(p.churn >= 0.0 && p.churn < 1.0)) throw Error(ErrorCode::InvalidParams, "churn must be in [0, 1)");
}

/// Random evolving call graphs. Version 1 has `nodes` procedures, a few hub
/// procedures called in correlated bundles, and about 1.2 arcs per node
/// (mean undirected neighbourhood near 2.4). Each later version deletes and
/// re-adds a churn fraction of arcs and adds ceil(churn * nodes) procedures.
inline std::vector<CallGraph> synthesize_series(const SynthParams& p) {
  validate_synth(p);
  const std::size_t hubs = std::clamp<std::size_t>(p.nodes / 8, 2, 4);
  detail::SynthGraph g(hubs, p.seed);
  for (std::size_t i = hubs; i < p.nodes; ++i) g.add_procedure();
  for (std::size_t i = hubs; i < p.nodes; ++i) g.wire_new(static_cast<NodeId>(i));
  g.top_up(static_cast<std::size_t>(std::llround(detail::SynthGraph::kArcsPerNode * static_cast<double>(p.nodes))));

  const auto new_nodes = static_cast<std::size_t>(std::ceil(p.churn * static_cast<double>(p.nodes) - 1e-9));
  std::vector<CallGraph> out;
  out.reserve(p.versions);
  for (std::size_t v = 0; v < p.versions; ++v) {
    if (v > 0 && p.churn > 0.0) g.churn(p.churn, new_nodes);
    out.push_back(g.snapshot("v" + std::to_string(v + 1)));
  }
  return out;
}

/// Writes `manifest.json` plus one native graph file per version into `dir`.
inline Manifest write_synthetic_series(const SynthParams& p, const std::filesystem::path& dir) {
  auto graphs = synthesize_series(p);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());

  Manifest m{p.system, {}};
  Manifest relative{p.system, {}};
  for (const auto& g : graphs) {
    auto file = g.version_label() + ".cg";
    std::ofstream os(dir / file, std::ios::binary);
    os << serialize_graph(g);
    if (!os) throw Error(ErrorCode::IoError, "cannot write '" + (dir / file).string() + "'");
    m.entries.push_back({g.version_label(), dir / file});
    relative.entries.push_back({g.version_label(), file});
  }
  std::ofstream ms(dir / "manifest.json", std::ios::binary);
  ms << manifest_to_json(relative);
  if (!ms) throw Error(ErrorCode::IoError, "cannot write manifest");
  return m;
}

}  // namespace cge
