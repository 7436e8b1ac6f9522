#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cge/core_model.hpp"
#include "cge/parallel.hpp"

namespace cge {

struct RewireResult {
  Digraph graph;
  std::size_t attempted = 0;
  std::size_t accepted = 0;
};

/// Degree-preserving randomization: repeatedly picks arcs a->b, c->d and
/// rewires them to a->d, c->b when that creates neither a self-loop nor a
/// parallel arc. Every node keeps its in- and out-degree.
inline RewireResult degree_preserving_rewire(const Digraph& g, double swaps_per_edge, std::uint64_t seed) {
  auto arcs = g.arcs();
  RewireResult res;
  const std::size_t m = arcs.size();
  if (m < 2) {
    res.graph = g;
    return res;
  }
  auto key = [](NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; };
  std::unordered_set<std::uint64_t> present;
  present.reserve(m * 2);
  for (auto [u, v] : arcs) present.insert(key(u, v));

  std::mt19937_64 rng(seed);
  res.attempted = static_cast<std::size_t>(std::llround(swaps_per_edge * static_cast<double>(m)));
  for (std::size_t t = 0; t < res.attempted; ++t) {
    auto i = uniform_below(rng, m);
    auto j = uniform_below(rng, m);
    if (i == j) continue;
    auto [a, b] = arcs[i];
    auto [c, d] = arcs[j];
    if (a == c || b == d || a == d || c == b) continue;
    if (present.count(key(a, d)) || present.count(key(c, b))) continue;
    present.erase(key(a, b));
    present.erase(key(c, d));
    present.insert(key(a, d));
    present.insert(key(c, b));
    arcs[i] = {a, d};
    arcs[j] = {c, b};
    ++res.accepted;
  }
  res.graph = Digraph(g.node_count(), arcs);
  return res;
}

}  // namespace cge
