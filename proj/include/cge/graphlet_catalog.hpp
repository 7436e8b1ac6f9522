#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cge/error.hpp"

namespace cge {

inline constexpr int kMinGraphletSize = 2;
inline constexpr int kMaxGraphletSize = 4;

inline void check_graphlet_size(int size) {
  if (size < kMinGraphletSize || size > kMaxGraphletSize)
    throw Error(ErrorCode::UnsupportedSize,
                "graphlet size " + std::to_string(size) + " not supported (expected 2, 3 or 4)");
}

/// Adjacency matrix of a k-node digraph packed row-major into k*k bits, entry
/// (0,0) in the most significant position. Numeric order of codes therefore
/// equals lexicographic order of the matrix written as a 0/1 string.
using AdjacencyCode = std::uint32_t;

inline constexpr int adjacency_bit(int k, int i, int j) { return k * k - 1 - (i * k + j); }

inline bool code_has_arc(AdjacencyCode code, int k, int i, int j) { return (code >> adjacency_bit(k, i, j)) & 1u; }

inline AdjacencyCode permute_code(AdjacencyCode code, int k, const std::array<int, kMaxGraphletSize>& perm) {
  AdjacencyCode out = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && code_has_arc(code, k, i, j)) out |= AdjacencyCode{1} << adjacency_bit(k, perm[i], perm[j]);
  return out;
}

/// Minimum code over all relabelings of the k nodes.
inline AdjacencyCode canonical_code(AdjacencyCode code, int k) {
  std::array<int, kMaxGraphletSize> perm{};
  std::iota(perm.begin(), perm.begin() + k, 0);
  AdjacencyCode best = code;
  do {
    best = std::min(best, permute_code(code, k, perm));
  } while (std::next_permutation(perm.begin(), perm.begin() + k));
  return best;
}

inline bool weakly_connected(AdjacencyCode code, int k) {
  unsigned reached = 1, frontier = 1;
  while (frontier) {
    unsigned next = 0;
    for (int i = 0; i < k; ++i) {
      if (!((frontier >> i) & 1u)) continue;
      for (int j = 0; j < k; ++j)
        if (i != j && (code_has_arc(code, k, i, j) || code_has_arc(code, k, j, i))) next |= 1u << j;
    }
    frontier = next & ~reached;
    reached |= next;
  }
  return reached == (1u << k) - 1;
}

inline std::string code_to_string(AdjacencyCode code, int k) {
  std::string s(static_cast<std::size_t>(k * k), '0');
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (code_has_arc(code, k, i, j)) s[static_cast<std::size_t>(i * k + j)] = '1';
  return s;
}

struct GraphletClass {
  int size = 0;
  AdjacencyCode code = 0;
  std::size_t class_id = 0;

  std::string canonical_code() const { return code_to_string(code, size); }

  std::vector<std::pair<int, int>> arcs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j)
        if (i != j && code_has_arc(code, size, i, j)) out.emplace_back(i, j);
    return out;
  }

  int arc_count() const { return static_cast<int>(arcs().size()); }

  /// `0->1,1->2` style listing of the canonical representative.
  std::string edge_list() const {
    std::string out;
    for (auto [i, j] : arcs()) {
      if (!out.empty()) out += ',';
      out += std::to_string(i) + "->" + std::to_string(j);
    }
    return out;
  }
};

/// All weakly connected isomorphism classes of simple digraphs on `size`
/// nodes, ordered by canonical code; class_id is the position. A dense
/// lookup maps any raw adjacency code to its class.
class GraphletCatalog {
 public:
  explicit GraphletCatalog(int size) : size_(size) {
    check_graphlet_size(size);
    const AdjacencyCode limit = AdjacencyCode{1} << (size * size);
    std::vector<AdjacencyCode> canon_of(limit, 0);
    std::vector<AdjacencyCode> reps;
    AdjacencyCode diag = 0;
    for (int i = 0; i < size; ++i) diag |= AdjacencyCode{1} << adjacency_bit(size, i, i);
    for (AdjacencyCode raw = 0; raw < limit; ++raw) {
      if (raw & diag) continue;
      canon_of[raw] = canonical_code(raw, size);
      if (canon_of[raw] == raw && weakly_connected(raw, size)) reps.push_back(raw);
    }
    // reps is ascending already because raw codes were visited in order.
    lookup_.assign(limit, -1);
    for (std::size_t id = 0; id < reps.size(); ++id) classes_.push_back({size, reps[id], id});
    for (AdjacencyCode raw = 0; raw < limit; ++raw) {
      if (raw & diag) continue;
      auto it = std::lower_bound(reps.begin(), reps.end(), canon_of[raw]);
      if (it != reps.end() && *it == canon_of[raw]) lookup_[raw] = static_cast<std::int32_t>(it - reps.begin());
    }
  }

  int size() const noexcept { return size_; }
  const std::vector<GraphletClass>& classes() const noexcept { return classes_; }

  /// Class id for a raw code, or -1 when the digraph is disconnected.
  std::int32_t classify(AdjacencyCode raw) const { return lookup_[raw]; }

 private:
  int size_;
  std::vector<GraphletClass> classes_;
  std::vector<std::int32_t> lookup_;
};

/// Shared, lazily built catalog per size.
inline const GraphletCatalog& catalog_for(int size) {
  check_graphlet_size(size);
  static const GraphletCatalog c2(2);
  static const GraphletCatalog c3(3);
  static const GraphletCatalog c4(4);
  return size == 2 ? c2 : size == 3 ? c3 : c4;
}

inline std::vector<GraphletClass> generate_catalog(int size) { return catalog_for(size).classes(); }

inline constexpr const char* kCatalogCsvHeader = "size;class_id;canonical_code;edge_list";

inline std::string catalog_to_csv(const std::vector<int>& sizes) {
  std::string out = kCatalogCsvHeader;
  out += '\n';
  for (int k : sizes)
    for (const auto& c : catalog_for(k).classes())
      out += std::to_string(k) + ';' + std::to_string(c.class_id) + ';' + c.canonical_code() + ';' + c.edge_list() + '\n';
  return out;
}

}  // namespace cge
