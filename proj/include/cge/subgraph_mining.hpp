#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cge/core_model.hpp"
#include "cge/csv.hpp"
#include "cge/error.hpp"
#include "cge/graphlet_catalog.hpp"
#include "cge/null_model.hpp"
#include "cge/parallel.hpp"

namespace cge {

inline constexpr std::uint64_t kDefaultSeed = 20220801;

struct EnumerationOptions {
  /// Graphs with more arcs than this are censused by root sampling. 0 = always exact.
  std::size_t sample_above_arcs = 0;
  /// Probability that a root node is expanded in sampling mode.
  double sample_root_probability = 0.1;
  std::uint64_t seed = kDefaultSeed;
};

/// Occurrences per class id of one size in one graph.
struct GraphletCounts {
  int size = 0;
  std::vector<std::uint64_t> by_class;
  /// True when the counts are estimates from root sampling.
  bool sampled = false;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : by_class) t += c;
    return t;
  }
};

namespace detail {

/// ESU enumeration rooted at one node: every connected node set of size k
/// whose smallest member is `root` is visited exactly once.
class EsuWalker {
 public:
  EsuWalker(const Digraph& g, const GraphletCatalog& cat, std::vector<std::uint64_t>& counts)
      : g_(g), cat_(cat), k_(cat.size()), counts_(counts) {}

  void run(NodeId root) {
    root_ = root;
    sub_[0] = root;
    std::vector<NodeId> ext;
    for (NodeId u : g_.neighbours(root))
      if (u > root) ext.push_back(u);
    extend(1, std::move(ext));
  }

 private:
  void extend(int depth, std::vector<NodeId> ext) {
    while (!ext.empty()) {
      NodeId w = ext.back();
      ext.pop_back();
      sub_[static_cast<std::size_t>(depth)] = w;
      if (depth + 1 == k_) {
        record();
        continue;
      }
      std::vector<NodeId> next = ext;
      for (NodeId u : g_.neighbours(w)) {
        if (u <= root_) continue;
        bool exclusive = true;
        for (int i = 0; i < depth && exclusive; ++i) {
          NodeId s = sub_[static_cast<std::size_t>(i)];
          if (u == s || g_.adjacent(s, u)) exclusive = false;
        }
        if (exclusive) next.push_back(u);
      }
      extend(depth + 1, std::move(next));
    }
  }

  void record() {
    AdjacencyCode code = 0;
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j)
        if (i != j && g_.has_arc(sub_[static_cast<std::size_t>(i)], sub_[static_cast<std::size_t>(j)]))
          code |= AdjacencyCode{1} << adjacency_bit(k_, i, j);
    auto id = cat_.classify(code);
    if (id >= 0) ++counts_[static_cast<std::size_t>(id)];
  }

  const Digraph& g_;
  const GraphletCatalog& cat_;
  int k_;
  std::vector<std::uint64_t>& counts_;
  NodeId root_ = 0;
  std::array<NodeId, kMaxGraphletSize> sub_{};
};

}  // namespace detail

/// Census of connected induced subgraphs on exactly `size` nodes; each node
/// set counts once. Roots are split across `jobs` workers and merged by sum.
inline GraphletCounts count_graphlets(const Digraph& g, int size, std::size_t jobs = 1,
                                      const EnumerationOptions& opts = {}) {
  const auto& cat = catalog_for(size);
  GraphletCounts result{size, std::vector<std::uint64_t>(cat.classes().size(), 0), false};
  const std::size_t n = g.node_count();
  if (n < static_cast<std::size_t>(size)) return result;

  const bool sampling = opts.sample_above_arcs > 0 && g.arc_count() > opts.sample_above_arcs;
  if (sampling && !(opts.sample_root_probability > 0.0 && opts.sample_root_probability <= 1.0))
    throw Error(ErrorCode::InvalidParams, "sampling probability must be in (0, 1]");
  auto keep_root = [&](NodeId v) {
    if (!sampling) return true;
    double u = static_cast<double>(splitmix64(derive_seed(opts.seed, v)) >> 11) * 0x1.0p-53;
    return u < opts.sample_root_probability;
  };

  // Interleaved chunks balance hubs across workers.
  const std::size_t chunks = std::min<std::size_t>(n, std::max<std::size_t>(1, resolve_jobs(jobs) * 8));
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(result.by_class.size(), 0));
  parallel_for(chunks, jobs, [&](std::size_t c) {
    detail::EsuWalker walker(g, cat, partial[c]);
    for (std::size_t v = c; v < n; v += chunks)
      if (keep_root(static_cast<NodeId>(v))) walker.run(static_cast<NodeId>(v));
  });
  for (const auto& p : partial)
    for (std::size_t i = 0; i < p.size(); ++i) result.by_class[i] += p[i];

  if (sampling) {
    result.sampled = true;
    for (auto& c : result.by_class)
      c = static_cast<std::uint64_t>(std::llround(static_cast<double>(c) / opts.sample_root_probability));
  }
  return result;
}

/// class_id -> occurrence count, only classes that occur.
inline std::map<std::size_t, std::uint64_t> enumerate_graphlets(const CallGraph& cg, int size, std::size_t jobs = 1) {
  auto counts = count_graphlets(cg.digraph(), size, jobs);
  std::map<std::size_t, std::uint64_t> out;
  for (std::size_t id = 0; id < counts.by_class.size(); ++id)
    if (counts.by_class[id]) out.emplace(id, counts.by_class[id]);
  return out;
}

inline std::vector<int> normalize_sizes(std::vector<int> sizes) {
  if (sizes.empty()) throw Error(ErrorCode::UnsupportedSize, "no graphlet sizes requested");
  for (int k : sizes) check_graphlet_size(k);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

struct VersionFrequency {
  std::uint64_t count = 0;
  double rel_freq_percent = 0.0;
};

struct GraphletFrequencySeries {
  GraphletClass cls;
  /// One entry per version, in series order.
  std::vector<VersionFrequency> per_version;
  /// Mean over all versions; versions without the class contribute 0.
  double mean_rel_freq = 0.0;
};

struct FrequencyTable {
  std::vector<std::string> version_labels;
  std::vector<int> sizes;
  /// Classes seen in at least one version, ordered by (size, class_id).
  std::vector<GraphletFrequencySeries> series;
  /// Raw census, indexed [version][position of size in `sizes`].
  std::vector<std::vector<GraphletCounts>> counts;

  std::size_t size_index(int size) const {
    auto it = std::find(sizes.begin(), sizes.end(), size);
    if (it == sizes.end()) throw Error(ErrorCode::UnsupportedSize, "size not in table");
    return static_cast<std::size_t>(it - sizes.begin());
  }

  /// No size-k occurrences in that version, so relative frequencies are undefined.
  bool degenerate(std::size_t version, int size) const { return counts[version][size_index(size)].total() == 0; }

  std::vector<std::pair<std::string, int>> degenerate_versions() const {
    std::vector<std::pair<std::string, int>> out;
    for (std::size_t v = 0; v < version_labels.size(); ++v)
      for (int k : sizes)
        if (degenerate(v, k)) out.emplace_back(version_labels[v], k);
    return out;
  }
};

/// Per-class relative frequencies (percent of all same-size occurrences in
/// the version). Versions are censused concurrently.
inline FrequencyTable frequency_series(const VersionSeries& series, std::vector<int> sizes, std::size_t jobs = 1,
                                       const EnumerationOptions& opts = {}) {
  FrequencyTable table;
  table.sizes = normalize_sizes(std::move(sizes));
  table.version_labels = series.version_labels();
  const std::size_t nv = series.size(), ns = table.sizes.size();
  table.counts.assign(nv, std::vector<GraphletCounts>(ns));

  // Outer parallelism over (version, size); the census itself stays serial so
  // worker counts never multiply.
  parallel_for(nv * ns, jobs, [&](std::size_t idx) {
    std::size_t v = idx / ns, s = idx % ns;
    EnumerationOptions o = opts;
    o.seed = derive_seed(opts.seed, v, static_cast<std::uint64_t>(table.sizes[s]));
    table.counts[v][s] = count_graphlets(series.graphs()[v].digraph(), table.sizes[s], 1, o);
  });

  for (std::size_t s = 0; s < ns; ++s) {
    const int k = table.sizes[s];
    for (const auto& cls : catalog_for(k).classes()) {
      GraphletFrequencySeries fs{cls, std::vector<VersionFrequency>(nv), 0.0};
      bool seen = false;
      for (std::size_t v = 0; v < nv; ++v) {
        const auto& c = table.counts[v][s];
        auto total = c.total();
        auto count = c.by_class[cls.class_id];
        fs.per_version[v].count = count;
        fs.per_version[v].rel_freq_percent =
            total ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
        fs.mean_rel_freq += fs.per_version[v].rel_freq_percent;
        seen = seen || count > 0;
      }
      if (!seen) continue;
      fs.mean_rel_freq /= static_cast<double>(nv);
      table.series.push_back(std::move(fs));
    }
  }
  return table;
}

inline constexpr const char* kFrequencyCsvHeader = "size;class_id;canonical_code;version;count;rel_freq_percent";

inline std::string frequencies_to_csv(const FrequencyTable& t) {
  std::string out = kFrequencyCsvHeader;
  out += '\n';
  for (const auto& fs : t.series) {
    auto prefix = std::to_string(fs.cls.size) + ';' + std::to_string(fs.cls.class_id) + ';' + fs.cls.canonical_code() + ';';
    for (std::size_t v = 0; v < fs.per_version.size(); ++v)
      out += prefix + t.version_labels[v] + ';' + std::to_string(fs.per_version[v].count) + ';' +
             csv::format_number(fs.per_version[v].rel_freq_percent) + '\n';
  }
  return out;
}

struct MotifCriterion {
  double min_mean_freq_percent = 10.0;
  /// When set, a motif must also be over-represented against the null model.
  std::optional<double> z_min;
  std::size_t null_samples = 20;
  double swaps_per_edge = 10.0;
};

struct Motif {
  GraphletClass cls;
  double mean_rel_freq = 0.0;
  /// Mean z-score over versions where it is defined.
  std::optional<double> mean_z;
  std::size_t z_pass_versions = 0;
  std::size_t z_defined_versions = 0;
  /// The null model gave no usable spread in any version; only the frequency
  /// criterion was applied.
  bool null_degenerate = false;
};

struct MotifReport {
  std::vector<Motif> motifs;
  MotifCriterion criterion;
  std::uint64_t seed = kDefaultSeed;
};

inline void validate_criterion(const MotifCriterion& c) {
  if (!(c.min_mean_freq_percent > 0.0 && c.min_mean_freq_percent <= 100.0))
    throw Error(ErrorCode::InvalidThreshold, "motif threshold must be in (0, 100]");
  if (c.z_min) {
    if (c.null_samples < 20) throw Error(ErrorCode::InvalidThreshold, "z-score filtering needs at least 20 null samples");
    if (!(c.swaps_per_edge > 0.0)) throw Error(ErrorCode::InvalidThreshold, "swaps per edge must be positive");
  }
}

/// Classes whose mean relative frequency reaches the threshold, optionally
/// also requiring z >= z_min in a majority of the versions where a z-score is
/// defined. Null graphs come from degree-preserving rewiring with per-sample
/// seeds derived from `seed`.
inline MotifReport detect_motifs(const FrequencyTable& table, const MotifCriterion& criterion, const VersionSeries& series,
                                 std::uint64_t seed = kDefaultSeed, std::size_t jobs = 1,
                                 const EnumerationOptions& opts = {}) {
  validate_criterion(criterion);
  MotifReport report{{}, criterion, seed};
  for (const auto& fs : table.series)
    if (fs.mean_rel_freq + 1e-9 >= criterion.min_mean_freq_percent) report.motifs.push_back(Motif{fs.cls, fs.mean_rel_freq, std::nullopt});

  if (criterion.z_min && !report.motifs.empty()) {
    const std::size_t nv = series.size(), ns = table.sizes.size(), samples = criterion.null_samples;
    // null_counts[v][sample][size index]
    std::vector<std::vector<std::vector<GraphletCounts>>> null_counts(
        nv, std::vector<std::vector<GraphletCounts>>(samples, std::vector<GraphletCounts>(ns)));
    std::vector<std::vector<std::size_t>> accepted(nv, std::vector<std::size_t>(samples, 0));
    parallel_for(nv * samples, jobs, [&](std::size_t idx) {
      std::size_t v = idx / samples, s = idx % samples;
      auto rewired = degree_preserving_rewire(series.graphs()[v].digraph(), criterion.swaps_per_edge, derive_seed(seed, v, s));
      accepted[v][s] = rewired.accepted;
      for (std::size_t k = 0; k < ns; ++k) {
        EnumerationOptions o = opts;
        o.seed = derive_seed(opts.seed, v, static_cast<std::uint64_t>(table.sizes[k]));
        null_counts[v][s][k] = count_graphlets(rewired.graph, table.sizes[k], 1, o);
      }
    });

    std::vector<Motif> kept;
    for (auto& m : report.motifs) {
      const auto k = table.size_index(m.cls.size);
      double z_sum = 0.0;
      for (std::size_t v = 0; v < nv; ++v) {
        std::size_t total_accepted = 0;
        for (auto a : accepted[v]) total_accepted += a;
        if (total_accepted == 0) continue;
        double mean = 0.0;
        for (std::size_t s = 0; s < samples; ++s) mean += static_cast<double>(null_counts[v][s][k].by_class[m.cls.class_id]);
        mean /= static_cast<double>(samples);
        double var = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
          double d = static_cast<double>(null_counts[v][s][k].by_class[m.cls.class_id]) - mean;
          var += d * d;
        }
        double sd = std::sqrt(var / static_cast<double>(samples - 1));
        if (!(sd > 0.0)) continue;
        double z = (static_cast<double>(table.counts[v][k].by_class[m.cls.class_id]) - mean) / sd;
        ++m.z_defined_versions;
        z_sum += z;
        if (z >= *criterion.z_min) ++m.z_pass_versions;
      }
      if (m.z_defined_versions == 0) {
        m.null_degenerate = true;
        kept.push_back(m);
        continue;
      }
      m.mean_z = z_sum / static_cast<double>(m.z_defined_versions);
      if (2 * m.z_pass_versions > m.z_defined_versions) kept.push_back(m);
    }
    report.motifs = std::move(kept);
  }

  std::stable_sort(report.motifs.begin(), report.motifs.end(), [](const Motif& a, const Motif& b) {
    if (a.mean_rel_freq != b.mean_rel_freq) return a.mean_rel_freq > b.mean_rel_freq;
    return std::pair(a.cls.size, a.cls.class_id) < std::pair(b.cls.size, b.cls.class_id);
  });
  return report;
}

inline constexpr const char* kMotifCsvHeader =
    "size;class_id;canonical_code;mean_rel_freq_percent;mean_z;z_pass_versions;z_defined_versions;null_degenerate";

inline std::string motifs_to_csv(const MotifReport& r) {
  std::string out = kMotifCsvHeader;
  out += '\n';
  for (const auto& m : r.motifs)
    out += std::to_string(m.cls.size) + ';' + std::to_string(m.cls.class_id) + ';' + m.cls.canonical_code() + ';' +
           csv::format_number(m.mean_rel_freq) + ';' + (m.mean_z ? csv::format_number(*m.mean_z) : std::string()) + ';' +
           std::to_string(m.z_pass_versions) + ';' + std::to_string(m.z_defined_versions) + ';' +
           (m.null_degenerate ? "1" : "0") + '\n';
  return out;
}

}  // namespace cge
