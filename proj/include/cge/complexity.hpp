#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cge/csv.hpp"
#include "cge/error.hpp"
#include "cge/graphlet_catalog.hpp"
#include "cge/subgraph_mining.hpp"

namespace cge {

/// E - N + 2P with P = 1; catalog classes are connected.
inline int cyclomatic(const GraphletClass& cls) { return cls.arc_count() - cls.size + 2; }

enum class ComplexityWeights {
  /// Relative frequencies within each size, sizes averaged equally.
  Relative,
  /// Raw occurrence counts times complexity, summed over all classes.
  Absolute,
};

inline std::string_view to_string(ComplexityWeights w) { return w == ComplexityWeights::Relative ? "relative" : "absolute"; }

inline ComplexityWeights parse_weights(std::string_view s) {
  if (s == "relative") return ComplexityWeights::Relative;
  if (s == "absolute") return ComplexityWeights::Absolute;
  throw Error(ErrorCode::InvalidParams, "unknown complexity weighting '" + std::string(s) + "' (relative|absolute)");
}

inline std::string complexity_formula(ComplexityWeights w) {
  if (w == ComplexityWeights::Relative)
    return "CG-Cx = mean over sizes k of sum_c (rel_freq_percent(c)/100) * (E_c - N_c + 2); ECG-Cx = mean of CG-Cx";
  return "CG-Cx = sum_c count(c) * (E_c - N_c + 2); ECG-Cx = mean of CG-Cx";
}

struct CgCx {
  double value = 0.0;
  /// No occurrences at any requested size; value is 0.
  bool degenerate = false;
};

/// Frequency-weighted mean cyclomatic complexity of one version, from
/// (class, rel_freq_percent) pairs.
inline CgCx cg_cx(std::span<const std::pair<GraphletClass, double>> freqs) {
  std::map<int, std::pair<double, double>> per_size;  // size -> (weighted sum, total percent)
  for (const auto& [cls, pct] : freqs) {
    auto& acc = per_size[cls.size];
    acc.first += pct / 100.0 * cyclomatic(cls);
    acc.second += pct;
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& [size, acc] : per_size) {
    if (!(acc.second > 0.0)) continue;
    sum += acc.first;
    ++used;
  }
  if (used == 0) return {0.0, true};
  return {sum / static_cast<double>(used), false};
}

/// Absolute-count variant: sum of count * complexity.
inline CgCx cg_cx_absolute(std::span<const std::pair<GraphletClass, std::uint64_t>> counts) {
  double sum = 0.0;
  std::uint64_t total = 0;
  for (const auto& [cls, n] : counts) {
    sum += static_cast<double>(n) * cyclomatic(cls);
    total += n;
  }
  if (total == 0) return {0.0, true};
  return {sum, false};
}

struct VersionComplexity {
  std::string version_label;
  double cg_cx = 0.0;
  bool degenerate = false;
};

struct ComplexityReport {
  std::vector<VersionComplexity> per_version;
  double ecg_cx = 0.0;
  std::vector<int> sizes_used;
  ComplexityWeights weights = ComplexityWeights::Relative;
};

inline double mean_of(std::span<const VersionComplexity> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (const auto& v : values) s += v.cg_cx;
  return s / static_cast<double>(values.size());
}

/// Per-version CG-Cx and their mean, ECG-Cx.
inline ComplexityReport ecg_cx(const FrequencyTable& table, ComplexityWeights weights = ComplexityWeights::Relative) {
  if (table.version_labels.empty()) throw Error(ErrorCode::InvalidParams, "complexity needs at least one version");
  ComplexityReport report;
  report.sizes_used = table.sizes;
  report.weights = weights;
  for (std::size_t v = 0; v < table.version_labels.size(); ++v) {
    CgCx cx;
    if (weights == ComplexityWeights::Relative) {
      std::vector<std::pair<GraphletClass, double>> freqs;
      for (const auto& fs : table.series)
        if (fs.per_version[v].count) freqs.emplace_back(fs.cls, fs.per_version[v].rel_freq_percent);
      cx = cg_cx(freqs);
    } else {
      std::vector<std::pair<GraphletClass, std::uint64_t>> counts;
      for (const auto& fs : table.series)
        if (fs.per_version[v].count) counts.emplace_back(fs.cls, fs.per_version[v].count);
      cx = cg_cx_absolute(counts);
    }
    report.per_version.push_back({table.version_labels[v], cx.value, cx.degenerate});
  }
  report.ecg_cx = mean_of(report.per_version);
  return report;
}

inline constexpr const char* kComplexityCsvHeader = "version;cg_cx;degenerate";

/// One row per version plus a closing `ECG-Cx` row (degenerate = 1 only when
/// every version is).
inline std::string complexity_to_csv(const ComplexityReport& r) {
  std::string out = kComplexityCsvHeader;
  out += '\n';
  bool all_degenerate = !r.per_version.empty();
  for (const auto& v : r.per_version) {
    out += v.version_label + ';' + csv::format_number(v.cg_cx) + ';' + (v.degenerate ? "1" : "0") + '\n';
    all_degenerate = all_degenerate && v.degenerate;
  }
  out += std::string("ECG-Cx;") + csv::format_number(r.ecg_cx) + ';' + (all_degenerate ? "1" : "0") + '\n';
  return out;
}

}  // namespace cge
