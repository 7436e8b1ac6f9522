#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cge/complexity.hpp"
#include "cge/core_model.hpp"
#include "cge/error.hpp"
#include "cge/evolution_rules.hpp"
#include "cge/graphlet_catalog.hpp"
#include "cge/ingestion.hpp"
#include "cge/parallel.hpp"
#include "cge/rule_mining.hpp"
#include "cge/subgraph_mining.hpp"
#include "cge/synth.hpp"
#include <nlohmann/json.hpp>

namespace cge {

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir = ".";
  std::size_t jobs = 0;
  std::uint64_t seed = kDefaultSeed;
  bool lenient = false;

  RuleMiningParams rules;
  MinStability min_stab = MinStability::fraction(0.5);

  std::vector<int> sizes{3, 4};
  MotifCriterion motif;
  EnumerationOptions enumeration;
  ComplexityWeights weights = ComplexityWeights::Relative;
};

/// Writes every (file name, content) pair into `dir`. If any write fails the
/// files already written by this call are removed again.
inline std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                        const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    auto path = dir / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    if (!os) {
      for (const auto& w : written) std::filesystem::remove(w, ec);
      std::filesystem::remove(path, ec);
      throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
    written.push_back(path);
  }
  return written;
}

namespace detail {

inline VersionSeries load_for(const RunConfig& cfg, std::vector<ParseReport>& reports) {
  auto manifest = load_manifest(cfg.manifest);
  return load_series(manifest, ParseOptions{cfg.lenient}, cfg.jobs, &reports);
}

inline nlohmann::ordered_json series_json(const VersionSeries& series, const std::vector<ParseReport>& reports) {
  nlohmann::ordered_json versions = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& g = series.graphs()[i];
    auto st = graph_stats(g);
    nlohmann::ordered_json v;
    v["label"] = g.version_label();
    v["procedures"] = st.procedure_count;
    v["call_pairs"] = st.edge_count;
    v["avg_neighbours"] = st.avg_neighbours;
    v["self_loops"] = g.self_loop_count();
    if (i < reports.size()) {
      v["dropped_edges"] = reports[i].dropped_edges;
      v["duplicate_edges"] = reports[i].duplicate_edges;
    }
    versions.push_back(std::move(v));
  }
  return {{"system", series.label()}, {"versions", std::move(versions)}};
}

inline nlohmann::ordered_json criterion_json(const MotifCriterion& c) {
  nlohmann::ordered_json j;
  j["min_mean_freq_percent"] = c.min_mean_freq_percent;
  if (c.z_min) {
    j["z_min"] = *c.z_min;
    j["null_samples"] = c.null_samples;
    j["swaps_per_edge"] = c.swaps_per_edge;
    j["null_model"] = "degree-preserving directed arc swaps";
    j["z_rule"] = "z >= z_min in a majority of versions with defined z";
  }
  return j;
}

}  // namespace detail

struct RuleRun {
  std::vector<VersionRules> per_version;
  std::vector<EvolutionRule> cgers;
  StableRuleSet stable;
  RuleCountSummary counts;
  TransitivityGraph transitivity;
  RuleLattice lattice;
};

/// Per-version mining (concurrent), then the cross-version fold.
inline RuleRun run_rule_pipeline(const VersionSeries& series, const RuleMiningParams& params, MinStability min_stab,
                                 std::size_t jobs) {
  min_stab.resolve(series.size());
  RuleRun run;
  run.per_version.resize(series.size());
  parallel_for(series.size(), jobs, [&](std::size_t i) { run.per_version[i] = mine_version_rules(series.graphs()[i], params); });
  run.cgers = aggregate_cgers(run.per_version);
  run.stable = filter_stable(run.cgers, min_stab, series.size(), params.min_support, params.min_confidence);
  run.counts = count_summary(run.per_version, run.cgers, run.stable);
  run.transitivity = build_transitivity_graph(run.stable);
  run.lattice = build_lattice(run.stable);
  return run;
}

/// `mine-rules`: cgers.csv, stable_rules.csv, rule_counts.csv,
/// transitivity.dot, lattice.dot, rules_meta.json.
inline std::vector<std::filesystem::path> cmd_mine_rules(const RunConfig& cfg) {
  std::vector<ParseReport> reports;
  auto series = detail::load_for(cfg, reports);
  auto run = run_rule_pipeline(series, cfg.rules, cfg.min_stab, cfg.jobs);

  std::vector<EvolutionRule> all = run.cgers;
  sort_for_report(all);

  nlohmann::ordered_json meta;
  meta["series"] = detail::series_json(series, reports);
  meta["scheme"] = std::string(to_string(cfg.rules.scheme));
  meta["min_support"] = cfg.rules.min_support;
  meta["min_confidence"] = cfg.rules.min_confidence;
  meta["max_itemset"] = cfg.rules.max_itemset;
  meta["min_stability"] = cfg.min_stab.describe();
  meta["min_stability_versions"] = run.stable.resolved_min_stability;
  meta["transitivity"] = "edges x->y for each stable rule {x} -> Y with y in Y";
  meta["lattice"] = "Hasse diagram of antecedents and antecedent-union-consequent itemsets";
  nlohmann::ordered_json empty = nlohmann::ordered_json::array();
  for (const auto& v : run.per_version)
    if (v.empty_database) empty.push_back(v.version_label);
  meta["empty_transaction_databases"] = std::move(empty);
  meta["chains_truncated"] = run.transitivity.chains_truncated;

  return write_outputs(cfg.out_dir, {
                                        {"cgers.csv", rules_to_csv(all)},
                                        {"stable_rules.csv", rules_to_csv(run.stable.rules)},
                                        {"rule_counts.csv", counts_to_csv(run.counts)},
                                        {"transitivity.dot", transitivity_to_dot(run.transitivity)},
                                        {"lattice.dot", lattice_to_dot(run.lattice)},
                                        {"rules_meta.json", meta.dump(2) + "\n"},
                                    });
}

/// `mine-subgraphs`: graphlet_frequencies.csv, graphlet_catalog.csv,
/// motifs.csv, subgraphs_meta.json.
inline std::vector<std::filesystem::path> cmd_mine_subgraphs(const RunConfig& cfg) {
  auto sizes = normalize_sizes(cfg.sizes);
  validate_criterion(cfg.motif);
  std::vector<ParseReport> reports;
  auto series = detail::load_for(cfg, reports);
  auto table = frequency_series(series, sizes, cfg.jobs, cfg.enumeration);
  auto motifs = detect_motifs(table, cfg.motif, series, cfg.seed, cfg.jobs, cfg.enumeration);

  nlohmann::ordered_json meta;
  meta["series"] = detail::series_json(series, reports);
  meta["sizes"] = sizes;
  meta["occurrence_semantics"] = "connected induced subgraphs, one per node set";
  meta["criterion"] = detail::criterion_json(cfg.motif);
  meta["seed"] = cfg.seed;
  nlohmann::ordered_json degenerate = nlohmann::ordered_json::array();
  for (const auto& [label, k] : table.degenerate_versions()) degenerate.push_back({{"version", label}, {"size", k}});
  meta["degenerate_versions"] = std::move(degenerate);
  nlohmann::ordered_json sampled = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < table.counts.size(); ++v)
    for (const auto& c : table.counts[v])
      if (c.sampled) sampled.push_back({{"version", table.version_labels[v]}, {"size", c.size}});
  meta["sampled_versions"] = std::move(sampled);

  return write_outputs(cfg.out_dir, {
                                        {"graphlet_frequencies.csv", frequencies_to_csv(table)},
                                        {"graphlet_catalog.csv", catalog_to_csv(sizes)},
                                        {"motifs.csv", motifs_to_csv(motifs)},
                                        {"subgraphs_meta.json", meta.dump(2) + "\n"},
                                    });
}

/// `complexity`: complexity.csv, complexity_meta.json.
inline std::vector<std::filesystem::path> cmd_complexity(const RunConfig& cfg) {
  auto sizes = normalize_sizes(cfg.sizes);
  std::vector<ParseReport> reports;
  auto series = detail::load_for(cfg, reports);
  auto table = frequency_series(series, sizes, cfg.jobs, cfg.enumeration);
  auto report = ecg_cx(table, cfg.weights);

  nlohmann::ordered_json meta;
  meta["series"] = detail::series_json(series, reports);
  meta["sizes"] = sizes;
  meta["weights"] = std::string(to_string(cfg.weights));
  meta["formula"] = complexity_formula(cfg.weights);
  meta["cyclomatic"] = "E - N + 2 per graphlet class";
  meta["ecg_cx"] = report.ecg_cx;

  return write_outputs(cfg.out_dir, {
                                        {"complexity.csv", complexity_to_csv(report)},
                                        {"complexity_meta.json", meta.dump(2) + "\n"},
                                    });
}

inline Manifest cmd_synth(const SynthParams& params, const std::filesystem::path& out_dir) {
  return write_synthetic_series(params, out_dir);
}

}  // namespace cge
