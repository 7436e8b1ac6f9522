// cge: call graph evolution analytics over a version series.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cge/pipeline.hpp"

namespace {

std::size_t jobs_from_env() {
  if (const char* v = std::getenv("CGE_JOBS")) {
    try {
      return static_cast<std::size_t>(std::stoul(v));
    } catch (const std::exception&) {
      throw cge::Error(cge::ErrorCode::InvalidParams, std::string("CGE_JOBS is not a number: '") + v + "'");
    }
  }
  return 0;
}

struct SharedFlags {
  std::string manifest;
  std::string out = ".";
  std::optional<std::size_t> jobs;
  std::uint64_t seed = cge::kDefaultSeed;
  bool lenient = false;
};

void add_shared(CLI::App* cmd, SharedFlags& f, bool needs_manifest = true) {
  auto* m = cmd->add_option("--manifest", f.manifest, "Version-series manifest (JSON)");
  if (needs_manifest) m->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Worker threads (default: $CGE_JOBS or CPU count)");
  cmd->add_option("--seed", f.seed, "Master random seed")->capture_default_str();
  cmd->add_flag("--lenient", f.lenient, "Drop edges with undeclared endpoints instead of failing");
}

cge::RunConfig to_config(const SharedFlags& f) {
  cge::RunConfig cfg;
  cfg.manifest = f.manifest;
  cfg.out_dir = f.out;
  cfg.jobs = f.jobs ? *f.jobs : jobs_from_env();
  cfg.seed = f.seed;
  cfg.lenient = f.lenient;
  cfg.enumeration.seed = f.seed;
  return cfg;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Call graph evolution analytics: stable evolution rules, graphlet series and complexity"};
  app.require_subcommand(1);

  SharedFlags shared;

  // Rule mining.
  auto* rules = app.add_subcommand("mine-rules", "Mine stable call graph evolution rules");
  add_shared(rules, shared);
  double min_sup = 0.4, min_conf = 0.8;
  std::optional<double> stab_count, stab_frac;
  std::string scheme = "caller";
  std::size_t max_itemset = 4;
  rules->add_option("--min-sup", min_sup, "Minimum support in (0,1]")->capture_default_str();
  rules->add_option("--min-conf", min_conf, "Minimum confidence in [0,1]")->capture_default_str();
  auto* sc = rules->add_option("--min-stab-count", stab_count, "Minimum stability as a version count");
  auto* sf = rules->add_option("--min-stab-frac", stab_frac, "Minimum stability as a fraction of versions (default 0.5)");
  sc->excludes(sf);
  sf->excludes(sc);
  rules->add_option("--scheme", scheme, "Transaction scheme: caller|module")->capture_default_str();
  rules->add_option("--max-itemset", max_itemset, "Largest itemset size")->capture_default_str();

  // Subgraph mining and complexity share the census flags.
  std::vector<int> sizes{3, 4};
  double motif_threshold = 10.0;
  std::optional<double> z_min;
  std::size_t null_samples = 20;
  double swaps_per_edge = 10.0;
  std::size_t sample_above = 0;
  double sample_prob = 0.1;
  std::string weights = "relative";

  auto add_census = [&](CLI::App* cmd) {
    cmd->add_option("--sizes", sizes, "Graphlet sizes (subset of 2,3,4)")->delimiter(',')->capture_default_str();
    cmd->add_option("--sample-above-arcs", sample_above, "Root-sample graphs with more arcs than this (0 = exact)")
        ->capture_default_str();
    cmd->add_option("--sample-prob", sample_prob, "Root sampling probability")->capture_default_str();
  };

  auto* subgraphs = app.add_subcommand("mine-subgraphs", "Graphlet frequency series and motifs");
  add_shared(subgraphs, shared);
  add_census(subgraphs);
  subgraphs->add_option("--motif-threshold", motif_threshold, "Minimum mean relative frequency (percent)")
      ->capture_default_str();
  subgraphs->add_option("--z-min", z_min, "Also require z-score >= this against the null model");
  subgraphs->add_option("--null-samples", null_samples, "Randomized graphs per version")->capture_default_str();
  subgraphs->add_option("--swaps-per-edge", swaps_per_edge, "Swap attempts per arc")->capture_default_str();

  auto* complexity = app.add_subcommand("complexity", "Per-version CG-Cx and aggregated ECG-Cx");
  add_shared(complexity, shared);
  add_census(complexity);
  complexity->add_option("--weights", weights, "relative|absolute")->capture_default_str();

  // Synthetic corpus.
  auto* synth = app.add_subcommand("synth", "Generate a synthetic version series");
  add_shared(synth, shared, false);
  cge::SynthParams synth_params;
  synth->add_option("--nodes", synth_params.nodes, "Procedures in the first version")->capture_default_str();
  synth->add_option("--versions", synth_params.versions, "Number of versions")->capture_default_str();
  synth->add_option("--churn", synth_params.churn, "Fraction of arcs rewired per version")->capture_default_str();
  synth->add_option("--system", synth_params.system, "System label")->capture_default_str();

  auto* catalog = app.add_subcommand("catalog", "Dump the graphlet class catalog");
  std::string catalog_out;
  std::vector<int> catalog_sizes{2, 3, 4};
  catalog->add_option("--sizes", catalog_sizes, "Sizes to list")->delimiter(',')->capture_default_str();
  catalog->add_option("--out", catalog_out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*rules) {
      auto cfg = to_config(shared);
      cfg.rules = {min_sup, min_conf, max_itemset, cge::parse_scheme(scheme)};
      if (stab_count) cfg.min_stab = cge::MinStability::count(*stab_count);
      if (stab_frac) cfg.min_stab = cge::MinStability::fraction(*stab_frac);
      report(cge::cmd_mine_rules(cfg));
    } else if (*subgraphs || *complexity) {
      auto cfg = to_config(shared);
      cfg.sizes = sizes;
      cfg.enumeration.sample_above_arcs = sample_above;
      cfg.enumeration.sample_root_probability = sample_prob;
      if (*subgraphs) {
        cfg.motif = {motif_threshold, z_min, null_samples, swaps_per_edge};
        report(cge::cmd_mine_subgraphs(cfg));
      } else {
        cfg.weights = cge::parse_weights(weights);
        report(cge::cmd_complexity(cfg));
      }
    } else if (*synth) {
      synth_params.seed = shared.seed;
      cge::cmd_synth(synth_params, shared.out);
      std::cout << (std::filesystem::path(shared.out) / "manifest.json").string() << '\n';
    } else if (*catalog) {
      auto csv = cge::catalog_to_csv(cge::normalize_sizes(catalog_sizes));
      if (catalog_out.empty())
        std::cout << csv;
      else
        report(cge::write_outputs(catalog_out, {{"graphlet_catalog.csv", csv}}));
    }
  } catch (const cge::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
