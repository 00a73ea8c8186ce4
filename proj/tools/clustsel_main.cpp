// clustsel: grid-driven selection of clustering algorithms and
// hyperparameters without ground-truth labels.
//
// Exit codes: 0 ok, 1 I/O error, 2 usage or validation error, 3 internal.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "clustsel/consensus.hpp"
#include "clustsel/errors.hpp"
#include "clustsel/experiment.hpp"
#include "clustsel/report.hpp"
#include "clustsel/search.hpp"
#include "clustsel/threading.hpp"

namespace fs = std::filesystem;
using namespace clustsel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct DataFlags {
  std::string path;
  bool has_header = false;
  std::string delimiter = ",";
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--data", flags.path, "input CSV, one point per row")->required();
  cmd->add_flag("--has-header", flags.has_header, "skip the first row");
  cmd->add_option("--delimiter", flags.delimiter,
                  "cell delimiter; ' ' accepts any blank run")
      ->default_val(",");
}

Dataset load_data(const DataFlags& flags) {
  if (flags.delimiter.size() != 1)
    throw std::invalid_argument("--delimiter expects a single character");
  return load_csv(flags.path, flags.has_header, flags.delimiter[0]);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw format_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

// --- cluster ----------------------------------------------------------------

struct ClusterArgs {
  DataFlags data;
  std::string algo;
  std::string out;
  std::optional<int> k;
  std::uint64_t seed = 1;
  int max_iter = 0;
  std::optional<double> eps;
  std::optional<int> min_pts;
  std::optional<double> bandwidth;
  std::string linkage = "average";
};

HyperparamConfig config_from_cluster_args(const ClusterArgs& a) {
  const Algorithm algo = parse_algorithm(a.algo);
  switch (algo) {
    case Algorithm::kMeans: {
      if (!a.k) throw std::invalid_argument("kmeans requires --k");
      KMeansParams p;
      p.k = *a.k;
      p.seed = a.seed;
      if (a.max_iter > 0) p.max_iter = a.max_iter;
      return HyperparamConfig(p);
    }
    case Algorithm::kDbscan: {
      if (!a.eps || !a.min_pts)
        throw std::invalid_argument("dbscan requires --eps and --min-pts");
      DbscanParams p;
      p.eps = *a.eps;
      p.min_pts = *a.min_pts;
      return HyperparamConfig(p);
    }
    case Algorithm::kMeanShift: {
      if (!a.bandwidth) throw std::invalid_argument("meanshift requires --bandwidth");
      MeanShiftParams p;
      p.bandwidth = *a.bandwidth;
      if (a.max_iter > 0) p.max_iter = a.max_iter;
      return HyperparamConfig(p);
    }
    case Algorithm::kAgglomerative: {
      if (!a.k) throw std::invalid_argument("agglomerative requires --k");
      AgglomerativeParams p;
      p.k = *a.k;
      p.linkage = parse_linkage(a.linkage);
      return HyperparamConfig(p);
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

int run_cluster(const ClusterArgs& a) {
  const HyperparamConfig config = config_from_cluster_args(a);
  config.validate();
  const Dataset ds = load_data(a.data);
  const Labeling labels = run_config(ds, config);
  write_labels(labels, a.out);
  std::printf("%s: n=%d k=%d -> %s\n", config.display_name().c_str(), labels.n(),
              labels.k(), a.out.c_str());
  return kExitOk;
}

// --- ensemble ---------------------------------------------------------------

struct EnsembleArgs {
  DataFlags data;
  std::string grid_path;
  std::string out_dir;
};

int run_ensemble_cmd(const EnsembleArgs& a) {
  const Dataset ds = load_data(a.data);
  const Grid grid = Grid::load(a.grid_path);
  const Ensemble ens = build_ensemble(ds, grid);
  fs::create_directories(a.out_dir);

  json manifest;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(ens.dataset_fingerprint));
  manifest["dataset_fingerprint"] = fp;
  json members = json::array();
  for (std::size_t i = 0; i < ens.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "labels_%03zu.txt", i);
    write_labels(ens.entries[i].labeling, (fs::path(a.out_dir) / name).string());
    members.push_back({{"file", name},
                       {"config", config_to_json(ens.entries[i].config)},
                       {"name", ens.entries[i].config.display_name()}});
  }
  manifest["members"] = std::move(members);
  manifest["warnings"] = ens.warnings;
  write_json_file((fs::path(a.out_dir) / "ensemble.json").string(), manifest);

  for (const auto& w : ens.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("ensemble of %zu clusterings -> %s\n", ens.size(), a.out_dir.c_str());
  return kExitOk;
}

// --- consensus --------------------------------------------------------------

struct ConsensusArgs {
  std::string ensemble_dir;
  int k_star = 0;
  std::string linkage = "average";
  std::string out;
  std::string coassoc_out;
};

int run_consensus_cmd(const ConsensusArgs& a) {
  const json manifest =
      read_json_file((fs::path(a.ensemble_dir) / "ensemble.json").string());
  std::vector<Labeling> ls;
  for (const json& member : manifest.at("members"))
    ls.push_back(read_labels(
        (fs::path(a.ensemble_dir) / member.at("file").get<std::string>()).string()));
  if (ls.empty()) throw std::invalid_argument("consensus: empty ensemble");

  const CoAssociationMatrix m = hamming_matrix(ls);
  if (!a.coassoc_out.empty()) write_coassociation_csv(m, a.coassoc_out);
  const Labeling c_star = consensus_from_matrix(m, a.k_star, parse_linkage(a.linkage));
  write_labels(c_star, a.out);
  std::printf("consensus: k_star=%d anmi=%.6g -> %s\n", a.k_star,
              evaluate_consensus(c_star, ls), a.out.c_str());
  return kExitOk;
}

// --- select -----------------------------------------------------------------

struct SelectArgs {
  DataFlags data;
  std::string grid_path;
  std::string strategy;
  int k_star = 0;
  std::string linkage = "average";
  std::string out_dir;
};

int run_select(const SelectArgs& a) {
  if (a.strategy != "anmi" && a.strategy != "best-match")
    throw std::invalid_argument("--strategy must be 'anmi' or 'best-match'");
  if (a.strategy == "best-match" && a.k_star <= 0)
    throw std::invalid_argument("strategy 'best-match' requires --k-star");

  const Dataset ds = load_data(a.data);
  const Grid grid = Grid::load(a.grid_path);
  const Eigen::MatrixXd dist = pairwise_distances(ds);
  const Ensemble ens = build_ensemble(ds, grid, &dist);
  for (const auto& w : ens.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  const Linkage linkage = parse_linkage(a.linkage);
  SelectionResult result = a.strategy == "anmi"
                               ? select_anmi(ens)
                               : select_best_match(ens, a.k_star, linkage);

  fs::create_directories(a.out_dir);
  const std::string json_name =
      a.strategy == "anmi" ? "selection_anmi.json" : "selection_best_match.json";
  write_json_file((fs::path(a.out_dir) / json_name).string(), result.to_json(ens));

  // The criterion table needs a consensus reference; build one whenever
  // k_star is known.
  if (a.k_star > 0) {
    const Labeling c_star = result.consensus
                                ? *result.consensus
                                : consensus_clustering(ens.labelings(), a.k_star, linkage);
    const MetricReport report = compute_metric_report(ds, dist, ens, c_star);
    write_metric_csv(report, (fs::path(a.out_dir) / "metrics.csv").string());
    std::vector<HyperparamConfig> configs;
    for (const auto& e : ens.entries) configs.push_back(e.config);
    std::ofstream table((fs::path(a.out_dir) / "metrics_table.txt").string());
    table << format_metric_table(report, configs);
  }

  std::printf("chosen: %s\nscore: %.6g\n", result.chosen_config.display_name().c_str(),
              result.score);
  if (result.ties.size() > 1)
    std::printf("ties: %zu configurations share the top score\n", result.ties.size());
  return kExitOk;
}

// --- metrics ----------------------------------------------------------------

struct MetricsArgs {
  DataFlags data;
  std::string labels_path;
  std::string ref_path;
};

int run_metrics(const MetricsArgs& a) {
  const Dataset ds = load_data(a.data);
  const Labeling labels = read_labels(a.labels_path);
  if (labels.n() != ds.n())
    throw std::invalid_argument("labels length does not match dataset");
  const Eigen::MatrixXd dist = pairwise_distances(ds);

  std::printf("k:          %d\n", labels.k());
  std::printf("chi:        %s\n",
              format_metric_value(calinski_harabasz(ds, labels)).c_str());
  std::printf("di1:        %s\n", format_metric_value(dunn_min_max(dist, labels)).c_str());
  std::printf("di2:        %s\n", format_metric_value(dunn_average(dist, labels)).c_str());
  std::printf("silhouette: %s\n", format_metric_value(silhouette(dist, labels)).c_str());
  if (!a.ref_path.empty()) {
    const Labeling ref = read_labels(a.ref_path);
    std::printf("nmi:        %.6g\n", nmi(labels, ref));
    std::printf("rand:       %.6g\n", rand_index(labels, ref));
    std::printf("jaccard:    %s\n", format_metric_value(jaccard(labels, ref)).c_str());
    std::printf("ari:        %s\n", format_metric_value(ari(labels, ref)).c_str());
  }
  return kExitOk;
}

// --- experiment / bench -----------------------------------------------------

struct ExperimentArgs {
  std::string spec_path;
  std::string out_dir_override;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentSpec spec = ExperimentSpec::load(a.spec_path);
  if (!a.out_dir_override.empty()) spec.out_dir = a.out_dir_override;
  const ExperimentResult result = run_experiment(spec);
  for (const auto& w : result.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (result.strategy1)
    std::printf("strategy 1: %s (score %.6g)\n",
                result.strategy1->chosen_config.display_name().c_str(),
                result.strategy1->score);
  for (std::size_t i = 0; i < result.strategy2.size(); ++i)
    std::printf("strategy 2 (k*=%d): %s (score %.6g)\n",
                result.strategy2[i].k_star,
                result.strategy2[i].chosen_config.display_name().c_str(),
                result.strategy2[i].score);
  std::printf("bundle: %s (%zu files)\n", result.out_dir.c_str(),
              result.files.size());
  return kExitOk;
}

struct BenchArgs {
  std::vector<int> n_list{200, 400};
  std::vector<int> m_list{10, 20};
  std::string csv_out;
};

int run_bench(const BenchArgs& a) {
  const auto rows = complexity_bench(a.n_list, a.m_list);
  std::fputs(format_bench_table(rows).c_str(), stdout);
  if (!a.csv_out.empty()) {
    std::ofstream out(a.csv_out);
    if (!out) throw io_error("cannot open for writing: " + a.csv_out);
    out << "n,m,nmi_evals,anmi_seconds,hamming_pairs,best_match_seconds\n";
    for (const auto& r : rows)
      out << r.n << ',' << r.m << ',' << r.nmi_evals << ',' << r.anmi_seconds
          << ',' << r.hamming_pairs << ',' << r.best_match_seconds << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "clustsel: selects clustering algorithms and hyperparameters without "
      "labels by scoring a hyperparameter-grid ensemble against itself (ANMI) "
      "or against its consensus clustering (NMI).\n"
      "Exit codes: 0 ok, 1 I/O error, 2 usage/validation error, 3 internal."};
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")
      ->envname("CLUSTSEL_THREADS");

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand("cluster", "run one clustering configuration");
  add_data_flags(cluster, cluster_args.data);
  cluster->add_option("--algo", cluster_args.algo,
                      "kmeans | dbscan | meanshift | agglomerative")
      ->required();
  cluster->add_option("--out", cluster_args.out, "output label file")->required();
  cluster->add_option("--k", cluster_args.k, "cluster count (kmeans, agglomerative)");
  cluster->add_option("--seed", cluster_args.seed, "kmeans seed");
  cluster->add_option("--max-iter", cluster_args.max_iter, "iteration cap");
  cluster->add_option("--eps", cluster_args.eps, "dbscan radius");
  cluster->add_option("--min-pts", cluster_args.min_pts,
                      "dbscan neighborhood size, query point included");
  cluster->add_option("--bandwidth", cluster_args.bandwidth, "meanshift window radius");
  cluster->add_option("--linkage", cluster_args.linkage,
                      "single | average | complete");

  EnsembleArgs ensemble_args;
  CLI::App* ensemble = app.add_subcommand("ensemble", "run a whole grid and store the labelings");
  add_data_flags(ensemble, ensemble_args.data);
  ensemble->add_option("--grid", ensemble_args.grid_path, "grid spec JSON")->required();
  ensemble->add_option("--out-dir", ensemble_args.out_dir, "output directory")->required();

  ConsensusArgs consensus_args;
  CLI::App* consensus = app.add_subcommand("consensus", "recluster a stored ensemble into a consensus");
  consensus->add_option("--ensemble-dir", consensus_args.ensemble_dir,
                        "directory written by 'ensemble'")
      ->required();
  consensus->add_option("--k-star", consensus_args.k_star, "consensus cluster count")
      ->required();
  consensus->add_option("--linkage", consensus_args.linkage, "single | average | complete");
  consensus->add_option("--out", consensus_args.out, "output label file")->required();
  consensus->add_option("--export-coassoc", consensus_args.coassoc_out,
                        "also write the disagreement matrix as CSV");

  SelectArgs select_args;
  CLI::App* select = app.add_subcommand("select", "pick the best configuration from a grid");
  add_data_flags(select, select_args.data);
  select->add_option("--grid", select_args.grid_path, "grid spec JSON")->required();
  select->add_option("--strategy", select_args.strategy, "anmi | best-match")->required();
  select->add_option("--k-star", select_args.k_star,
                     "consensus cluster count (required for best-match)");
  select->add_option("--linkage", select_args.linkage, "single | average | complete");
  select->add_option("--out-dir", select_args.out_dir, "output directory")->required();

  MetricsArgs metrics_args;
  CLI::App* metrics = app.add_subcommand("metrics", "score one labeling");
  add_data_flags(metrics, metrics_args.data);
  metrics->add_option("--labels", metrics_args.labels_path, "label file")->required();
  metrics->add_option("--ref", metrics_args.ref_path,
                      "reference label file for external criteria");

  ExperimentArgs experiment_args;
  CLI::App* experiment = app.add_subcommand("experiment", "run a full experiment spec");
  experiment->add_option("--spec", experiment_args.spec_path, "experiment spec JSON")
      ->required();
  experiment->add_option("--out-dir", experiment_args.out_dir_override,
                         "override the spec's out_dir");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "empirical scaling of both strategies");
  bench->add_option("--n-list", bench_args.n_list, "dataset sizes")->delimiter(',');
  bench->add_option("--m-list", bench_args.m_list, "ensemble sizes")->delimiter(',');
  bench->add_option("--csv", bench_args.csv_out, "also write rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  threading::set_max_threads(threads);

  try {
    if (*cluster) return run_cluster(cluster_args);
    if (*ensemble) return run_ensemble_cmd(ensemble_args);
    if (*consensus) return run_consensus_cmd(consensus_args);
    if (*select) return run_select(select_args);
    if (*metrics) return run_metrics(metrics_args);
    if (*experiment) return run_experiment_cmd(experiment_args);
    if (*bench) return run_bench(bench_args);
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const json::exception& e) {
    // malformed content in a spec or manifest file
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
