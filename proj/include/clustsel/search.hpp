#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "clustsel/algorithms.hpp"
#include "clustsel/consensus.hpp"
#include "clustsel/dataset.hpp"
#include "clustsel/labeling.hpp"

namespace clustsel {

using json = nlohmann::ordered_json;

json config_to_json(const HyperparamConfig& c);
HyperparamConfig config_from_json(const json& j);

/// The ordered set of hyperparameter configurations to evaluate. When built
/// from a JSON description, each algorithm block expands to the cartesian
/// product of its parameter lists, algorithms in the fixed order kmeans,
/// dbscan, meanshift, agglomerative.
struct Grid {
  std::vector<HyperparamConfig> configs;

  std::size_t size() const { return configs.size(); }

  /// Accepts {"kmeans": {"k": [2,3], "seed": 1}, "dbscan": {...}, ...} with
  /// scalars allowed wherever a list is expected. Throws on unknown keys,
  /// out-of-range values or duplicate configurations.
  static Grid from_json(const json& spec);
  static Grid load(const std::string& path);
  json to_json() const;
};

struct EnsembleEntry {
  HyperparamConfig config;
  Labeling labeling;
};

/// One clustering per surviving grid configuration, in grid order.
struct Ensemble {
  std::vector<EnsembleEntry> entries;
  std::uint64_t dataset_fingerprint = 0;
  std::vector<std::string> warnings;  // configs dropped during the build

  std::size_t size() const { return entries.size(); }
  std::vector<Labeling> labelings() const;
};

/// Runs every grid config on the dataset. A config that fails (e.g. k > n) is
/// dropped with a warning instead of aborting the sweep. Throws when the grid
/// is empty or nothing survives.
Ensemble build_ensemble(const Dataset& ds, const Grid& grid,
                        const Eigen::MatrixXd* dist = nullptr);

enum class Strategy { kAnmiMax, kBestMatch };
const char* to_string(Strategy s);

struct SelectionResult {
  Strategy strategy = Strategy::kAnmiMax;
  int chosen_index = -1;
  HyperparamConfig chosen_config;
  Labeling chosen_labeling;
  double score = 0.0;
  std::vector<double> scores;         // one per ensemble entry, in order
  std::vector<int> ties;              // every index attaining the top score
  std::optional<Labeling> consensus;  // best-match only
  int k_star = 0;                     // best-match only
  Linkage linkage = Linkage::kAverage;
  std::uint64_t dataset_fingerprint = 0;
  std::uint64_t pairwise_nmi_evals = 0;  // NMI evaluations spent on scoring

  json to_json(const Ensemble& ens) const;
};

/// Scores each member by its mean NMI against all other members
/// (leave-one-out) and returns the argmax; ties resolve to the earliest grid
/// position. Requires at least 2 entries.
SelectionResult select_anmi(const Ensemble& ens);

/// Builds the consensus clustering with k_star clusters and returns the
/// member with the highest NMI against it.
SelectionResult select_best_match(const Ensemble& ens, int k_star,
                                  Linkage linkage = Linkage::kAverage);

/// Variant reusing an externally built consensus (e.g. during a k_star sweep).
SelectionResult select_best_match_with_consensus(const Ensemble& ens,
                                                 const Labeling& consensus,
                                                 int k_star, Linkage linkage);

/// Symmetric m x m NMI matrix with zero diagonal. Adds the number of
/// evaluated pairs, exactly m(m-1)/2, to *eval_count when given.
Eigen::MatrixXd pairwise_nmi_matrix(const std::vector<Labeling>& ls,
                                    std::uint64_t* eval_count = nullptr);

struct BenchRow {
  int n = 0;
  int m = 0;
  std::uint64_t nmi_evals = 0;
  std::uint64_t hamming_pairs = 0;
  double anmi_seconds = 0.0;
  double best_match_seconds = 0.0;
};

/// Empirical scaling of the two strategies over synthetic datasets; reports
/// wall times plus the exact operation counters.
std::vector<BenchRow> complexity_bench(const std::vector<int>& n_list,
                                       const std::vector<int>& m_list);
std::string format_bench_table(const std::vector<BenchRow>& rows);

}  // namespace clustsel
