#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>

#include "clustsel/dataset.hpp"
#include "clustsel/labeling.hpp"

namespace clustsel {

enum class Algorithm { kMeans, kDbscan, kMeanShift, kAgglomerative };

enum class Linkage { kSingle, kAverage, kComplete };

Linkage parse_linkage(const std::string& name);
const char* to_string(Linkage l);
const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct KMeansParams {
  int k = 0;
  std::uint64_t seed = 1;
  int max_iter = 100;
  bool operator==(const KMeansParams&) const = default;
};

struct DbscanParams {
  double eps = 0.0;
  int min_pts = 1;
  bool operator==(const DbscanParams&) const = default;
};

struct MeanShiftParams {
  double bandwidth = 0.0;
  int max_iter = 300;
  bool operator==(const MeanShiftParams&) const = default;
};

struct AgglomerativeParams {
  int k = 0;
  Linkage linkage = Linkage::kAverage;
  bool operator==(const AgglomerativeParams&) const = default;
};

/// One point of the hyperparameter search space: an algorithm plus a full
/// parameter assignment. Two configs compare equal iff the algorithm and all
/// parameters are equal.
class HyperparamConfig {
 public:
  using Params =
      std::variant<KMeansParams, DbscanParams, MeanShiftParams, AgglomerativeParams>;

  HyperparamConfig() = default;
  explicit HyperparamConfig(Params params) : params_(std::move(params)) {}

  Algorithm algorithm() const {
    return static_cast<Algorithm>(params_.index());
  }
  const Params& params() const { return params_; }

  template <class T>
  const T& as() const {
    return std::get<T>(params_);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(params_);
  }

  /// Throws std::invalid_argument when a parameter is out of range
  /// (k >= 1, eps > 0, min_pts >= 1, bandwidth > 0, max_iter >= 1).
  void validate() const;

  /// e.g. "dbscan(eps=1.5, min_pts=3)".
  std::string display_name() const;

  bool operator==(const HyperparamConfig&) const = default;

 private:
  Params params_;
};

/// Lloyd iterations from a seeded random-point initialization until the
/// assignment reaches a fixpoint or max_iter. An emptied cluster is re-seeded
/// at the point farthest from its assigned centroid, keeping exactly k
/// non-empty clusters. Requires 1 <= k <= n.
Labeling kmeans(const Dataset& ds, int k, std::uint64_t seed, int max_iter = 100);

/// Density-based clustering. A point is core when its eps-neighborhood,
/// itself included, holds at least min_pts points. Clusters are the maximal
/// density-connected sets of core points; a non-core point in range of a core
/// point joins the cluster of its nearest core point, everything else becomes
/// one shared noise cluster. Order-independent up to relabeling.
Labeling dbscan(const Dataset& ds, double eps, int min_pts);

/// Flat-kernel mean shift: each point ascends to the mean of its
/// bandwidth-neighborhood until the step drops below 1e-3 * bandwidth or
/// max_iter. Converged modes closer than the bandwidth are merged and points
/// are labeled by their nearest merged mode.
Labeling mean_shift(const Dataset& ds, double bandwidth, int max_iter = 300);

/// Bottom-up merging on a precomputed dissimilarity matrix until k clusters
/// remain. Ties merge the lexicographically smallest representative pair; a
/// merged cluster is represented by its smallest member index.
Labeling agglomerative(const Eigen::MatrixXd& dist, int k, Linkage linkage);

/// Runs a config on a dataset. A precomputed distance matrix may be passed to
/// avoid recomputing it for agglomerative configs.
Labeling run_config(const Dataset& ds, const HyperparamConfig& config,
                    const Eigen::MatrixXd* dist = nullptr);

}  // namespace clustsel
