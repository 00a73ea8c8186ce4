#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "clustsel/metrics.hpp"
#include "clustsel/search.hpp"

namespace clustsel {

/// Per-configuration criterion values for one ensemble, scored against a
/// consensus clustering. External columns compare to the consensus; internal
/// columns use the data alone.
struct MetricRow {
  MetricValue anmi;            // leave-one-out mean NMI against the rest
  MetricValue nmi_consensus;
  MetricValue ari_consensus;
  MetricValue rand_consensus;
  MetricValue jaccard_consensus;
  MetricValue chi;
  MetricValue di1;
  MetricValue di2;
  MetricValue silhouette;
};

struct MetricReport {
  std::vector<std::string> config_names;
  std::vector<MetricRow> rows;
};

MetricReport compute_metric_report(
    const Dataset& ds, const Eigen::MatrixXd& dist, const Ensemble& ens,
    const Labeling& consensus,
    SilhouetteConvention convention = SilhouetteConvention::kIncludeSelf);

void write_metric_csv(const MetricReport& report, const std::string& path);

/// Aligned text table. A pure eps x min_pts DBSCAN grid renders as one block
/// per min_pts with eps columns and one row per criterion; any other ensemble
/// renders one row per configuration.
std::string format_metric_table(const MetricReport& report,
                                const std::vector<HyperparamConfig>& configs);

/// Internal criteria of the consensus next to the two strategy winners.
std::string format_winner_table(
    const Dataset& ds, const Eigen::MatrixXd& dist, const Labeling& consensus,
    const Labeling* strategy1_winner, const Labeling* strategy2_winner,
    SilhouetteConvention convention = SilhouetteConvention::kIncludeSelf);

}  // namespace clustsel
