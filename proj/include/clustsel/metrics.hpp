#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "clustsel/dataset.hpp"
#include "clustsel/labeling.hpp"

namespace clustsel {

/// A criterion value, or nullopt when the criterion is undefined for the
/// given clustering (rendered as "--" in reports).
using MetricValue = std::optional<double>;

/// Normalized mutual information in [0, 1]: mutual information of the two
/// label variables divided by the geometric mean of their entropies. Zero
/// when either labeling has a single cluster; exactly 1 for identical
/// partitions. Symmetric and relabel-invariant.
double nmi(const Labeling& a, const Labeling& b);

/// Arithmetic mean of nmi(c, member) over a non-empty ensemble.
double anmi(const Labeling& c, const std::vector<Labeling>& ensemble);

/// (n00 + n11) / (n(n-1)/2). Requires n >= 2.
double rand_index(const Labeling& a, const Labeling& b);

/// n11 / (n11 + n01 + n10); undefined when both labelings are all-singleton.
MetricValue jaccard(const Labeling& a, const Labeling& b);

/// Adjusted Rand index in [-1, 1], chance-corrected over the contingency
/// table. A zero denominator yields 1 for identical partitions and undefined
/// otherwise.
MetricValue ari(const Labeling& a, const Labeling& b);

/// Ratio of between-cluster variance to within-cluster variance; higher is
/// better. Defined for 2 <= k <= n-1; +inf when every cluster is collapsed
/// onto its barycenter.
MetricValue calinski_harabasz(const Dataset& ds, const Labeling& c);

/// Dunn index: minimum inter-cluster distance over maximum cluster diameter.
/// Undefined for k = 1 or when every cluster is a singleton.
MetricValue dunn_min_max(const Eigen::MatrixXd& dist, const Labeling& c);

/// Averaged Dunn variant: mean inter-cluster distance over unordered cluster
/// pairs, divided by the mean cluster diameter.
MetricValue dunn_average(const Eigen::MatrixXd& dist, const Labeling& c);

/// a(x) averages distances over the point's own cluster including x itself
/// (kIncludeSelf) or excluding it (kExcludeSelf, the classical convention,
/// under which singleton clusters score 0 instead of 1).
enum class SilhouetteConvention { kIncludeSelf, kExcludeSelf };

/// Mean of (b(x) - a(x)) / max(a(x), b(x)) over all points; in [-1, 1].
/// Undefined for k = 1.
MetricValue silhouette(const Eigen::MatrixXd& dist, const Labeling& c,
                       SilhouetteConvention convention = SilhouetteConvention::kIncludeSelf);

/// "--" for undefined values, otherwise %.6g.
std::string format_metric_value(const MetricValue& v);

}  // namespace clustsel
