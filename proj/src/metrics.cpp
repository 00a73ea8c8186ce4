#include "clustsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace clustsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double nmi(const Labeling& a, const Labeling& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("nmi: labelings must have equal length");
  if (a.k() < 2 || b.k() < 2) return 0.0;  // single-cluster entropy is zero
  if (a.same_partition(b)) return 1.0;

  const ContingencyTable t = contingency(a, b);
  const double n = static_cast<double>(t.total);
  double info = 0.0;
  for (int s = 0; s < t.rows; ++s) {
    const double ns = static_cast<double>(t.row_marginals[static_cast<std::size_t>(s)]);
    for (int u = 0; u < t.cols; ++u) {
      const auto c = static_cast<double>(t.at(s, u));
      if (c <= 0.0) continue;
      const double nu = static_cast<double>(t.col_marginals[static_cast<std::size_t>(u)]);
      info += (c / n) * std::log(n * c / (ns * nu));
    }
  }
  double ha = 0.0, hb = 0.0;
  for (std::int64_t c : t.row_marginals) ha -= (c / n) * std::log(c / n);
  for (std::int64_t c : t.col_marginals) hb -= (c / n) * std::log(c / n);
  const double v = info / std::sqrt(ha * hb);
  return std::clamp(v, 0.0, 1.0);
}

double anmi(const Labeling& c, const std::vector<Labeling>& ensemble) {
  if (ensemble.empty())
    throw std::invalid_argument("anmi: ensemble must be non-empty");
  double sum = 0.0;
  for (const auto& member : ensemble) sum += nmi(c, member);
  return sum / static_cast<double>(ensemble.size());
}

double rand_index(const Labeling& a, const Labeling& b) {
  const PairCounts pc = pair_counts(a, b);
  const double total = static_cast<double>(pc.n11 + pc.n00 + pc.n10 + pc.n01);
  return (static_cast<double>(pc.n00) + static_cast<double>(pc.n11)) / total;
}

MetricValue jaccard(const Labeling& a, const Labeling& b) {
  const PairCounts pc = pair_counts(a, b);
  const std::int64_t denom = pc.n11 + pc.n01 + pc.n10;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(pc.n11) / static_cast<double>(denom);
}

MetricValue ari(const Labeling& a, const Labeling& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("ari: labelings must have equal length");
  if (a.n() < 2) throw std::invalid_argument("ari: need at least 2 points");
  const ContingencyTable t = contingency(a, b);

  double sum_cells = 0.0;
  for (std::int64_t c : t.counts) sum_cells += comb2(static_cast<double>(c));
  double sum_rows = 0.0;
  for (std::int64_t c : t.row_marginals) sum_rows += comb2(static_cast<double>(c));
  double sum_cols = 0.0;
  for (std::int64_t c : t.col_marginals) sum_cols += comb2(static_cast<double>(c));
  const double total_pairs = comb2(static_cast<double>(t.total));

  const double expected = sum_rows * sum_cols / total_pairs;
  const double denom = 0.5 * (sum_rows + sum_cols) - expected;
  if (denom == 0.0) {
    // Both partitions trivial in the same way: a perfect match when they are
    // actually identical, undefined otherwise.
    if (a.same_partition(b)) return 1.0;
    return std::nullopt;
  }
  return (sum_cells - expected) / denom;
}

MetricValue calinski_harabasz(const Dataset& ds, const Labeling& c) {
  ds.validate();
  if (c.n() != static_cast<int>(ds.n()))
    throw std::invalid_argument("calinski_harabasz: labeling does not match dataset");
  const int k = c.k();
  const auto n = static_cast<int>(ds.n());
  if (k < 2 || k > n - 1) return std::nullopt;

  const auto members = c.clusters();
  const Eigen::RowVectorXd global = ds.points.colwise().mean();
  double between = 0.0;
  double within = 0.0;
  for (const auto& cluster : members) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(ds.d());
    for (int i : cluster) mu += ds.points.row(i);
    mu /= static_cast<double>(cluster.size());
    between += (mu - global).squaredNorm();
    for (int i : cluster) within += (ds.points.row(i) - mu).squaredNorm();
  }
  between /= static_cast<double>(k - 1);
  within /= static_cast<double>(n - k);
  if (within == 0.0) {
    if (between > 0.0) return kInf;  // collapsed clusters: infinite separation
    return std::nullopt;
  }
  return between / within;
}

namespace {

struct DunnParts {
  // min pairwise distance per unordered cluster pair, max diameter per cluster
  std::vector<double> pair_min;
  std::vector<double> diameters;
};

DunnParts dunn_parts(const Eigen::MatrixXd& dist, const Labeling& c) {
  const auto members = c.clusters();
  const std::size_t k = members.size();
  DunnParts parts;
  parts.diameters.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t a = 0; a < members[i].size(); ++a)
      for (std::size_t b = a + 1; b < members[i].size(); ++b)
        parts.diameters[i] =
            std::max(parts.diameters[i], dist(members[i][a], members[i][b]));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      double lo = kInf;
      for (int x : members[i])
        for (int y : members[j]) lo = std::min(lo, dist(x, y));
      parts.pair_min.push_back(lo);
    }
  return parts;
}

void check_dist_labeling(const Eigen::MatrixXd& dist, const Labeling& c,
                         const char* what) {
  if (dist.rows() != dist.cols() || dist.rows() != c.n())
    throw std::invalid_argument(std::string(what) +
                                ": distance matrix does not match labeling");
}

}  // namespace

MetricValue dunn_min_max(const Eigen::MatrixXd& dist, const Labeling& c) {
  check_dist_labeling(dist, c, "dunn_min_max");
  if (c.k() < 2) return std::nullopt;
  const DunnParts parts = dunn_parts(dist, c);
  const double max_diam =
      *std::max_element(parts.diameters.begin(), parts.diameters.end());
  if (max_diam == 0.0) return std::nullopt;
  const double min_sep =
      *std::min_element(parts.pair_min.begin(), parts.pair_min.end());
  return min_sep / max_diam;
}

MetricValue dunn_average(const Eigen::MatrixXd& dist, const Labeling& c) {
  check_dist_labeling(dist, c, "dunn_average");
  const int k = c.k();
  if (k < 2) return std::nullopt;
  const DunnParts parts = dunn_parts(dist, c);
  double sep = 0.0;
  for (double v : parts.pair_min) sep += v;
  sep /= static_cast<double>(parts.pair_min.size());
  double diam = 0.0;
  for (double v : parts.diameters) diam += v;
  diam /= static_cast<double>(k);
  if (diam == 0.0) return std::nullopt;
  return sep / diam;
}

MetricValue silhouette(const Eigen::MatrixXd& dist, const Labeling& c,
                       SilhouetteConvention convention) {
  check_dist_labeling(dist, c, "silhouette");
  const int k = c.k();
  if (k < 2) return std::nullopt;

  const auto canon = c.canonical_labels();
  const auto members = c.clusters();
  const auto n = static_cast<int>(canon.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int own = canon[static_cast<std::size_t>(i)];
    const auto own_size = static_cast<double>(members[static_cast<std::size_t>(own)].size());

    double a = 0.0;
    if (convention == SilhouetteConvention::kExcludeSelf && own_size == 1.0) {
      total += 0.0;  // classical convention scores singletons 0
      continue;
    }
    double own_sum = 0.0;
    for (int y : members[static_cast<std::size_t>(own)]) own_sum += dist(i, y);
    a = convention == SilhouetteConvention::kIncludeSelf
            ? own_sum / own_size
            : own_sum / (own_size - 1.0);

    double b = kInf;
    for (int g = 0; g < k; ++g) {
      if (g == own) continue;
      double sum = 0.0;
      for (int y : members[static_cast<std::size_t>(g)]) sum += dist(i, y);
      b = std::min(b, sum / static_cast<double>(members[static_cast<std::size_t>(g)].size()));
    }
    const double denom = std::max(a, b);
    total += denom == 0.0 ? 0.0 : (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

std::string format_metric_value(const MetricValue& v) {
  if (!v) return "--";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace clustsel
