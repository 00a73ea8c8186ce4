#include "clustsel/algorithms.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "clustsel/random.hpp"
#include "clustsel/threading.hpp"

namespace clustsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::kSingle;
  if (name == "average") return Linkage::kAverage;
  if (name == "complete") return Linkage::kComplete;
  throw std::invalid_argument("unknown linkage: '" + name +
                              "' (expected single, average or complete)");
}

const char* to_string(Linkage l) {
  switch (l) {
    case Linkage::kSingle: return "single";
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
  }
  return "?";
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMeans: return "kmeans";
    case Algorithm::kDbscan: return "dbscan";
    case Algorithm::kMeanShift: return "meanshift";
    case Algorithm::kAgglomerative: return "agglomerative";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "kmeans") return Algorithm::kMeans;
  if (name == "dbscan") return Algorithm::kDbscan;
  if (name == "meanshift") return Algorithm::kMeanShift;
  if (name == "agglomerative") return Algorithm::kAgglomerative;
  throw std::invalid_argument("unknown algorithm: '" + name + "'");
}

void HyperparamConfig::validate() const {
  if (is<KMeansParams>()) {
    const auto& p = as<KMeansParams>();
    if (p.k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (p.max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");
  } else if (is<DbscanParams>()) {
    const auto& p = as<DbscanParams>();
    if (!(p.eps > 0)) throw std::invalid_argument("dbscan: eps must be > 0");
    if (p.min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  } else if (is<MeanShiftParams>()) {
    const auto& p = as<MeanShiftParams>();
    if (!(p.bandwidth > 0))
      throw std::invalid_argument("meanshift: bandwidth must be > 0");
    if (p.max_iter < 1)
      throw std::invalid_argument("meanshift: max_iter must be >= 1");
  } else {
    const auto& p = as<AgglomerativeParams>();
    if (p.k < 1) throw std::invalid_argument("agglomerative: k must be >= 1");
  }
}

std::string HyperparamConfig::display_name() const {
  switch (algorithm()) {
    case Algorithm::kMeans: {
      const auto& p = as<KMeansParams>();
      return "kmeans(k=" + std::to_string(p.k) +
             ", seed=" + std::to_string(p.seed) + ")";
    }
    case Algorithm::kDbscan: {
      const auto& p = as<DbscanParams>();
      return "dbscan(eps=" + format_double(p.eps) +
             ", min_pts=" + std::to_string(p.min_pts) + ")";
    }
    case Algorithm::kMeanShift: {
      const auto& p = as<MeanShiftParams>();
      return "meanshift(bandwidth=" + format_double(p.bandwidth) + ")";
    }
    case Algorithm::kAgglomerative: {
      const auto& p = as<AgglomerativeParams>();
      return "agglomerative(k=" + std::to_string(p.k) +
             ", linkage=" + to_string(p.linkage) + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// k-Means
// ---------------------------------------------------------------------------

#ifndef NDEBUG
namespace {

double kmeans_objective(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centroids,
                        const std::vector<int>& assign) {
  double obj = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    obj += (pts.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
               .squaredNorm();
  return obj;
}

}  // namespace
#endif

Labeling kmeans(const Dataset& ds, int k, std::uint64_t seed, int max_iter) {
  ds.validate();
  const auto n = static_cast<int>(ds.n());
  if (k < 1 || k > n)
    throw std::invalid_argument("kmeans: k must be in [1, n]");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  const Eigen::MatrixXd& pts = ds.points;
  Rng rng(seed);
  Eigen::MatrixXd centroids(k, ds.d());
  {
    const auto init = rng.sample_indices(n, k);
    for (int c = 0; c < k; ++c) centroids.row(c) = pts.row(init[static_cast<std::size_t>(c)]);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  auto assign_step = [&]() {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (pts.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (pts.row(i) - centroids.row(c)).squaredNorm();
        if (d2 < best_d) {
          best_d = d2;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }
  };

  // Re-seed each empty cluster at the point farthest from its own centroid;
  // distinct points are chosen when several clusters are empty at once.
  auto repair_empties = [&]() {
    for (int attempt = 0; attempt < k; ++attempt) {
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (int v : assign) ++counts[static_cast<std::size_t>(v)];
      std::vector<int> empties;
      for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] == 0) empties.push_back(c);
      if (empties.empty()) return;

      std::vector<char> taken(static_cast<std::size_t>(n), 0);
      for (int e : empties) {
        int far = -1;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          if (taken[static_cast<std::size_t>(i)]) continue;
          const double d2 =
              (pts.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
                  .squaredNorm();
          if (d2 > far_d) {
            far_d = d2;
            far = i;
          }
        }
        if (far < 0) break;
        taken[static_cast<std::size_t>(far)] = 1;
        centroids.row(e) = pts.row(far);
      }
      assign_step();
    }
  };

  std::vector<int> prev;
#ifndef NDEBUG
  double prev_obj = kInf;
#endif
  for (int iter = 0; iter < max_iter; ++iter) {
    assign_step();
    repair_empties();
#ifndef NDEBUG
    const double obj = kmeans_objective(pts, centroids, assign);
    assert(obj <= prev_obj + 1e-9 * (1.0 + prev_obj));
    prev_obj = obj;
#endif
    if (assign == prev) break;
    prev = assign;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, ds.d());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += pts.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
  }
  return Labeling(std::move(assign));
}

// ---------------------------------------------------------------------------
// DBSCAN
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the smaller index as root
    parent[static_cast<std::size_t>(b)] = a;
  }
};

}  // namespace

Labeling dbscan(const Dataset& ds, double eps, int min_pts) {
  ds.validate();
  if (!(eps > 0)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");

  const auto n = static_cast<int>(ds.n());
  const Eigen::MatrixXd& pts = ds.points;
  const double eps2 = eps * eps;

  // eps-neighborhoods, the query point included.
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
  threading::parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t begin,
                                                              std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& list = nbrs[i];
      for (int j = 0; j < n; ++j) {
        const double d2 =
            (pts.row(static_cast<Eigen::Index>(i)) - pts.row(j)).squaredNorm();
        if (d2 <= eps2) list.push_back(j);
      }
    }
  });

  std::vector<char> core(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    core[static_cast<std::size_t>(i)] =
        nbrs[static_cast<std::size_t>(i)].size() >= static_cast<std::size_t>(min_pts);

  // Clusters are connected components of core points under eps-reachability.
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    for (int j : nbrs[static_cast<std::size_t>(i)])
      if (j > i && core[static_cast<std::size_t>(j)]) uf.unite(i, j);
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int next_label = 0;
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    const int r = uf.find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0)
      root_label[static_cast<std::size_t>(r)] = next_label++;
    labels[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }

  // Border points join the cluster of their nearest core neighbor. Nearest
  // rather than first-reached keeps the result independent of row order.
  for (int i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) continue;
    int best = -1;
    double best_d = kInf;
    for (int j : nbrs[static_cast<std::size_t>(i)]) {
      if (!core[static_cast<std::size_t>(j)]) continue;
      const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
      if (d2 < best_d) {
        best_d = d2;
        best = j;
      }
    }
    if (best >= 0) labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(best)];
  }

  // Remaining points form one shared noise cluster.
  const int noise_label = next_label;
  for (int& v : labels)
    if (v < 0) v = noise_label;
  return Labeling(std::move(labels));
}

// ---------------------------------------------------------------------------
// Mean shift
// ---------------------------------------------------------------------------

Labeling mean_shift(const Dataset& ds, double bandwidth, int max_iter) {
  ds.validate();
  if (!(bandwidth > 0))
    throw std::invalid_argument("meanshift: bandwidth must be > 0");
  if (max_iter < 1) throw std::invalid_argument("meanshift: max_iter must be >= 1");

  const auto n = static_cast<int>(ds.n());
  const Eigen::MatrixXd& pts = ds.points;
  const double bw2 = bandwidth * bandwidth;
  const double tol2 = 1e-6 * bw2;  // (1e-3 * bandwidth)^2

  Eigen::MatrixXd modes(n, ds.d());
  threading::parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t begin,
                                                              std::size_t end) {
    Eigen::RowVectorXd y(ds.d());
    Eigen::RowVectorXd mean(ds.d());
    for (std::size_t i = begin; i < end; ++i) {
      y = pts.row(static_cast<Eigen::Index>(i));
      for (int iter = 0; iter < max_iter; ++iter) {
        mean.setZero();
        int count = 0;
        for (int j = 0; j < n; ++j) {
          if ((pts.row(j) - y).squaredNorm() <= bw2) {
            mean += pts.row(j);
            ++count;
          }
        }
        // The window mean stays within the bandwidth of at least one sample,
        // so count >= 1 except for rounding exactly at the boundary.
        if (count == 0) break;
        mean /= count;
        const double shift2 = (mean - y).squaredNorm();
        y = mean;
        if (shift2 < tol2) break;
      }
      modes.row(static_cast<Eigen::Index>(i)) = y;
    }
  });

  // Group modes closer than the bandwidth; the first member of a group is its
  // anchor, the group center is the mean of its members.
  std::vector<int> group(static_cast<std::size_t>(n), -1);
  std::vector<int> anchors;
  for (int i = 0; i < n; ++i) {
    int g = -1;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      if ((modes.row(i) - modes.row(anchors[a])).norm() < bandwidth) {
        g = static_cast<int>(a);
        break;
      }
    }
    if (g < 0) {
      g = static_cast<int>(anchors.size());
      anchors.push_back(i);
    }
    group[static_cast<std::size_t>(i)] = g;
  }

  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(anchors.size()), ds.d());
  std::vector<int> counts(anchors.size(), 0);
  for (int i = 0; i < n; ++i) {
    centers.row(group[static_cast<std::size_t>(i)]) += modes.row(i);
    ++counts[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])];
  }
  for (std::size_t g = 0; g < anchors.size(); ++g)
    centers.row(static_cast<Eigen::Index>(g)) /= counts[g];

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (pts.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d2 = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d2 < best_d) {
        best_d = d2;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return Labeling(std::move(labels));
}

// ---------------------------------------------------------------------------
// Agglomerative hierarchical clustering (Lance-Williams updates)
// ---------------------------------------------------------------------------

Labeling agglomerative(const Eigen::MatrixXd& dist, int k, Linkage linkage) {
  const auto n = static_cast<int>(dist.rows());
  if (dist.rows() != dist.cols())
    throw std::invalid_argument("agglomerative: distance matrix must be square");
  if (n < 1) throw std::invalid_argument("agglomerative: empty distance matrix");
  if (k < 1 || k > n)
    throw std::invalid_argument("agglomerative: k must be in [1, n]");

  Eigen::MatrixXd d = dist;  // working copy; row a holds cluster-a distances
  std::vector<int> size(static_cast<std::size_t>(n), 1);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<int> nn(static_cast<std::size_t>(n), -1);
  std::vector<double> nn_dist(static_cast<std::size_t>(n), kInf);
  UnionFind uf(n);

  // nn[i] is the smallest-index nearest active partner of cluster i.
  auto recompute_nn = [&](int i) {
    int best = -1;
    double best_d = kInf;
    for (int j = 0; j < n; ++j) {
      if (j == i || !active[static_cast<std::size_t>(j)]) continue;
      const double v = d(i, j);
      if (v < best_d) {
        best_d = v;
        best = j;
      }
    }
    nn[static_cast<std::size_t>(i)] = best;
    nn_dist[static_cast<std::size_t>(i)] = best_d;
  };
  for (int i = 0; i < n; ++i) recompute_nn(i);

  int clusters = n;
  while (clusters > k) {
    int a = -1;
    double best = kInf;
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)] || nn[static_cast<std::size_t>(i)] < 0)
        continue;
      if (nn_dist[static_cast<std::size_t>(i)] < best) {
        best = nn_dist[static_cast<std::size_t>(i)];
        a = i;
      }
    }
    int b = nn[static_cast<std::size_t>(a)];
    if (b < a) std::swap(a, b);  // merged cluster keeps the smaller index

    const int sa = size[static_cast<std::size_t>(a)];
    const int sb = size[static_cast<std::size_t>(b)];
    for (int j = 0; j < n; ++j) {
      if (!active[static_cast<std::size_t>(j)] || j == a || j == b) continue;
      const double daj = d(a, j);
      const double dbj = d(b, j);
      double v = 0.0;
      switch (linkage) {
        case Linkage::kSingle: v = std::min(daj, dbj); break;
        case Linkage::kComplete: v = std::max(daj, dbj); break;
        case Linkage::kAverage: v = (sa * daj + sb * dbj) / double(sa + sb); break;
      }
      d(a, j) = d(j, a) = v;
    }
    active[static_cast<std::size_t>(b)] = 0;
    size[static_cast<std::size_t>(a)] = sa + sb;
    uf.unite(a, b);
    --clusters;

    recompute_nn(a);
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)] || i == a) continue;
      const int cur = nn[static_cast<std::size_t>(i)];
      if (cur == a || cur == b) {
        recompute_nn(i);
      } else {
        // The merged distance can never undercut the current nearest partner
        // for single/average/complete, so only an equal-distance,
        // smaller-index tie needs fixing.
        const double via = d(i, a);
        if (via < nn_dist[static_cast<std::size_t>(i)] ||
            (via == nn_dist[static_cast<std::size_t>(i)] && a < cur)) {
          nn[static_cast<std::size_t>(i)] = a;
          nn_dist[static_cast<std::size_t>(i)] = via;
        }
      }
    }
  }

  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0)
      root_label[static_cast<std::size_t>(r)] = next++;
    labels[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }
  return Labeling(std::move(labels));
}

Labeling run_config(const Dataset& ds, const HyperparamConfig& config,
                    const Eigen::MatrixXd* dist) {
  config.validate();
  switch (config.algorithm()) {
    case Algorithm::kMeans: {
      const auto& p = config.as<KMeansParams>();
      return kmeans(ds, p.k, p.seed, p.max_iter);
    }
    case Algorithm::kDbscan: {
      const auto& p = config.as<DbscanParams>();
      return dbscan(ds, p.eps, p.min_pts);
    }
    case Algorithm::kMeanShift: {
      const auto& p = config.as<MeanShiftParams>();
      return mean_shift(ds, p.bandwidth, p.max_iter);
    }
    case Algorithm::kAgglomerative: {
      const auto& p = config.as<AgglomerativeParams>();
      if (dist) return agglomerative(*dist, p.k, p.linkage);
      return agglomerative(pairwise_distances(ds), p.k, p.linkage);
    }
  }
  throw std::logic_error("run_config: unreachable");
}

}  // namespace clustsel
