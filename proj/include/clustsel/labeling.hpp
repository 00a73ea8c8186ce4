#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace clustsel {

/// A hard clustering of n points: one non-negative cluster index per point.
/// Indices need not be contiguous; every comparison in the library is
/// invariant under relabeling.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::vector<int> labels);

  int n() const { return static_cast<int>(labels_.size()); }
  /// Number of distinct labels (>= 1 for a non-empty labeling).
  int k() const { return k_; }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }

  /// Labels remapped to 0..k-1 in order of first appearance.
  std::vector<int> canonical_labels() const;
  Labeling canonical() const { return Labeling(canonical_labels()); }

  /// True when both labelings describe the same partition.
  bool same_partition(const Labeling& other) const;

  /// Member indices per cluster, clusters in canonical order.
  std::vector<std::vector<int>> clusters() const;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// Overlap counts between two labelings: counts[s][t] is the number of points
/// in cluster s of `a` and cluster t of `b`, with clusters in canonical order.
struct ContingencyTable {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> counts;  // row-major, rows x cols
  std::vector<std::int64_t> row_marginals;
  std::vector<std::int64_t> col_marginals;
  std::int64_t total = 0;

  std::int64_t at(int s, int t) const {
    return counts[static_cast<std::size_t>(s) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(t)];
  }
};

ContingencyTable contingency(const Labeling& a, const Labeling& b);

/// Pair agreement counts over all n(n-1)/2 point pairs: n11 same cluster in
/// both, n00 different in both, n10 same only in a, n01 same only in b.
struct PairCounts {
  std::int64_t n11 = 0;
  std::int64_t n00 = 0;
  std::int64_t n10 = 0;
  std::int64_t n01 = 0;
};

/// Requires n >= 2.
PairCounts pair_counts(const Labeling& a, const Labeling& b);

/// Writes the canonical form, one integer per line.
void write_labels(const Labeling& l, const std::string& path);

/// Accepts one integer per line or a single comma-separated row.
Labeling read_labels(const std::string& path);

}  // namespace clustsel
