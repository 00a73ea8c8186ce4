#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "clustsel/errors.hpp"
#include "clustsel/labeling.hpp"
#include "support/oracles.hpp"

using namespace clustsel;

namespace {

std::vector<int> random_labels(std::mt19937& rng, int n, int kmax) {
  std::uniform_int_distribution<int> pick(0, kmax - 1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& v : out) v = pick(rng);
  return out;
}

// relabel under a value permutation
std::vector<int> permute_values(const std::vector<int>& labels, int shift, int kmax) {
  std::vector<int> out = labels;
  for (int& v : out) v = (v + shift) % kmax + 100;
  return out;
}

}  // namespace

TEST_CASE("contingency on hand instances") {
  const Labeling a(std::vector<int>{0, 0, 1, 1});
  SUBCASE("identical labelings give a diagonal table") {
    const ContingencyTable t = contingency(a, a);
    CHECK(t.rows == 2);
    CHECK(t.cols == 2);
    CHECK(t.at(0, 0) == 2);
    CHECK(t.at(1, 1) == 2);
    CHECK(t.at(0, 1) == 0);
    CHECK(t.total == 4);
  }
  SUBCASE("fully crossed labelings give all-ones") {
    const Labeling b(std::vector<int>{0, 1, 0, 1});
    const ContingencyTable t = contingency(a, b);
    for (int s = 0; s < 2; ++s)
      for (int u = 0; u < 2; ++u) CHECK(t.at(s, u) == 1);
    CHECK(t.row_marginals == std::vector<std::int64_t>{2, 2});
    CHECK(t.col_marginals == std::vector<std::int64_t>{2, 2});
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(contingency(a, Labeling(std::vector<int>{0, 1})),
                    std::invalid_argument);
  }
}

TEST_CASE("contingency matches an independent per-point tally") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto la = random_labels(rng, 10, 4);
    const auto lb = random_labels(rng, 10, 3);
    const ContingencyTable t = contingency(Labeling(la), Labeling(lb));
    const auto joint = oracles::joint_counts(la, lb);
    std::int64_t sum = 0;
    for (int s = 0; s < t.rows; ++s)
      for (int u = 0; u < t.cols; ++u) sum += t.at(s, u);
    CHECK(sum == 10);
    // the multiset of non-zero cells must match the brute-force tally
    std::vector<std::int64_t> ours, theirs;
    for (int s = 0; s < t.rows; ++s)
      for (int u = 0; u < t.cols; ++u)
        if (t.at(s, u) > 0) ours.push_back(t.at(s, u));
    for (const auto& [key, c] : joint) theirs.push_back(c);
    std::sort(ours.begin(), ours.end());
    std::sort(theirs.begin(), theirs.end());
    CHECK(ours == theirs);
    // marginals are row/column sums
    for (int s = 0; s < t.rows; ++s) {
      std::int64_t row = 0;
      for (int u = 0; u < t.cols; ++u) row += t.at(s, u);
      CHECK(row == t.row_marginals[static_cast<std::size_t>(s)]);
    }
  }
}

TEST_CASE("pair_counts on hand instances") {
  SUBCASE("identical 2+2 labeling") {
    const Labeling a(std::vector<int>{0, 0, 1, 1});
    const PairCounts pc = pair_counts(a, a);
    CHECK(pc.n11 == 2);
    CHECK(pc.n00 == 4);
    CHECK(pc.n10 == 0);
    CHECK(pc.n01 == 0);
  }
  SUBCASE("two single-cluster labelings") {
    const Labeling a(std::vector<int>{7, 7, 7});
    const PairCounts pc = pair_counts(a, a);
    CHECK(pc.n11 == 3);
    CHECK(pc.n00 + pc.n10 + pc.n01 == 0);
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(pair_counts(Labeling(std::vector<int>{0}),
                                Labeling(std::vector<int>{0})),
                    std::invalid_argument);
  }
}

TEST_CASE("pair_counts matches O(n^2) enumeration and sums to n(n-1)/2") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto la = random_labels(rng, 8, 4);
    const auto lb = random_labels(rng, 8, 4);
    const PairCounts pc = pair_counts(Labeling(la), Labeling(lb));
    const oracles::BfPairs bf = oracles::bf_pairs(la, lb);
    CHECK(pc.n11 == bf.n11);
    CHECK(pc.n00 == bf.n00);
    CHECK(pc.n10 == bf.n10);
    CHECK(pc.n01 == bf.n01);
    CHECK(pc.n11 + pc.n00 + pc.n10 + pc.n01 == 8 * 7 / 2);
  }
}

TEST_CASE("pair_counts is invariant under relabeling; self pairs agree") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto la = random_labels(rng, 9, 3);
    const auto lb = random_labels(rng, 9, 4);
    const PairCounts base = pair_counts(Labeling(la), Labeling(lb));
    const PairCounts perm =
        pair_counts(Labeling(permute_values(la, 1, 3)),
                    Labeling(permute_values(lb, 2, 4)));
    CHECK(base.n11 == perm.n11);
    CHECK(base.n00 == perm.n00);
    CHECK(base.n10 == perm.n10);
    CHECK(base.n01 == perm.n01);

    const PairCounts self = pair_counts(Labeling(la), Labeling(la));
    CHECK(self.n10 == 0);
    CHECK(self.n01 == 0);
  }
}

TEST_CASE("contingency is permutation-equivalent under relabeling") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto la = random_labels(rng, 12, 3);
    const auto lb = random_labels(rng, 12, 4);
    const ContingencyTable t1 = contingency(Labeling(la), Labeling(lb));
    const ContingencyTable t2 = contingency(Labeling(permute_values(la, 2, 3)),
                                            Labeling(permute_values(lb, 3, 4)));
    CHECK(t1.rows == t2.rows);
    CHECK(t1.cols == t2.cols);
    auto sorted = [](std::vector<std::int64_t> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(sorted(t1.counts) == sorted(t2.counts));
    CHECK(sorted(t1.row_marginals) == sorted(t2.row_marginals));
    CHECK(sorted(t1.col_marginals) == sorted(t2.col_marginals));
  }
}

TEST_CASE("canonical form") {
  const Labeling a(std::vector<int>{3, 3, 1, 1, 1, 2});
  CHECK(a.canonical_labels() == std::vector<int>{0, 0, 1, 1, 1, 2});
  CHECK(a.same_partition(Labeling(std::vector<int>{1, 1, 2, 2, 2, 3})));

  const Labeling b(std::vector<int>{0, 1, 2});
  CHECK(b.canonical_labels() == std::vector<int>{0, 1, 2});

  // idempotence
  const Labeling c = a.canonical();
  CHECK(c.canonical_labels() == c.labels());
  CHECK(a.k() == 3);
}

TEST_CASE("label files round trip in canonical form") {
  namespace fs = std::filesystem;
  const Labeling l(std::vector<int>{9, 9, 4, 4, 2});
  const auto path = fs::temp_directory_path() / "clustsel_labels.txt";
  write_labels(l, path.string());
  const Labeling back = read_labels(path.string());
  CHECK(back.labels() == l.canonical_labels());
  fs::remove(path);
}

TEST_CASE("read_labels accepts a single comma-separated row") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "clustsel_labels_row.txt";
  {
    std::ofstream out(path);
    out << "0, 0, 1, 1, 2\n";
  }
  const Labeling back = read_labels(path.string());
  CHECK(back.labels() == std::vector<int>{0, 0, 1, 1, 2});
  fs::remove(path);

  {
    std::ofstream out(path);
    out << "0\nx\n";
  }
  CHECK_THROWS_AS(read_labels(path.string()), clustsel::format_error);
  fs::remove(path);
}
