#include <doctest.h>

#include <cmath>
#include <random>

#include "clustsel/dataset.hpp"
#include "clustsel/metrics.hpp"
#include "support/oracles.hpp"

using namespace clustsel;

namespace {

std::vector<int> random_labels(std::mt19937& rng, int n, int kmax) {
  std::uniform_int_distribution<int> pick(0, kmax - 1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& v : out) v = pick(rng);
  return out;
}

std::vector<int> random_labels_k(std::mt19937& rng, int n, int k) {
  // exactly k non-empty clusters
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = i;
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (int i = k; i < n; ++i) out[static_cast<std::size_t>(i)] = pick(rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

Dataset random_points(std::mt19937& rng, int n, int d) {
  std::uniform_real_distribution<double> coord(-8, 8);
  Dataset ds;
  ds.points.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ds.points(i, j) = coord(rng);
  return ds;
}

const Labeling kCrossedA(std::vector<int>{0, 0, 1, 1});
const Labeling kCrossedB(std::vector<int>{0, 1, 0, 1});

}  // namespace

TEST_CASE("nmi hand values") {
  const Labeling a(std::vector<int>{0, 1, 1, 2, 0});
  CHECK(nmi(a, a) == 1.0);
  // fully crossed pair: every cell count is 1, all marginals 2, each
  // numerator term log(4*1/4) = 0
  CHECK(nmi(kCrossedA, kCrossedB) == 0.0);
  // single cluster on either side
  const Labeling flat(std::vector<int>{5, 5, 5, 5, 5});
  CHECK(nmi(a, flat) == 0.0);
  CHECK(nmi(flat, flat) == 0.0);
  CHECK_THROWS_AS(nmi(a, Labeling(std::vector<int>{0, 1})), std::invalid_argument);
}

TEST_CASE("nmi matches the brute-force distribution oracle") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    const auto la = random_labels(rng, n, 4);
    const auto lb = random_labels(rng, n, 4);
    const double got = nmi(Labeling(la), Labeling(lb));
    const double want = oracles::bf_nmi(la, lb);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("nmi properties: symmetry, relabel invariance, bounds, identity") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 14)(rng);
    const auto la = random_labels(rng, n, 4);
    const auto lb = random_labels(rng, n, 4);
    const Labeling a(la), b(lb);
    const double v = nmi(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(nmi(b, a) == doctest::Approx(v).epsilon(1e-13));
    // independent relabelings leave the score unchanged
    auto shift = [](const std::vector<int>& l, int offset) {
      std::vector<int> out = l;
      for (int& x : out) x = (x + offset) % 4 + 7;
      return out;
    };
    CHECK(nmi(Labeling(shift(la, 1)), Labeling(shift(lb, 2))) ==
          doctest::Approx(v).epsilon(1e-13));
    if (a.k() >= 2) CHECK(nmi(a, a) == 1.0);
  }
}

TEST_CASE("nmi equals 1 iff the partitions are identical") {
  // exhaustive over all partition pairs of a 5-point set, encoded as label
  // vectors via base-k counting
  const int n = 5;
  std::vector<std::vector<int>> partitions;
  std::vector<int> labels(n, 0);
  // enumerate canonical label vectors: label[i] <= 1 + max(label[0..i-1])
  auto enumerate = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      partitions.push_back(labels);
      return;
    }
    for (int v = 0; v <= used; ++v) {
      labels[static_cast<std::size_t>(i)] = v;
      self(self, i + 1, std::max(used, v + 1));
    }
  };
  enumerate(enumerate, 0, 0);
  CHECK(partitions.size() == 52);  // Bell(5)

  for (const auto& pa : partitions)
    for (const auto& pb : partitions) {
      const Labeling a(pa), b(pb);
      if (a.k() < 2 || b.k() < 2) continue;
      const double v = nmi(a, b);
      if (pa == pb) {
        CHECK(v == 1.0);
      } else {
        CHECK(v < 1.0);  // canonical vectors differ => different partitions
      }
    }
}

TEST_CASE("anmi basics and bounds") {
  const Labeling c(std::vector<int>{0, 0, 1, 1, 2});
  const std::vector<Labeling> copies{c, c, c};
  CHECK(anmi(c, copies) == 1.0);

  const Labeling flat(std::vector<int>{0, 0, 0, 0, 0});
  CHECK(anmi(c, {flat, flat}) == 0.0);

  std::mt19937 rng(8);
  std::vector<Labeling> mixed;
  for (int i = 0; i < 3; ++i) mixed.emplace_back(random_labels(rng, 5, 3));
  double mean = 0.0, lo = 1.0, hi = 0.0;
  for (const auto& m : mixed) {
    const double v = nmi(c, m);
    mean += v / 3.0;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double got = anmi(c, mixed);
  CHECK(got == doctest::Approx(mean).epsilon(1e-13));
  CHECK(got >= lo - 1e-13);
  CHECK(got <= hi + 1e-13);

  CHECK_THROWS_AS(anmi(c, {}), std::invalid_argument);
}

TEST_CASE("rand and jaccard hand values") {
  const Labeling a(std::vector<int>{0, 0, 1, 1});
  CHECK(rand_index(a, a) == 1.0);
  CHECK(*jaccard(a, a) == 1.0);
  // crossed pair: N11=0, N00=2 of 6 pairs
  CHECK(rand_index(kCrossedA, kCrossedB) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(*jaccard(kCrossedA, kCrossedB) == 0.0);
  // all-singleton on both sides leaves Jaccard undefined
  const Labeling singletons(std::vector<int>{0, 1, 2});
  CHECK_FALSE(jaccard(singletons, Labeling(std::vector<int>{2, 1, 0})).has_value());
}

TEST_CASE("rand and jaccard match pair enumeration") {
  std::mt19937 rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 9)(rng);
    const auto la = random_labels(rng, n, 3);
    const auto lb = random_labels(rng, n, 3);
    CHECK(rand_index(Labeling(la), Labeling(lb)) ==
          doctest::Approx(oracles::bf_rand(la, lb)).epsilon(1e-14));
    const auto got = jaccard(Labeling(la), Labeling(lb));
    const auto want = oracles::bf_jaccard(la, lb);
    CHECK(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-14));
  }
}

TEST_CASE("ari hand values") {
  const Labeling a(std::vector<int>{0, 0, 1, 1});
  CHECK(*ari(a, a) == 1.0);
  // crossed pair: all cells 1 => sum of cell binomials 0, marginal sums 2,
  // expected 2*2/6 = 2/3, denominator 2 - 2/3 = 4/3 => -1/2
  CHECK(*ari(kCrossedA, kCrossedB) == doctest::Approx(-0.5).epsilon(1e-15));
  // degenerate denominators
  const Labeling flat(std::vector<int>{0, 0, 0});
  CHECK(*ari(flat, flat) == 1.0);
  const Labeling singles(std::vector<int>{0, 1, 2});
  CHECK(*ari(singles, singles) == 1.0);
  // one side trivial, the other not: the denominator survives and the
  // agreement is exactly at chance level
  CHECK(*ari(flat, singles) == 0.0);
}

TEST_CASE("ari matches a separately coded formula oracle") {
  std::mt19937 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const auto la = random_labels(rng, n, 4);
    const auto lb = random_labels(rng, n, 4);
    const auto got = ari(Labeling(la), Labeling(lb));
    const auto want = oracles::bf_ari(la, lb);
    CHECK(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
    if (got) {
      CHECK(*got <= 1.0 + 1e-12);
      CHECK(*got >= -1.0 - 1e-12);
    }
  }
}

TEST_CASE("ari equals 1 iff the partitions match") {
  std::mt19937 rng(73);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const Labeling a(random_labels(rng, n, 3));
    const Labeling b(random_labels(rng, n, 3));
    const auto v = ari(a, b);
    if (!v) continue;
    if (a.same_partition(b)) {
      CHECK(*v == 1.0);
    } else {
      CHECK(*v < 1.0);
    }
  }
}

TEST_CASE("calinski_harabasz hand instance and edge cases") {
  Dataset ds;
  ds.points.resize(4, 1);
  ds.points << 0, 1, 10, 11;
  const Labeling good(std::vector<int>{0, 0, 1, 1});
  // between = ((5.5-0.5)^2 + (10.5-5.5)^2) / (2-1) = 50
  // within  = (0.5 + 0.5) / (4-2) = 0.5
  CHECK(*calinski_harabasz(ds, good) == doctest::Approx(100.0).epsilon(1e-12));

  CHECK_FALSE(calinski_harabasz(ds, Labeling(std::vector<int>{0, 0, 0, 0})).has_value());
  CHECK_FALSE(calinski_harabasz(ds, Labeling(std::vector<int>{0, 1, 2, 3})).has_value());

  // collapsed clusters: zero within-variance reads as infinite separation
  const LabeledDataset collapsed = synth_blobs({{0, 0}, {5, 5}}, 3, 0.0, 1);
  const auto v = calinski_harabasz(collapsed.data, collapsed.truth);
  REQUIRE(v.has_value());
  CHECK(std::isinf(*v));
}

TEST_CASE("dunn indices on the two-pair instance") {
  Dataset ds;
  ds.points.resize(4, 2);
  ds.points << 0, 0, 0, 1, 10, 0, 10, 1;
  const Eigen::MatrixXd dist = pairwise_distances(ds);
  const Labeling c(std::vector<int>{0, 0, 1, 1});
  CHECK(*dunn_min_max(dist, c) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(*dunn_average(dist, c) == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_FALSE(dunn_min_max(dist, Labeling(std::vector<int>{0, 0, 0, 0})).has_value());
  // all singletons: every diameter is zero
  CHECK_FALSE(dunn_min_max(dist, Labeling(std::vector<int>{0, 1, 2, 3})).has_value());
  CHECK_FALSE(dunn_average(dist, Labeling(std::vector<int>{0, 1, 2, 3})).has_value());
}

TEST_CASE("silhouette limits and conventions") {
  Dataset ds;
  ds.points.resize(4, 2);
  ds.points << 0, 0, 0, 0.1, 50, 0, 50, 0.1;
  const Eigen::MatrixXd dist = pairwise_distances(ds);
  const Labeling c(std::vector<int>{0, 0, 1, 1});
  CHECK(*silhouette(dist, c) > 0.95);
  CHECK_FALSE(silhouette(dist, Labeling(std::vector<int>{0, 0, 0, 0})).has_value());

  // 1D instance {0, 2} vs {1}: the pair's members are on average closer to
  // the singleton than to each other
  Dataset line;
  line.points.resize(3, 1);
  line.points << 0, 2, 1;
  const Eigen::MatrixXd ldist = pairwise_distances(line);
  const Labeling lc(std::vector<int>{0, 0, 1});
  // x=0: a = (0+2)/2 = 1, b = 1 -> 0; x=2 symmetric; x=1 singleton: a=0, b=1 -> 1
  CHECK(*silhouette(ldist, lc) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // classical convention: a averages over |C|-1 and singletons score 0
  // x=0: a = 2, b = 1 -> (1-2)/2 = -0.5; x=2 symmetric; x=1 -> 0
  CHECK(*silhouette(ldist, lc, SilhouetteConvention::kExcludeSelf) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("silhouette matches per-point recomputation") {
  std::mt19937 rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(4, 8)(rng);
    const Dataset ds = random_points(rng, n, 2);
    const auto labels = random_labels_k(rng, n, std::min(3, n - 1));
    const Eigen::MatrixXd dist = pairwise_distances(ds);
    for (bool include_self : {true, false}) {
      const auto got = silhouette(
          dist, Labeling(labels),
          include_self ? SilhouetteConvention::kIncludeSelf
                       : SilhouetteConvention::kExcludeSelf);
      const auto want = oracles::bf_silhouette(ds.points, labels, include_self);
      REQUIRE(got.has_value() == want.has_value());
      if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
    }
  }
}

TEST_CASE("internal indices are invariant under uniform scaling") {
  std::mt19937 rng(505);
  const Dataset ds = random_points(rng, 12, 3);
  const auto labels = random_labels_k(rng, 12, 3);
  const Labeling c(labels);
  Dataset scaled;
  scaled.points = ds.points * 3.75;
  const Eigen::MatrixXd d1 = pairwise_distances(ds);
  const Eigen::MatrixXd d2 = pairwise_distances(scaled);

  CHECK(*calinski_harabasz(scaled, c) ==
        doctest::Approx(*calinski_harabasz(ds, c)).epsilon(1e-10));
  CHECK(*dunn_min_max(d2, c) == doctest::Approx(*dunn_min_max(d1, c)).epsilon(1e-10));
  CHECK(*dunn_average(d2, c) == doctest::Approx(*dunn_average(d1, c)).epsilon(1e-10));
  CHECK(*silhouette(d2, c) == doctest::Approx(*silhouette(d1, c)).epsilon(1e-10));
}

TEST_CASE("undefined metric values render as dashes") {
  CHECK(format_metric_value(std::nullopt) == "--");
  CHECK(format_metric_value(0.3561234567) == "0.356123");
  CHECK(format_metric_value(std::numeric_limits<double>::infinity()) == "inf");
}
