#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "clustsel/errors.hpp"
#include "clustsel/metrics.hpp"
#include "clustsel/search.hpp"
#include "support/oracles.hpp"

using namespace clustsel;

namespace {

Ensemble ensemble_of(std::vector<Labeling> ls) {
  Ensemble ens;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    KMeansParams p;
    p.k = 2;
    p.seed = i;
    ens.entries.push_back({HyperparamConfig(p), std::move(ls[i])});
  }
  return ens;
}

std::vector<int> random_labels(std::mt19937& rng, int n, int kmax) {
  std::uniform_int_distribution<int> pick(0, kmax - 1);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& v : out) v = pick(rng);
  return out;
}

}  // namespace

TEST_CASE("grid expansion is the per-algorithm cartesian product") {
  const json spec = json::parse(R"({
    "kmeans": {"k": [2, 3], "seed": [1, 2]},
    "dbscan": {"eps": [0.5, 1.0, 1.5], "min_pts": [2, 3]},
    "meanshift": {"bandwidth": 2.0},
    "agglomerative": {"k": 4, "linkage": ["single", "complete"]}
  })");
  const Grid grid = Grid::from_json(spec);
  CHECK(grid.size() == 4 + 6 + 1 + 2);
  // fixed algorithm order, first parameter outermost
  CHECK(grid.configs[0].display_name() == "kmeans(k=2, seed=1)");
  CHECK(grid.configs[1].display_name() == "kmeans(k=2, seed=2)");
  CHECK(grid.configs[4].display_name() == "dbscan(eps=0.5, min_pts=2)");
  CHECK(grid.configs.back().display_name() ==
        "agglomerative(k=4, linkage=complete)");
}

TEST_CASE("grid validation failures") {
  CHECK_THROWS_WITH_AS(
      Grid::from_json(json::parse(R"({"dbscan": {"eps": [1.0, 1.0], "min_pts": 2}})")),
      doctest::Contains("duplicate"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::from_json(json::parse(R"({"svm": {"c": 1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(Grid::from_json(json::parse(R"({"kmeans": {"clusters": [2]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(Grid::from_json(json::parse(R"({"kmeans": {"k": [0]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(Grid::from_json(json::parse(R"({"dbscan": {"eps": [1.0]}})")),
                  std::invalid_argument);
}

TEST_CASE("a full 5x6 dbscan product grid expands to 30 configs") {
  const Grid grid = Grid::from_json(json::parse(R"({
    "dbscan": {"eps": [0.5, 0.8, 1.2, 2.0, 3.5], "min_pts": [2, 4, 6, 9, 12, 16]}
  })"));
  CHECK(grid.size() == 30);
}

TEST_CASE("Grid::load reports missing and malformed files") {
  namespace fs = std::filesystem;
  CHECK_THROWS_AS(Grid::load("/nonexistent/grid.json"), io_error);
  const fs::path bad = fs::temp_directory_path() / "clustsel_bad_grid.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(Grid::load(bad.string()), format_error);
  fs::remove(bad);
}

TEST_CASE("config json round trip") {
  const json spec = json::parse(
      R"({"kmeans": {"k": [3], "seed": 9}, "dbscan": {"eps": 1.5, "min_pts": 4}})");
  const Grid grid = Grid::from_json(spec);
  for (const auto& c : grid.configs) {
    const HyperparamConfig back = config_from_json(config_to_json(c));
    CHECK(back == c);
  }
}

TEST_CASE("build_ensemble runs every config and keeps grid order") {
  const LabeledDataset lds = synth_blobs({{0, 0}, {10, 10}}, 6, 0.1, 4);
  const Grid grid = Grid::from_json(
      json::parse(R"({"kmeans": {"k": [2, 3], "seed": 1}})"));
  const Ensemble ens = build_ensemble(lds.data, grid);
  CHECK(ens.size() == 2);
  CHECK(ens.entries[0].config.as<KMeansParams>().k == 2);
  CHECK(ens.entries[1].config.as<KMeansParams>().k == 3);
  CHECK(ens.dataset_fingerprint == lds.data.fingerprint());
  CHECK(ens.warnings.empty());
}

TEST_CASE("build_ensemble drops failing configs with a warning") {
  const LabeledDataset lds = synth_blobs({{0, 0}, {5, 5}}, 3, 0.1, 4);  // n = 6
  const Grid grid = Grid::from_json(
      json::parse(R"({"kmeans": {"k": [2, 50], "seed": 1}})"));  // k=50 > n
  const Ensemble ens = build_ensemble(lds.data, grid);
  CHECK(ens.size() == 1);
  REQUIRE(ens.warnings.size() == 1);
  CHECK(ens.warnings[0].find("kmeans(k=50") != std::string::npos);
}

TEST_CASE("build_ensemble rejects empty and all-failing grids") {
  const LabeledDataset lds = synth_blobs({{0, 0}}, 4, 0.1, 4);
  CHECK_THROWS_AS(build_ensemble(lds.data, Grid{}), std::invalid_argument);
  const Grid bad = Grid::from_json(json::parse(R"({"kmeans": {"k": [50]}})"));
  CHECK_THROWS_AS(build_ensemble(lds.data, bad), std::invalid_argument);
}

TEST_CASE("select_anmi prefers the duplicated member") {
  // one labeling appears twice; the rest are unrelated
  std::mt19937 rng(99);
  const Labeling c(std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2});
  const Labeling r1(random_labels(rng, 8, 4));
  const Labeling r2(random_labels(rng, 8, 4));
  const Ensemble ens = ensemble_of({c, r1, c, r2});
  const SelectionResult got = select_anmi(ens);

  // verify the argmax against a hand-built score table
  std::vector<Labeling> all{c, r1, c, r2};
  double best_score = -1.0;
  int best_index = -1;
  for (int i = 0; i < 4; ++i) {
    double mean = 0.0;
    for (int j = 0; j < 4; ++j)
      if (i != j)
        mean += oracles::bf_nmi(all[static_cast<std::size_t>(i)].labels(),
                                all[static_cast<std::size_t>(j)].labels()) / 3.0;
    if (mean > best_score + 1e-12) {
      best_score = mean;
      best_index = i;
    }
    CHECK(got.scores[static_cast<std::size_t>(i)] == doctest::Approx(mean).epsilon(1e-12));
  }
  CHECK(got.chosen_index == best_index);
  CHECK(got.chosen_index == 0);  // the duplicated member wins
  CHECK(got.pairwise_nmi_evals == 6);
}

TEST_CASE("select_anmi tie-breaking and preconditions") {
  const Labeling c(std::vector<int>{0, 1, 0, 1});
  const Ensemble ens = ensemble_of({c, c, c});
  const SelectionResult got = select_anmi(ens);
  CHECK(got.chosen_index == 0);
  CHECK(got.score == 1.0);
  CHECK(got.ties == std::vector<int>{0, 1, 2});

  CHECK_THROWS_AS(select_anmi(ensemble_of({c})), std::invalid_argument);
}

TEST_CASE("select_best_match on duplicated members") {
  const Labeling c(std::vector<int>{0, 0, 1, 1, 2, 2});
  const Ensemble ens = ensemble_of({c, c, c, c});
  const SelectionResult got = select_best_match(ens, c.k());
  CHECK(got.score == 1.0);
  CHECK(got.chosen_labeling.same_partition(c));
  REQUIRE(got.consensus.has_value());
  CHECK(got.consensus->same_partition(c));
}

TEST_CASE("selection is invariant under member relabeling") {
  std::mt19937 rng(121);
  std::vector<Labeling> ls;
  for (int t = 0; t < 5; ++t) ls.emplace_back(random_labels(rng, 12, 3));
  const Ensemble base = ensemble_of(ls);

  std::vector<Labeling> relabeled = ls;
  std::vector<int> shifted = relabeled[1].labels();
  for (int& v : shifted) v = v * 7 + 3;
  relabeled[1] = Labeling(shifted);
  const Ensemble moved = ensemble_of(relabeled);

  const SelectionResult a1 = select_anmi(base);
  const SelectionResult a2 = select_anmi(moved);
  CHECK(a1.chosen_index == a2.chosen_index);
  for (std::size_t i = 0; i < a1.scores.size(); ++i)
    CHECK(a1.scores[i] == doctest::Approx(a2.scores[i]).epsilon(1e-13));

  const SelectionResult b1 = select_best_match(base, 4);
  const SelectionResult b2 = select_best_match(moved, 4);
  CHECK(b1.chosen_index == b2.chosen_index);
  CHECK(b1.score == doctest::Approx(b2.score).epsilon(1e-13));
}

TEST_CASE("select_anmi order invariance with distinct scores") {
  std::mt19937 rng(131);
  std::vector<Labeling> ls;
  const Labeling anchor(std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2, 3});
  ls.push_back(anchor);
  ls.push_back(anchor);  // give one member a clear advantage
  for (int t = 0; t < 3; ++t) ls.emplace_back(random_labels(rng, 10, 4));
  const SelectionResult fwd = select_anmi(ensemble_of(ls));

  std::vector<Labeling> rev(ls.rbegin(), ls.rend());
  const SelectionResult bwd = select_anmi(ensemble_of(rev));
  const auto m = ls.size();
  CHECK(fwd.chosen_labeling.same_partition(bwd.chosen_labeling));
  for (std::size_t i = 0; i < m; ++i)
    CHECK(fwd.scores[i] == doctest::Approx(bwd.scores[m - 1 - i]).epsilon(1e-13));
}

TEST_CASE("best-match winner dominates every other member") {
  std::mt19937 rng(141);
  std::vector<Labeling> ls;
  for (int t = 0; t < 6; ++t) ls.emplace_back(random_labels(rng, 14, 3));
  const Ensemble ens = ensemble_of(ls);
  const SelectionResult got = select_best_match(ens, 5);
  for (double s : got.scores) CHECK(got.score >= s);
  CHECK(got.score == got.scores[static_cast<std::size_t>(got.chosen_index)]);
}

TEST_CASE("both strategies select the duplicated member on small ensembles") {
  std::mt19937 rng(151);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<int>(4, 10)(rng);
    Labeling c(random_labels(rng, n, 3));
    if (c.k() < 2) continue;
    std::vector<Labeling> ls{c, Labeling(random_labels(rng, n, 3)), c};
    const Ensemble ens = ensemble_of(ls);

    const SelectionResult s1 = select_anmi(ens);
    // brute-force the leave-one-out table
    double best = -1;
    int best_i = -1;
    for (int i = 0; i < 3; ++i) {
      double mean = 0;
      for (int j = 0; j < 3; ++j)
        if (j != i) mean += oracles::bf_nmi(ls[static_cast<std::size_t>(i)].labels(),
                                            ls[static_cast<std::size_t>(j)].labels()) / 2.0;
      if (mean > best + 1e-12) {
        best = mean;
        best_i = i;
      }
    }
    CHECK(s1.chosen_index == best_i);

    const SelectionResult s2 = select_best_match(ens, c.k());
    CHECK(s2.chosen_labeling.same_partition(c));
  }
}

TEST_CASE("instrumentation counters are exact") {
  std::mt19937 rng(161);
  std::vector<Labeling> ls;
  for (int t = 0; t < 7; ++t) ls.emplace_back(random_labels(rng, 10, 3));
  const SelectionResult s1 = select_anmi(ensemble_of(ls));
  CHECK(s1.pairwise_nmi_evals == 7 * 6 / 2);

  std::vector<Labeling> big;
  for (int t = 0; t < 3; ++t) big.emplace_back(random_labels(rng, 50, 4));
  CHECK(hamming_matrix(big).pairs_counted == 50 * 49 / 2);
}

TEST_CASE("selection json carries the full score table") {
  const Labeling c(std::vector<int>{0, 1, 0, 1});
  const Ensemble ens = ensemble_of({c, c});
  const SelectionResult s2 = select_best_match(ens, 2);
  const json j = s2.to_json(ens);
  CHECK(j.at("strategy") == "best_match");
  CHECK(j.at("scores").size() == 2);
  CHECK(j.at("chosen").at("score") == 1.0);
  CHECK(j.at("consensus_labels").size() == 4);
  CHECK(j.at("k_star") == 2);
}

TEST_CASE("complexity_bench reports exact operation counts") {
  const auto rows = complexity_bench({40}, {4, 8});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].nmi_evals == 4 * 3 / 2);
  CHECK(rows[1].nmi_evals == 8 * 7 / 2);
  // doubling m at fixed n quadruples the pairwise-NMI work (up to the m-1 term)
  CHECK(rows[1].nmi_evals == 28);
  CHECK(rows[0].hamming_pairs == rows[1].hamming_pairs);
  CHECK(rows[0].hamming_pairs == static_cast<std::uint64_t>(40 * 39 / 2));
  CHECK_FALSE(format_bench_table(rows).empty());
}
