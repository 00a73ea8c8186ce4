#include "clustsel/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "clustsel/errors.hpp"
#include "clustsel/metrics.hpp"
#include "clustsel/threading.hpp"

namespace clustsel {

namespace {

// --- grid parsing helpers ---------------------------------------------------

std::vector<json> as_list(const json& v) {
  if (v.is_array()) return std::vector<json>(v.begin(), v.end());
  return {v};
}

double want_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw std::invalid_argument(where + ": expected a number, got " + v.dump());
  return v.get<double>();
}

std::int64_t want_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer())
    throw std::invalid_argument(where + ": expected an integer, got " + v.dump());
  return v.get<std::int64_t>();
}

void check_keys(const json& block, std::initializer_list<const char*> allowed,
                const std::string& algo) {
  for (const auto& item : block.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end())
      throw std::invalid_argument("grid." + algo + ": unknown parameter '" +
                                  item.key() + "'");
  }
}

}  // namespace

json config_to_json(const HyperparamConfig& c) {
  json j;
  j["algorithm"] = to_string(c.algorithm());
  switch (c.algorithm()) {
    case Algorithm::kMeans: {
      const auto& p = c.as<KMeansParams>();
      j["k"] = p.k;
      j["seed"] = p.seed;
      j["max_iter"] = p.max_iter;
      break;
    }
    case Algorithm::kDbscan: {
      const auto& p = c.as<DbscanParams>();
      j["eps"] = p.eps;
      j["min_pts"] = p.min_pts;
      break;
    }
    case Algorithm::kMeanShift: {
      const auto& p = c.as<MeanShiftParams>();
      j["bandwidth"] = p.bandwidth;
      j["max_iter"] = p.max_iter;
      break;
    }
    case Algorithm::kAgglomerative: {
      const auto& p = c.as<AgglomerativeParams>();
      j["k"] = p.k;
      j["linkage"] = to_string(p.linkage);
      break;
    }
  }
  return j;
}

HyperparamConfig config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("algorithm"))
    throw std::invalid_argument("config: expected an object with an 'algorithm' key");
  const Algorithm algo = parse_algorithm(j.at("algorithm").get<std::string>());
  HyperparamConfig c;
  switch (algo) {
    case Algorithm::kMeans: {
      KMeansParams p;
      p.k = static_cast<int>(want_integer(j.at("k"), "config.k"));
      if (j.contains("seed"))
        p.seed = static_cast<std::uint64_t>(want_integer(j.at("seed"), "config.seed"));
      if (j.contains("max_iter"))
        p.max_iter = static_cast<int>(want_integer(j.at("max_iter"), "config.max_iter"));
      c = HyperparamConfig(p);
      break;
    }
    case Algorithm::kDbscan: {
      DbscanParams p;
      p.eps = want_number(j.at("eps"), "config.eps");
      p.min_pts = static_cast<int>(want_integer(j.at("min_pts"), "config.min_pts"));
      c = HyperparamConfig(p);
      break;
    }
    case Algorithm::kMeanShift: {
      MeanShiftParams p;
      p.bandwidth = want_number(j.at("bandwidth"), "config.bandwidth");
      if (j.contains("max_iter"))
        p.max_iter = static_cast<int>(want_integer(j.at("max_iter"), "config.max_iter"));
      c = HyperparamConfig(p);
      break;
    }
    case Algorithm::kAgglomerative: {
      AgglomerativeParams p;
      p.k = static_cast<int>(want_integer(j.at("k"), "config.k"));
      if (j.contains("linkage"))
        p.linkage = parse_linkage(j.at("linkage").get<std::string>());
      c = HyperparamConfig(p);
      break;
    }
  }
  c.validate();
  return c;
}

Grid Grid::from_json(const json& spec) {
  if (!spec.is_object())
    throw std::invalid_argument("grid spec must be a JSON object");
  for (const auto& item : spec.items()) {
    const std::string& key = item.key();
    if (key != "kmeans" && key != "dbscan" && key != "meanshift" &&
        key != "agglomerative")
      throw std::invalid_argument("grid: unknown algorithm '" + key + "'");
  }

  Grid g;
  auto push = [&g](HyperparamConfig c) {
    c.validate();
    for (const auto& existing : g.configs)
      if (existing == c)
        throw std::invalid_argument("grid: duplicate configuration: " +
                                    c.display_name());
    g.configs.push_back(std::move(c));
  };

  if (spec.contains("kmeans")) {
    const json& block = spec.at("kmeans");
    check_keys(block, {"k", "seed", "max_iter"}, "kmeans");
    if (!block.contains("k"))
      throw std::invalid_argument("grid.kmeans: missing 'k'");
    for (const json& k : as_list(block.at("k")))
      for (const json& seed : as_list(block.value("seed", json(1))))
        for (const json& mi : as_list(block.value("max_iter", json(100)))) {
          KMeansParams p;
          p.k = static_cast<int>(want_integer(k, "grid.kmeans.k"));
          p.seed = static_cast<std::uint64_t>(want_integer(seed, "grid.kmeans.seed"));
          p.max_iter = static_cast<int>(want_integer(mi, "grid.kmeans.max_iter"));
          push(HyperparamConfig(p));
        }
  }
  if (spec.contains("dbscan")) {
    const json& block = spec.at("dbscan");
    check_keys(block, {"eps", "min_pts"}, "dbscan");
    if (!block.contains("eps") || !block.contains("min_pts"))
      throw std::invalid_argument("grid.dbscan: missing 'eps' or 'min_pts'");
    for (const json& eps : as_list(block.at("eps")))
      for (const json& mp : as_list(block.at("min_pts"))) {
        DbscanParams p;
        p.eps = want_number(eps, "grid.dbscan.eps");
        p.min_pts = static_cast<int>(want_integer(mp, "grid.dbscan.min_pts"));
        push(HyperparamConfig(p));
      }
  }
  if (spec.contains("meanshift")) {
    const json& block = spec.at("meanshift");
    check_keys(block, {"bandwidth", "max_iter"}, "meanshift");
    if (!block.contains("bandwidth"))
      throw std::invalid_argument("grid.meanshift: missing 'bandwidth'");
    for (const json& bw : as_list(block.at("bandwidth")))
      for (const json& mi : as_list(block.value("max_iter", json(300)))) {
        MeanShiftParams p;
        p.bandwidth = want_number(bw, "grid.meanshift.bandwidth");
        p.max_iter = static_cast<int>(want_integer(mi, "grid.meanshift.max_iter"));
        push(HyperparamConfig(p));
      }
  }
  if (spec.contains("agglomerative")) {
    const json& block = spec.at("agglomerative");
    check_keys(block, {"k", "linkage"}, "agglomerative");
    if (!block.contains("k"))
      throw std::invalid_argument("grid.agglomerative: missing 'k'");
    for (const json& k : as_list(block.at("k")))
      for (const json& lk : as_list(block.value("linkage", json("average")))) {
        AgglomerativeParams p;
        p.k = static_cast<int>(want_integer(k, "grid.agglomerative.k"));
        p.linkage = parse_linkage(lk.get<std::string>());
        push(HyperparamConfig(p));
      }
  }
  return g;
}

Grid Grid::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  json spec;
  try {
    in >> spec;
  } catch (const json::parse_error& e) {
    throw format_error(path + ": " + e.what());
  }
  return from_json(spec);
}

json Grid::to_json() const {
  json arr = json::array();
  for (const auto& c : configs) arr.push_back(config_to_json(c));
  return arr;
}

std::vector<Labeling> Ensemble::labelings() const {
  std::vector<Labeling> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.labeling);
  return out;
}

Ensemble build_ensemble(const Dataset& ds, const Grid& grid,
                        const Eigen::MatrixXd* dist) {
  ds.validate();
  if (grid.configs.empty())
    throw std::invalid_argument("build_ensemble: empty grid");

  const std::size_t m = grid.configs.size();
  std::vector<std::optional<Labeling>> results(m);
  std::vector<std::string> failures(m);

  // Agglomerative members need the distance matrix; build it once up front so
  // the parallel region stays read-only.
  Eigen::MatrixXd local_dist;
  const Eigen::MatrixXd* shared = dist;
  if (!shared) {
    const bool needs_dist =
        std::any_of(grid.configs.begin(), grid.configs.end(), [](const auto& c) {
          return c.template is<AgglomerativeParams>();
        });
    if (needs_dist) {
      local_dist = pairwise_distances(ds);
      shared = &local_dist;
    }
  }

  threading::parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        results[i] = run_config(ds, grid.configs[i], shared);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  });

  Ensemble ens;
  ens.dataset_fingerprint = ds.fingerprint();
  for (std::size_t i = 0; i < m; ++i) {
    if (results[i]) {
      ens.entries.push_back({grid.configs[i], std::move(*results[i])});
    } else {
      ens.warnings.push_back("skipped " + grid.configs[i].display_name() + ": " +
                             failures[i]);
    }
  }
  if (ens.entries.empty())
    throw std::invalid_argument("build_ensemble: every configuration failed");
  return ens;
}

const char* to_string(Strategy s) {
  return s == Strategy::kAnmiMax ? "anmi_max" : "best_match";
}

Eigen::MatrixXd pairwise_nmi_matrix(const std::vector<Labeling>& ls,
                                    std::uint64_t* eval_count) {
  const std::size_t m = ls.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));

  std::atomic<std::uint64_t> evals{0};
  threading::parallel_chunks(pairs.size(), [&](std::size_t begin, std::size_t end) {
    std::uint64_t local = 0;
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = pairs[p];
      const double v = nmi(ls[static_cast<std::size_t>(i)], ls[static_cast<std::size_t>(j)]);
      out(i, j) = v;
      out(j, i) = v;
      ++local;
    }
    evals.fetch_add(local, std::memory_order_relaxed);
  });
  if (eval_count) *eval_count += evals.load();
  return out;
}

namespace {

void finish_selection(SelectionResult& r, const Ensemble& ens) {
  const auto m = static_cast<int>(ens.size());
  int best = 0;
  for (int i = 1; i < m; ++i)
    if (r.scores[static_cast<std::size_t>(i)] > r.scores[static_cast<std::size_t>(best)])
      best = i;
  for (int i = 0; i < m; ++i)
    if (r.scores[static_cast<std::size_t>(i)] == r.scores[static_cast<std::size_t>(best)])
      r.ties.push_back(i);
  r.chosen_index = best;
  r.chosen_config = ens.entries[static_cast<std::size_t>(best)].config;
  r.chosen_labeling = ens.entries[static_cast<std::size_t>(best)].labeling;
  r.score = r.scores[static_cast<std::size_t>(best)];
  r.dataset_fingerprint = ens.dataset_fingerprint;
}

}  // namespace

SelectionResult select_anmi(const Ensemble& ens) {
  const std::size_t m = ens.size();
  if (m < 2)
    throw std::invalid_argument("select_anmi: need at least 2 ensemble entries");

  SelectionResult r;
  r.strategy = Strategy::kAnmiMax;
  const auto ls = ens.labelings();
  const Eigen::MatrixXd N = pairwise_nmi_matrix(ls, &r.pairwise_nmi_evals);
  r.scores.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    r.scores[i] = N.row(static_cast<Eigen::Index>(i)).sum() / static_cast<double>(m - 1);
  finish_selection(r, ens);
  return r;
}

SelectionResult select_best_match_with_consensus(const Ensemble& ens,
                                                 const Labeling& consensus,
                                                 int k_star, Linkage linkage) {
  if (ens.entries.empty())
    throw std::invalid_argument("select_best_match: empty ensemble");
  SelectionResult r;
  r.strategy = Strategy::kBestMatch;
  r.k_star = k_star;
  r.linkage = linkage;
  r.consensus = consensus;
  const std::size_t m = ens.size();
  r.scores.resize(m);
  threading::parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      r.scores[i] = nmi(ens.entries[i].labeling, consensus);
  });
  finish_selection(r, ens);
  return r;
}

SelectionResult select_best_match(const Ensemble& ens, int k_star, Linkage linkage) {
  if (ens.entries.empty())
    throw std::invalid_argument("select_best_match: empty ensemble");
  const Labeling c_star = consensus_clustering(ens.labelings(), k_star, linkage);
  return select_best_match_with_consensus(ens, c_star, k_star, linkage);
}

json SelectionResult::to_json(const Ensemble& ens) const {
  json j;
  j["strategy"] = to_string(strategy);
  j["chosen"] = {
      {"index", chosen_index},
      {"config", config_to_json(chosen_config)},
      {"name", chosen_config.display_name()},
      {"score", score},
  };
  if (strategy == Strategy::kBestMatch) {
    j["k_star"] = k_star;
    j["linkage"] = to_string(linkage);
  }
  j["ties"] = ties;
  json table = json::array();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    table.push_back({
        {"config", config_to_json(ens.entries[i].config)},
        {"name", ens.entries[i].config.display_name()},
        {"score", scores[i]},
    });
  }
  j["scores"] = std::move(table);
  if (consensus) j["consensus_labels"] = consensus->canonical_labels();
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(dataset_fingerprint));
  j["dataset_fingerprint"] = fp;
  if (strategy == Strategy::kAnmiMax)
    j["pairwise_nmi_evaluations"] = pairwise_nmi_evals;
  if (!ens.warnings.empty()) j["warnings"] = ens.warnings;
  return j;
}

std::vector<BenchRow> complexity_bench(const std::vector<int>& n_list,
                                       const std::vector<int>& m_list) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (int n : n_list) {
    if (n < 8) throw std::invalid_argument("complexity_bench: n must be >= 8");
    const int per = n / 4;
    const LabeledDataset lds = synth_blobs(
        {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}, {10.0, 10.0}}, per, 1.0,
        static_cast<std::uint64_t>(n));
    for (int m : m_list) {
      if (m < 2) throw std::invalid_argument("complexity_bench: m must be >= 2");
      Grid grid;
      for (int t = 0; t < m; ++t) {
        KMeansParams p;
        p.k = 2 + t % 5;
        p.seed = static_cast<std::uint64_t>(1 + t / 5);
        grid.configs.push_back(HyperparamConfig(p));
      }
      const Ensemble ens = build_ensemble(lds.data, grid);

      BenchRow row;
      row.n = static_cast<int>(lds.data.n());
      row.m = static_cast<int>(ens.size());

      auto t0 = clock::now();
      const SelectionResult s1 = select_anmi(ens);
      auto t1 = clock::now();
      row.nmi_evals = s1.pairwise_nmi_evals;
      row.anmi_seconds = std::chrono::duration<double>(t1 - t0).count();

      t0 = clock::now();
      const CoAssociationMatrix h = hamming_matrix(ens.labelings());
      const Labeling c_star = consensus_from_matrix(h, 4, Linkage::kAverage);
      select_best_match_with_consensus(ens, c_star, 4, Linkage::kAverage);
      t1 = clock::now();
      row.hamming_pairs = h.pairs_counted;
      row.best_match_seconds = std::chrono::duration<double>(t1 - t0).count();
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%8s %6s %14s %14s %14s %14s\n", "n", "m",
                "nmi_evals", "anmi_sec", "hamming_pairs", "best_match_sec");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%8d %6d %14llu %14.4f %14llu %14.4f\n", r.n,
                  r.m, static_cast<unsigned long long>(r.nmi_evals),
                  r.anmi_seconds, static_cast<unsigned long long>(r.hamming_pairs),
                  r.best_match_seconds);
    out << line;
  }
  return out.str();
}

}  // namespace clustsel
