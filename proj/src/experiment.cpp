#include "clustsel/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "clustsel/errors.hpp"

namespace fs = std::filesystem;

namespace clustsel {

namespace {

std::vector<std::vector<double>> parse_centers(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("dataset.centers: expected a non-empty array of vectors");
  std::vector<std::vector<double>> centers;
  for (const json& row : j) {
    if (!row.is_array())
      throw std::invalid_argument("dataset.centers: expected vectors");
    std::vector<double> c;
    for (const json& v : row) c.push_back(v.get<double>());
    centers.push_back(std::move(c));
  }
  return centers;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

LoadedDataset load_dataset_spec(const json& spec) {
  if (!spec.is_object())
    throw std::invalid_argument("dataset spec must be a JSON object");
  LoadedDataset out;
  if (spec.contains("csv")) {
    const std::string path = spec.at("csv").get<std::string>();
    const bool has_header = spec.value("has_header", false);
    const std::string delim = spec.value("delimiter", std::string(","));
    if (delim.size() != 1)
      throw std::invalid_argument("dataset.delimiter: expected one character");
    out.data = load_csv(path, has_header, delim[0]);
    return out;
  }
  if (!spec.contains("synthetic"))
    throw std::invalid_argument("dataset spec needs either 'csv' or 'synthetic'");
  const std::string kind = spec.at("synthetic").get<std::string>();
  if (kind == "spiral") {
    const int n_per_arm = spec.at("n_per_arm").get<int>();
    const int arms = spec.at("arms").get<int>();
    const double noise_sd = spec.value("noise_sd", 0.0);
    const auto seed = spec.value("seed", std::uint64_t{0});
    out.data = synth_spiral(n_per_arm, arms, noise_sd, seed);
    std::vector<int> truth(static_cast<std::size_t>(out.data.n()));
    for (std::size_t i = 0; i < truth.size(); ++i)
      truth[i] = static_cast<int>(i) / n_per_arm;
    out.truth = Labeling(std::move(truth));
    return out;
  }
  if (kind == "disks_noise") {
    const auto centers = parse_centers(spec.at("centers"));
    const int n_per_disk = spec.at("n_per_disk").get<int>();
    const double radius = spec.at("radius").get<double>();
    const int n_noise = spec.at("n_noise").get<int>();
    const json& box = spec.at("box");
    if (!box.is_array() || box.size() != 2)
      throw std::invalid_argument("dataset.box: expected [lo, hi]");
    const auto seed = spec.value("seed", std::uint64_t{0});
    LabeledDataset lds =
        synth_disks_noise(centers, n_per_disk, radius, n_noise,
                          box[0].get<double>(), box[1].get<double>(), seed);
    out.data = std::move(lds.data);
    out.truth = std::move(lds.truth);
    return out;
  }
  if (kind == "blobs" || kind == "blobs_noise") {
    const auto centers = parse_centers(spec.at("centers"));
    const int n_per_center = spec.at("n_per_center").get<int>();
    const double sd = spec.at("sd").get<double>();
    const auto seed = spec.value("seed", std::uint64_t{0});
    LabeledDataset lds;
    if (kind == "blobs") {
      lds = synth_blobs(centers, n_per_center, sd, seed);
    } else {
      const int n_noise = spec.at("n_noise").get<int>();
      const json& box = spec.at("box");
      if (!box.is_array() || box.size() != 2)
        throw std::invalid_argument("dataset.box: expected [lo, hi]");
      lds = synth_blobs_noise(centers, n_per_center, sd, n_noise,
                              box[0].get<double>(), box[1].get<double>(), seed);
    }
    out.data = std::move(lds.data);
    out.truth = std::move(lds.truth);
    return out;
  }
  throw std::invalid_argument("unknown synthetic dataset kind: '" + kind + "'");
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  if (!j.is_object())
    throw std::invalid_argument("experiment spec must be a JSON object");
  ExperimentSpec spec;
  spec.name = j.value("name", std::string("experiment"));
  if (!j.contains("dataset") || !j.contains("grid"))
    throw std::invalid_argument("experiment spec needs 'dataset' and 'grid'");
  spec.dataset = j.at("dataset");
  spec.grid = j.at("grid");
  if (!j.contains("k_star"))
    throw std::invalid_argument("experiment spec needs 'k_star'");
  const json& ks = j.at("k_star");
  if (ks.is_array()) {
    for (const json& v : ks) spec.k_star_list.push_back(v.get<int>());
  } else {
    spec.k_star_list.push_back(ks.get<int>());
  }
  if (spec.k_star_list.empty())
    throw std::invalid_argument("experiment spec: empty k_star list");
  spec.linkage = parse_linkage(j.value("linkage", std::string("average")));
  spec.out_dir = j.value("out_dir", std::string("out/") + spec.name);
  spec.embedding_csv = j.value("embedding_csv", std::string());
  spec.silhouette_convention = j.value("silhouette_include_self", true)
                                   ? SilhouetteConvention::kIncludeSelf
                                   : SilhouetteConvention::kExcludeSelf;
  return spec;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw format_error(path + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentSpec::to_json() const {
  json j;
  j["name"] = name;
  j["dataset"] = dataset;
  j["grid"] = grid;
  j["k_star"] = k_star_list.size() == 1 ? json(k_star_list.front()) : json(k_star_list);
  j["linkage"] = to_string(linkage);
  j["out_dir"] = out_dir;
  if (!embedding_csv.empty()) j["embedding_csv"] = embedding_csv;
  j["silhouette_include_self"] =
      silhouette_convention == SilhouetteConvention::kIncludeSelf;
  return j;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw io_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// One column per clustering next to 2D coordinates, ready for plotting.
void write_plot_csv(const fs::path& path, const Eigen::MatrixXd& coords,
                    const std::vector<std::string>& names,
                    const std::vector<const Labeling*>& labelings) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out.precision(17);
  out << "x,y";
  for (const auto& name : names) out << ',' << csv_quote(name);
  out << '\n';
  std::vector<std::vector<int>> canon;
  canon.reserve(labelings.size());
  for (const Labeling* l : labelings) canon.push_back(l->canonical_labels());
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    out << coords(i, 0) << ',' << coords(i, 1);
    for (const auto& labels : canon) out << ',' << labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.out_dir.empty())
    throw std::invalid_argument("experiment: out_dir must not be empty");

  LoadedDataset loaded = load_dataset_spec(spec.dataset);
  const Dataset& ds = loaded.data;
  ds.validate();
  for (int k_star : spec.k_star_list)
    if (k_star < 1 || k_star > ds.n())
      throw std::invalid_argument("experiment: k_star must be in [1, n]");

  const Grid grid = Grid::from_json(spec.grid);
  const Eigen::MatrixXd dist = pairwise_distances(ds);
  const Ensemble ens = build_ensemble(ds, grid, &dist);
  const auto ls = ens.labelings();

  ExperimentResult result;
  result.out_dir = spec.out_dir;
  result.warnings = ens.warnings;

  const fs::path dir(spec.out_dir);
  fs::create_directories(dir);
  auto record = [&result](const std::string& name) { result.files.push_back(name); };

  // (a) ensemble labelings, one canonical column per configuration
  {
    std::ofstream out(dir / "ensemble_labels.csv");
    if (!out) throw io_error("cannot open for writing: " + (dir / "ensemble_labels.csv").string());
    for (std::size_t i = 0; i < ens.size(); ++i) {
      if (i > 0) out << ',';
      out << csv_quote(ens.entries[i].config.display_name());
    }
    out << '\n';
    std::vector<std::vector<int>> canon;
    canon.reserve(ens.size());
    for (const auto& e : ens.entries) canon.push_back(e.labeling.canonical_labels());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      for (std::size_t c = 0; c < canon.size(); ++c) {
        if (c > 0) out << ',';
        out << canon[c][static_cast<std::size_t>(i)];
      }
      out << '\n';
    }
    record("ensemble_labels.csv");
  }

  // Strategy 1 is defined for ensembles with at least two members.
  if (ens.size() >= 2) {
    result.strategy1 = select_anmi(ens);
    write_json(dir / "selection_anmi.json", result.strategy1->to_json(ens));
    record("selection_anmi.json");
  } else {
    result.warnings.push_back(
        "strategy 1 skipped: ensemble has fewer than 2 members");
  }

  // One consensus, selection and report per k_star; the disagreement matrix
  // is shared across the sweep.
  const CoAssociationMatrix hamming = hamming_matrix(ls);
  std::vector<Labeling> consensus_per_k;
  for (int k_star : spec.k_star_list) {
    const Labeling c_star = consensus_from_matrix(hamming, k_star, spec.linkage);
    const std::string suffix = "_k" + std::to_string(k_star);

    write_labels(c_star, (dir / ("consensus" + suffix + ".labels")).string());
    record("consensus" + suffix + ".labels");

    SelectionResult s2 =
        select_best_match_with_consensus(ens, c_star, k_star, spec.linkage);
    write_json(dir / ("selection_best_match" + suffix + ".json"), s2.to_json(ens));
    record("selection_best_match" + suffix + ".json");

    const MetricReport report =
        compute_metric_report(ds, dist, ens, c_star, spec.silhouette_convention);
    write_metric_csv(report, (dir / ("metrics" + suffix + ".csv")).string());
    record("metrics" + suffix + ".csv");
    std::vector<HyperparamConfig> configs;
    for (const auto& e : ens.entries) configs.push_back(e.config);
    write_text(dir / ("metrics_table" + suffix + ".txt"),
               format_metric_table(report, configs));
    record("metrics_table" + suffix + ".txt");

    const Labeling* s1_labels =
        result.strategy1 ? &result.strategy1->chosen_labeling : nullptr;
    write_text(dir / ("winners" + suffix + ".txt"),
               format_winner_table(ds, dist, c_star, s1_labels,
                                   &s2.chosen_labeling,
                                   spec.silhouette_convention));
    record("winners" + suffix + ".txt");

    result.consensus_anmi.push_back(evaluate_consensus(c_star, ls));
    result.strategy2.push_back(std::move(s2));
    consensus_per_k.push_back(c_star);
  }

  for (std::size_t i = 1; i < result.strategy2.size(); ++i)
    if (!(result.strategy2[i].chosen_config == result.strategy2[0].chosen_config))
      result.stable_choice = false;

  if (spec.k_star_list.size() > 1) {
    // smallest k_star from which every later choice is the same config
    std::size_t stable_from = result.strategy2.size() - 1;
    while (stable_from > 0 &&
           result.strategy2[stable_from - 1].chosen_config ==
               result.strategy2.back().chosen_config)
      --stable_from;
    std::ostringstream out;
    out << "k_star sweep over " << spec.k_star_list.size() << " values\n";
    for (std::size_t i = 0; i < result.strategy2.size(); ++i) {
      char line[256];
      std::snprintf(line, sizeof line, "k_star=%-4d chosen=%-40s score=%.6g\n",
                    spec.k_star_list[i],
                    result.strategy2[i].chosen_config.display_name().c_str(),
                    result.strategy2[i].score);
      out << line;
    }
    out << "stable_choice: " << (result.stable_choice ? "yes" : "no") << '\n';
    out << "stable_from_k_star: " << spec.k_star_list[stable_from] << '\n';
    write_text(dir / "robustness.txt", out.str());
    record("robustness.txt");
  }

  // (f) plot-ready coordinates: the data itself when 2D, else an externally
  // provided embedding.
  bool plot_written = false;
  Eigen::MatrixXd coords;
  if (ds.d() == 2) {
    coords = ds.points;
    plot_written = true;
  } else if (!spec.embedding_csv.empty()) {
    const Dataset emb = load_csv(spec.embedding_csv, false, ',');
    if (emb.n() != ds.n() || emb.d() != 2)
      throw format_error(spec.embedding_csv + ": embedding must be n x 2");
    coords = emb.points;
    plot_written = true;
  } else {
    result.warnings.push_back(
        "plot data skipped: dataset has d > 2 and no embedding_csv was given");
  }
  if (plot_written) {
    std::vector<std::string> names;
    std::vector<const Labeling*> labelings;
    if (loaded.truth) {
      names.push_back("truth");
      labelings.push_back(&*loaded.truth);
    }
    for (std::size_t i = 0; i < ens.size(); ++i) {
      names.push_back(ens.entries[i].config.display_name());
      labelings.push_back(&ens.entries[i].labeling);
    }
    for (std::size_t i = 0; i < consensus_per_k.size(); ++i) {
      names.push_back("consensus_k" + std::to_string(spec.k_star_list[i]));
      labelings.push_back(&consensus_per_k[i]);
    }
    write_plot_csv(dir / "plot_data.csv", coords, names, labelings);
    record("plot_data.csv");
  }

  // manifest last: it lists everything above
  {
    json manifest;
    manifest["name"] = spec.name;
    manifest["spec"] = spec.to_json();
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(ens.dataset_fingerprint));
    manifest["dataset"] = {{"n", ds.n()}, {"d", ds.d()}, {"fingerprint", fp}};
    manifest["ensemble_size"] = ens.size();
    if (result.strategy1) {
      manifest["strategy1"] = {
          {"chosen", result.strategy1->chosen_config.display_name()},
          {"score", result.strategy1->score}};
    }
    json s2 = json::array();
    for (std::size_t i = 0; i < result.strategy2.size(); ++i) {
      s2.push_back({{"k_star", spec.k_star_list[i]},
                    {"chosen", result.strategy2[i].chosen_config.display_name()},
                    {"score", result.strategy2[i].score},
                    {"consensus_anmi", result.consensus_anmi[i]}});
    }
    manifest["strategy2"] = std::move(s2);
    if (spec.k_star_list.size() > 1)
      manifest["stable_choice"] = result.stable_choice;
    manifest["warnings"] = result.warnings;
    json files = json::array();
    for (const auto& f : result.files) files.push_back(f);
    files.push_back("manifest.json");
    manifest["files"] = std::move(files);
    write_json(dir / "manifest.json", manifest);
    record("manifest.json");
  }

  return result;
}

}  // namespace clustsel
