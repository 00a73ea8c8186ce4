#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clustsel/report.hpp"
#include "clustsel/search.hpp"

namespace clustsel {

/// Everything the dataset description may produce: the points, plus ground
/// truth labels when the generator defines them.
struct LoadedDataset {
  Dataset data;
  std::optional<Labeling> truth;
};

/// Builds the dataset named by a spec's "dataset" object. Accepted forms:
///   {"csv": path, "has_header": bool, "delimiter": ","}
///   {"synthetic": "spiral", "n_per_arm": .., "arms": .., "noise_sd": .., "seed": ..}
///   {"synthetic": "blobs", "centers": [[..]..], "n_per_center": .., "sd": .., "seed": ..}
///   {"synthetic": "blobs_noise", ... blobs keys ..., "n_noise": .., "box": [lo, hi]}
LoadedDataset load_dataset_spec(const json& spec);

/// A fully deterministic description of one experiment run.
struct ExperimentSpec {
  std::string name;
  json dataset;
  json grid;
  std::vector<int> k_star_list;  // one entry, or several for a sweep
  Linkage linkage = Linkage::kAverage;
  std::string out_dir;
  std::string embedding_csv;  // optional 2D coordinates for plots when d > 2
  SilhouetteConvention silhouette_convention = SilhouetteConvention::kIncludeSelf;

  static ExperimentSpec from_json(const json& j);
  static ExperimentSpec load(const std::string& path);
  json to_json() const;
};

struct ExperimentResult {
  std::string out_dir;
  std::optional<SelectionResult> strategy1;  // absent for single-member ensembles
  std::vector<SelectionResult> strategy2;    // one per k_star, in spec order
  std::vector<double> consensus_anmi;        // one per k_star
  bool stable_choice = true;  // sweep: the same config chosen for every k_star
  std::vector<std::string> files;  // bundle contents relative to out_dir
  std::vector<std::string> warnings;
};

/// Runs the full pipeline and writes the report bundle under spec.out_dir:
/// ensemble labels, consensus labels and selection results per k_star,
/// criterion tables, winner comparison tables, plot-ready coordinates and a
/// manifest. Two runs of one spec produce byte-identical bundles.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace clustsel
