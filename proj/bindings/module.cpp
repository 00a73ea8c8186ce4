#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustsel/consensus.hpp"
#include "clustsel/dataset.hpp"
#include "clustsel/experiment.hpp"
#include "clustsel/metrics.hpp"
#include "clustsel/search.hpp"
#include "clustsel/threading.hpp"

namespace py = pybind11;
using namespace clustsel;

namespace {

Dataset make_dataset(const Eigen::MatrixXd& points) {
  Dataset ds;
  ds.points = points;
  ds.validate();
  return ds;
}

Labeling make_labeling(const std::vector<int>& labels) {
  return Labeling(labels);
}

std::vector<Labeling> make_ensemble(const std::vector<std::vector<int>>& members) {
  std::vector<Labeling> out;
  out.reserve(members.size());
  for (const auto& m : members) out.emplace_back(m);
  return out;
}

py::object metric_to_py(const MetricValue& v) {
  if (!v) return py::none();
  return py::float_(*v);
}

// Plain-labeling ensembles are enough for the selection entry points exposed
// here; construct a synthetic grid so the core selection code can run.
Ensemble ensemble_from_labelings(std::vector<Labeling> ls) {
  Ensemble ens;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    KMeansParams p;
    p.k = 1;
    p.seed = i;
    ens.entries.push_back({HyperparamConfig(p), std::move(ls[i])});
  }
  return ens;
}

py::dict selection_to_dict(const SelectionResult& r) {
  py::dict out;
  out["index"] = r.chosen_index;
  out["score"] = r.score;
  out["scores"] = r.scores;
  out["ties"] = r.ties;
  out["labels"] = r.chosen_labeling.canonical_labels();
  if (r.consensus) out["consensus"] = r.consensus->canonical_labels();
  if (r.strategy == Strategy::kAnmiMax)
    out["pairwise_nmi_evaluations"] = r.pairwise_nmi_evals;
  return out;
}

}  // namespace

PYBIND11_MODULE(_clustsel, m) {
  m.doc() =
      "Clustering hyperparameter selection without labels: ensemble "
      "generation, consensus clustering, NMI/ANMI scoring and the companion "
      "validity indices.";

  m.def("set_max_threads", &threading::set_max_threads, py::arg("n"),
        "Worker threads for parallel sections (0 = all cores).");

  // datasets ---------------------------------------------------------------
  m.def(
      "load_csv",
      [](const std::string& path, bool has_header, const std::string& delimiter) {
        if (delimiter.size() != 1)
          throw std::invalid_argument("delimiter must be one character");
        return load_csv(path, has_header, delimiter[0]).points;
      },
      py::arg("path"), py::arg("has_header") = false, py::arg("delimiter") = ",",
      "Load a numeric CSV as an (n, d) array.");
  m.def(
      "synth_spiral",
      [](int n_per_arm, int arms, double noise_sd, std::uint64_t seed) {
        return synth_spiral(n_per_arm, arms, noise_sd, seed).points;
      },
      py::arg("n_per_arm"), py::arg("arms"), py::arg("noise_sd") = 0.0,
      py::arg("seed") = 0,
      "Interleaved spiral arms; point i belongs to arm i // n_per_arm.");
  m.def(
      "synth_blobs",
      [](const std::vector<std::vector<double>>& centers, int n_per_center,
         double sd, std::uint64_t seed) {
        LabeledDataset lds = synth_blobs(centers, n_per_center, sd, seed);
        return py::make_tuple(lds.data.points, lds.truth.canonical_labels());
      },
      py::arg("centers"), py::arg("n_per_center"), py::arg("sd"),
      py::arg("seed") = 0, "Gaussian blobs; returns (points, truth_labels).");
  m.def(
      "pairwise_distances",
      [](const Eigen::MatrixXd& points) {
        return pairwise_distances(make_dataset(points));
      },
      py::arg("points"));

  // base clustering algorithms ---------------------------------------------
  m.def(
      "kmeans",
      [](const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iter) {
        return kmeans(make_dataset(points), k, seed, max_iter).canonical_labels();
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 1,
      py::arg("max_iter") = 100);
  m.def(
      "dbscan",
      [](const Eigen::MatrixXd& points, double eps, int min_pts) {
        return dbscan(make_dataset(points), eps, min_pts).canonical_labels();
      },
      py::arg("points"), py::arg("eps"), py::arg("min_pts"),
      "Noise points share one trailing cluster label.");
  m.def(
      "mean_shift",
      [](const Eigen::MatrixXd& points, double bandwidth, int max_iter) {
        return mean_shift(make_dataset(points), bandwidth, max_iter).canonical_labels();
      },
      py::arg("points"), py::arg("bandwidth"), py::arg("max_iter") = 300);
  m.def(
      "agglomerative",
      [](const Eigen::MatrixXd& dist, int k, const std::string& linkage) {
        return agglomerative(dist, k, parse_linkage(linkage)).canonical_labels();
      },
      py::arg("dist"), py::arg("k"), py::arg("linkage") = "average");

  // comparison criteria ------------------------------------------------------
  m.def(
      "nmi",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return nmi(make_labeling(a), make_labeling(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "anmi",
      [](const std::vector<int>& c, const std::vector<std::vector<int>>& ensemble) {
        return anmi(make_labeling(c), make_ensemble(ensemble));
      },
      py::arg("c"), py::arg("ensemble"));
  m.def(
      "rand_index",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return rand_index(make_labeling(a), make_labeling(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "jaccard",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return metric_to_py(jaccard(make_labeling(a), make_labeling(b)));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "ari",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return metric_to_py(ari(make_labeling(a), make_labeling(b)));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "calinski_harabasz",
      [](const Eigen::MatrixXd& points, const std::vector<int>& labels) {
        return metric_to_py(calinski_harabasz(make_dataset(points), make_labeling(labels)));
      },
      py::arg("points"), py::arg("labels"));
  m.def(
      "dunn_min_max",
      [](const Eigen::MatrixXd& dist, const std::vector<int>& labels) {
        return metric_to_py(dunn_min_max(dist, make_labeling(labels)));
      },
      py::arg("dist"), py::arg("labels"));
  m.def(
      "dunn_average",
      [](const Eigen::MatrixXd& dist, const std::vector<int>& labels) {
        return metric_to_py(dunn_average(dist, make_labeling(labels)));
      },
      py::arg("dist"), py::arg("labels"));
  m.def(
      "silhouette",
      [](const Eigen::MatrixXd& dist, const std::vector<int>& labels,
         bool include_self) {
        return metric_to_py(silhouette(dist, make_labeling(labels),
                                       include_self
                                           ? SilhouetteConvention::kIncludeSelf
                                           : SilhouetteConvention::kExcludeSelf));
      },
      py::arg("dist"), py::arg("labels"), py::arg("include_self") = true);
  m.def(
      "canonicalize",
      [](const std::vector<int>& labels) {
        return make_labeling(labels).canonical_labels();
      },
      py::arg("labels"), "Relabel to 0..k-1 in order of first appearance.");

  // consensus and selection --------------------------------------------------
  m.def(
      "hamming_matrix",
      [](const std::vector<std::vector<int>>& ensemble) {
        return hamming_matrix(make_ensemble(ensemble)).disagreements;
      },
      py::arg("ensemble"),
      "Pairwise label-disagreement counts over the ensemble.");
  m.def(
      "consensus_clustering",
      [](const std::vector<std::vector<int>>& ensemble, int k_star,
         const std::string& linkage) {
        return consensus_clustering(make_ensemble(ensemble), k_star,
                                    parse_linkage(linkage))
            .canonical_labels();
      },
      py::arg("ensemble"), py::arg("k_star"), py::arg("linkage") = "average");
  m.def(
      "evaluate_consensus",
      [](const std::vector<int>& c_star, const std::vector<std::vector<int>>& ensemble) {
        return evaluate_consensus(make_labeling(c_star), make_ensemble(ensemble));
      },
      py::arg("c_star"), py::arg("ensemble"));
  m.def(
      "select_anmi",
      [](const std::vector<std::vector<int>>& ensemble) {
        return selection_to_dict(select_anmi(ensemble_from_labelings(make_ensemble(ensemble))));
      },
      py::arg("ensemble"),
      "Leave-one-out ANMI argmax; returns index, score, the full score table "
      "and ties.");
  m.def(
      "select_best_match",
      [](const std::vector<std::vector<int>>& ensemble, int k_star,
         const std::string& linkage) {
        return selection_to_dict(select_best_match(
            ensemble_from_labelings(make_ensemble(ensemble)), k_star,
            parse_linkage(linkage)));
      },
      py::arg("ensemble"), py::arg("k_star"), py::arg("linkage") = "average",
      "NMI-vs-consensus argmax; the consensus labels ride along in the result.");

  // experiments ----------------------------------------------------------------
  m.def(
      "run_experiment",
      [](const std::string& spec_path, const std::string& out_dir) {
        ExperimentSpec spec = ExperimentSpec::load(spec_path);
        if (!out_dir.empty()) spec.out_dir = out_dir;
        const ExperimentResult r = run_experiment(spec);
        py::dict out;
        out["out_dir"] = r.out_dir;
        out["files"] = r.files;
        out["warnings"] = r.warnings;
        out["stable_choice"] = r.stable_choice;
        if (r.strategy1) out["strategy1"] = selection_to_dict(*r.strategy1);
        py::list s2;
        for (const auto& sel : r.strategy2) s2.append(selection_to_dict(sel));
        out["strategy2"] = s2;
        return out;
      },
      py::arg("spec_path"), py::arg("out_dir") = "",
      "Run an experiment spec JSON and write its report bundle.");

  m.attr("__version__") = "0.1.0";
}
