#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "clustsel/algorithms.hpp"
#include "clustsel/labeling.hpp"

namespace clustsel {

/// Pairwise disagreement counts over an ensemble: entry (i, j) is the number
/// of member clusterings in which points i and j carry different labels.
/// Symmetric with zero diagonal; entries lie in [0, ensemble_size].
struct CoAssociationMatrix {
  Eigen::MatrixXi disagreements;
  int ensemble_size = 0;
  std::uint64_t pairs_counted = 0;  // distinct (i, j) pairs actually visited
};

/// Requires a non-empty ensemble of equal-length labelings.
CoAssociationMatrix hamming_matrix(const std::vector<Labeling>& ensemble);

/// Reclusters the points agglomeratively under the disagreement counts of the
/// ensemble; returns exactly k_star clusters. Requires 1 <= k_star <= n.
Labeling consensus_clustering(const std::vector<Labeling>& ensemble, int k_star,
                              Linkage linkage = Linkage::kAverage);

/// Same, from a precomputed disagreement matrix.
Labeling consensus_from_matrix(const CoAssociationMatrix& m, int k_star,
                               Linkage linkage = Linkage::kAverage);

/// The averaged NMI between a candidate consensus and every ensemble member;
/// the quantity a consensus clustering aims to make large.
double evaluate_consensus(const Labeling& c_star,
                          const std::vector<Labeling>& ensemble);

void write_coassociation_csv(const CoAssociationMatrix& m, const std::string& path);

}  // namespace clustsel
