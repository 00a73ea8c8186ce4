#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "clustsel/labeling.hpp"

namespace clustsel {

/// A fixed set of points in d-dimensional Euclidean space. Row order is
/// stable and defines the point indices used by every Labeling.
struct Dataset {
  Eigen::MatrixXd points;              // n x d
  std::vector<std::string> point_ids;  // optional; empty or length n

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index d() const { return points.cols(); }

  /// Throws std::invalid_argument unless n >= 1, d >= 1 and every coordinate
  /// is finite.
  void validate() const;

  /// FNV-1a hash over the shape and the raw coordinates.
  std::uint64_t fingerprint() const;
};

struct LabeledDataset {
  Dataset data;
  Labeling truth;
};

/// Numeric CSV loader; one point per row. delimiter ' ' accepts any run of
/// blanks. Throws format_error on ragged rows, non-numeric cells or empty
/// input, io_error when the file cannot be opened.
Dataset load_csv(const std::string& path, bool has_header = false,
                 char delimiter = ',');

void save_csv(const Dataset& ds, const std::string& path, char delimiter = ',');

/// `arms` interleaved Archimedean spiral arms with Gaussian jitter of scale
/// noise_sd, n_per_arm points each. Points are emitted arm by arm, so point i
/// belongs to arm i / n_per_arm. Deterministic in the seed.
Dataset synth_spiral(int n_per_arm, int arms, double noise_sd, std::uint64_t seed);

/// Isotropic Gaussian blobs; truth labels points by their center.
LabeledDataset synth_blobs(const std::vector<std::vector<double>>& centers,
                           int n_per_center, double sd, std::uint64_t seed);

/// Blobs plus n_noise points uniform in [box_lo, box_hi]^d; noise points
/// share one extra truth label.
LabeledDataset synth_blobs_noise(const std::vector<std::vector<double>>& centers,
                                 int n_per_center, double sd, int n_noise,
                                 double box_lo, double box_hi,
                                 std::uint64_t seed);

/// 2D uniform-density disks plus box noise: constant density inside each
/// disk with a hard edge. Noise points share one extra truth label.
LabeledDataset synth_disks_noise(const std::vector<std::vector<double>>& centers,
                                 int n_per_disk, double radius, int n_noise,
                                 double box_lo, double box_hi,
                                 std::uint64_t seed);

/// Full symmetric Euclidean distance matrix, zero diagonal.
Eigen::MatrixXd pairwise_distances(const Dataset& ds);

}  // namespace clustsel
