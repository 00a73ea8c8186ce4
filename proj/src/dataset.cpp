#include "clustsel/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "clustsel/errors.hpp"
#include "clustsel/random.hpp"
#include "clustsel/threading.hpp"

namespace clustsel {

void Dataset::validate() const {
  if (n() < 1 || d() < 1)
    throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
  if (!points.allFinite())
    throw std::invalid_argument("Dataset: coordinates must be finite");
  if (!point_ids.empty() && static_cast<Eigen::Index>(point_ids.size()) != n())
    throw std::invalid_argument("Dataset: point_ids must be empty or length n");
}

std::uint64_t Dataset::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;  // FNV prime
    }
  };
  mix(static_cast<std::uint64_t>(n()));
  mix(static_cast<std::uint64_t>(d()));
  for (Eigen::Index i = 0; i < n(); ++i)
    for (Eigen::Index j = 0; j < d(); ++j) {
      std::uint64_t bits;
      const double v = points(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
  return h;
}

namespace {

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  if (delimiter == ' ') {
    std::istringstream in(line);
    std::string cell;
    while (in >> cell) cells.push_back(cell);
    return cells;
  }
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
      cell.erase(cell.begin());
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t'))
      cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, int row,
                  std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
    throw format_error(path + ": row " + std::to_string(row) + ", column " +
                       std::to_string(col + 1) + ": '" + cell +
                       "' is not a finite number");
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_header, char delimiter) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool header_pending = has_header;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_row(line, delimiter);
    if (cells.empty()) continue;
    if (rows.empty()) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw format_error(path + ": row " + std::to_string(lineno) + " has " +
                         std::to_string(cells.size()) + " columns, expected " +
                         std::to_string(width));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c)
      row[c] = parse_cell(cells[c], path, lineno, c);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw format_error(path + ": empty input");

  Dataset ds;
  ds.points.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      ds.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.precision(17);
  const char sep = delimiter == ' ' ? ' ' : delimiter;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.d(); ++j) {
      if (j > 0) out << sep;
      out << ds.points(i, j);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

Dataset synth_spiral(int n_per_arm, int arms, double noise_sd,
                     std::uint64_t seed) {
  if (n_per_arm < 1 || arms < 1)
    throw std::invalid_argument("synth_spiral: need n_per_arm >= 1 and arms >= 1");
  if (noise_sd < 0)
    throw std::invalid_argument("synth_spiral: noise_sd must be >= 0");

  // r = inner + theta over 1.25 turns; arms are rotated copies, which keeps
  // the radial gap between adjacent arms at 2*pi/arms.
  constexpr double kInnerRadius = 2.5;
  constexpr double kTurns = 2.5 * std::numbers::pi;
  Rng rng(seed);
  Dataset ds;
  ds.points.resize(static_cast<Eigen::Index>(arms) * n_per_arm, 2);
  Eigen::Index row = 0;
  for (int arm = 0; arm < arms; ++arm) {
    const double phase = 2.0 * std::numbers::pi * arm / arms;
    for (int i = 0; i < n_per_arm; ++i) {
      const double t = n_per_arm == 1 ? 0.0 : double(i) / (n_per_arm - 1);
      const double theta = kTurns * t;
      const double r = kInnerRadius + theta;
      ds.points(row, 0) = r * std::cos(theta + phase) + noise_sd * rng.normal();
      ds.points(row, 1) = r * std::sin(theta + phase) + noise_sd * rng.normal();
      ++row;
    }
  }
  return ds;
}

LabeledDataset synth_blobs(const std::vector<std::vector<double>>& centers,
                           int n_per_center, double sd, std::uint64_t seed) {
  if (centers.empty())
    throw std::invalid_argument("synth_blobs: need at least one center");
  if (n_per_center < 1)
    throw std::invalid_argument("synth_blobs: n_per_center must be >= 1");
  if (sd < 0) throw std::invalid_argument("synth_blobs: sd must be >= 0");
  const std::size_t dim = centers.front().size();
  if (dim == 0) throw std::invalid_argument("synth_blobs: centers must be non-empty vectors");
  for (const auto& c : centers)
    if (c.size() != dim)
      throw std::invalid_argument("synth_blobs: centers must share one dimension");

  Rng rng(seed);
  LabeledDataset out;
  out.data.points.resize(static_cast<Eigen::Index>(centers.size()) * n_per_center,
                         static_cast<Eigen::Index>(dim));
  std::vector<int> truth;
  truth.reserve(centers.size() * static_cast<std::size_t>(n_per_center));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < n_per_center; ++i) {
      for (std::size_t j = 0; j < dim; ++j)
        out.data.points(row, static_cast<Eigen::Index>(j)) =
            centers[c][j] + sd * rng.normal();
      truth.push_back(static_cast<int>(c));
      ++row;
    }
  }
  out.truth = Labeling(std::move(truth));
  return out;
}

LabeledDataset synth_blobs_noise(const std::vector<std::vector<double>>& centers,
                                 int n_per_center, double sd, int n_noise,
                                 double box_lo, double box_hi,
                                 std::uint64_t seed) {
  if (n_noise < 0)
    throw std::invalid_argument("synth_blobs_noise: n_noise must be >= 0");
  if (box_hi < box_lo)
    throw std::invalid_argument("synth_blobs_noise: box_hi must be >= box_lo");
  LabeledDataset blobs = synth_blobs(centers, n_per_center, sd, seed);
  if (n_noise == 0) return blobs;

  // The noise stream is drawn after the blob stream from the same generator.
  Rng rng(seed + 0x9e3779b97f4a7c15ull);
  const Eigen::Index dim = blobs.data.d();
  const Eigen::Index n_blob = blobs.data.n();
  LabeledDataset out;
  out.data.points.resize(n_blob + n_noise, dim);
  out.data.points.topRows(n_blob) = blobs.data.points;
  std::vector<int> truth = blobs.truth.labels();
  const int noise_label = static_cast<int>(centers.size());
  for (int i = 0; i < n_noise; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j)
      out.data.points(n_blob + i, j) = rng.uniform(box_lo, box_hi);
    truth.push_back(noise_label);
  }
  out.truth = Labeling(std::move(truth));
  return out;
}

LabeledDataset synth_disks_noise(const std::vector<std::vector<double>>& centers,
                                 int n_per_disk, double radius, int n_noise,
                                 double box_lo, double box_hi,
                                 std::uint64_t seed) {
  if (centers.empty())
    throw std::invalid_argument("synth_disks_noise: need at least one center");
  for (const auto& c : centers)
    if (c.size() != 2)
      throw std::invalid_argument("synth_disks_noise: centers must be 2D");
  if (n_per_disk < 1)
    throw std::invalid_argument("synth_disks_noise: n_per_disk must be >= 1");
  if (!(radius > 0))
    throw std::invalid_argument("synth_disks_noise: radius must be > 0");
  if (n_noise < 0)
    throw std::invalid_argument("synth_disks_noise: n_noise must be >= 0");
  if (box_hi < box_lo)
    throw std::invalid_argument("synth_disks_noise: box_hi must be >= box_lo");

  Rng rng(seed);
  LabeledDataset out;
  const auto n_disk = static_cast<Eigen::Index>(centers.size()) * n_per_disk;
  out.data.points.resize(n_disk + n_noise, 2);
  std::vector<int> truth;
  truth.reserve(static_cast<std::size_t>(n_disk + n_noise));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < n_per_disk; ++i) {
      const double r = radius * std::sqrt(rng.uniform01());
      const double angle = 2.0 * std::numbers::pi * rng.uniform01();
      out.data.points(row, 0) = centers[c][0] + r * std::cos(angle);
      out.data.points(row, 1) = centers[c][1] + r * std::sin(angle);
      truth.push_back(static_cast<int>(c));
      ++row;
    }
  }
  const int noise_label = static_cast<int>(centers.size());
  for (int i = 0; i < n_noise; ++i) {
    out.data.points(row, 0) = rng.uniform(box_lo, box_hi);
    out.data.points(row, 1) = rng.uniform(box_lo, box_hi);
    truth.push_back(noise_label);
    ++row;
  }
  out.truth = Labeling(std::move(truth));
  return out;
}

Eigen::MatrixXd pairwise_distances(const Dataset& ds) {
  ds.validate();
  const Eigen::Index n = ds.n();
  Eigen::MatrixXd dist(n, n);
  threading::parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t begin,
                                                              std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      dist(ii, ii) = 0.0;
      for (Eigen::Index j = 0; j < ii; ++j)
        dist(ii, j) = (ds.points.row(ii) - ds.points.row(j)).norm();
    }
  });
  // Mirror the lower triangle so both halves are bit-identical.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) dist(j, i) = dist(i, j);
  return dist;
}

}  // namespace clustsel
