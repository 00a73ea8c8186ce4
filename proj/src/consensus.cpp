#include "clustsel/consensus.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>

#include "clustsel/errors.hpp"
#include "clustsel/metrics.hpp"
#include "clustsel/threading.hpp"

namespace clustsel {

CoAssociationMatrix hamming_matrix(const std::vector<Labeling>& ensemble) {
  if (ensemble.empty())
    throw std::invalid_argument("hamming_matrix: ensemble must be non-empty");
  const int n = ensemble.front().n();
  for (const auto& l : ensemble)
    if (l.n() != n)
      throw std::invalid_argument("hamming_matrix: labelings must have equal length");

  CoAssociationMatrix out;
  out.ensemble_size = static_cast<int>(ensemble.size());
  out.disagreements = Eigen::MatrixXi::Zero(n, n);
  std::atomic<std::uint64_t> pairs{0};

  threading::parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t begin,
                                                              std::size_t end) {
    std::uint64_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < static_cast<std::size_t>(n); ++j) {
        int count = 0;
        for (const auto& l : ensemble)
          count += l[static_cast<int>(i)] != l[static_cast<int>(j)];
        out.disagreements(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = count;
        out.disagreements(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = count;
        ++local;
      }
    }
    pairs.fetch_add(local, std::memory_order_relaxed);
  });
  out.pairs_counted = pairs.load();
  return out;
}

Labeling consensus_from_matrix(const CoAssociationMatrix& m, int k_star,
                               Linkage linkage) {
  return agglomerative(m.disagreements.cast<double>(), k_star, linkage);
}

Labeling consensus_clustering(const std::vector<Labeling>& ensemble, int k_star,
                              Linkage linkage) {
  return consensus_from_matrix(hamming_matrix(ensemble), k_star, linkage);
}

double evaluate_consensus(const Labeling& c_star,
                          const std::vector<Labeling>& ensemble) {
  return anmi(c_star, ensemble);
}

void write_coassociation_csv(const CoAssociationMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  const Eigen::Index n = m.disagreements.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) out << ',';
      out << m.disagreements(i, j);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace clustsel
