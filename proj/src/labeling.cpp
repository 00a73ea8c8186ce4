#include "clustsel/labeling.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "clustsel/errors.hpp"

namespace clustsel {

namespace {

// Map each point to the canonical index of its label (order of first
// appearance); returns the number of distinct labels.
int canonical_index(const std::vector<int>& labels, std::vector<int>& out) {
  std::unordered_map<int, int> seen;
  seen.reserve(labels.size());
  out.resize(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = seen.emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return next;
}

}  // namespace

Labeling::Labeling(std::vector<int> labels) : labels_(std::move(labels)) {
  for (int v : labels_)
    if (v < 0) throw std::invalid_argument("Labeling: labels must be non-negative");
  std::vector<int> canon;
  k_ = labels_.empty() ? 0 : canonical_index(labels_, canon);
}

std::vector<int> Labeling::canonical_labels() const {
  std::vector<int> canon;
  canonical_index(labels_, canon);
  return canon;
}

bool Labeling::same_partition(const Labeling& other) const {
  if (n() != other.n() || k() != other.k()) return false;
  return canonical_labels() == other.canonical_labels();
}

std::vector<std::vector<int>> Labeling::clusters() const {
  std::vector<int> canon;
  const int k = canonical_index(labels_, canon);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < canon.size(); ++i)
    out[static_cast<std::size_t>(canon[i])].push_back(static_cast<int>(i));
  return out;
}

ContingencyTable contingency(const Labeling& a, const Labeling& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("contingency: labelings must have equal length");
  std::vector<int> ca, cb;
  const int ka = canonical_index(a.labels(), ca);
  const int kb = canonical_index(b.labels(), cb);

  ContingencyTable t;
  t.rows = ka;
  t.cols = kb;
  t.total = a.n();
  t.counts.assign(static_cast<std::size_t>(ka) * static_cast<std::size_t>(kb), 0);
  t.row_marginals.assign(static_cast<std::size_t>(ka), 0);
  t.col_marginals.assign(static_cast<std::size_t>(kb), 0);
  for (int i = 0; i < a.n(); ++i) {
    const auto s = static_cast<std::size_t>(ca[static_cast<std::size_t>(i)]);
    const auto u = static_cast<std::size_t>(cb[static_cast<std::size_t>(i)]);
    ++t.counts[s * static_cast<std::size_t>(kb) + u];
    ++t.row_marginals[s];
    ++t.col_marginals[u];
  }
  return t;
}

PairCounts pair_counts(const Labeling& a, const Labeling& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("pair_counts: labelings must have equal length");
  if (a.n() < 2)
    throw std::invalid_argument("pair_counts: need at least 2 points");
  const ContingencyTable t = contingency(a, b);
  auto comb2 = [](std::int64_t x) { return x * (x - 1) / 2; };

  std::int64_t same_both = 0;
  for (std::int64_t c : t.counts) same_both += comb2(c);
  std::int64_t same_a = 0;
  for (std::int64_t c : t.row_marginals) same_a += comb2(c);
  std::int64_t same_b = 0;
  for (std::int64_t c : t.col_marginals) same_b += comb2(c);

  PairCounts pc;
  pc.n11 = same_both;
  pc.n10 = same_a - same_both;
  pc.n01 = same_b - same_both;
  pc.n00 = comb2(t.total) - pc.n11 - pc.n10 - pc.n01;
  return pc;
}

void write_labels(const Labeling& l, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  for (int v : l.canonical_labels()) out << v << '\n';
  if (!out) throw io_error("write failed: " + path);
}

Labeling read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) {
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      while (first < last && (*first == ' ' || *first == '\t')) ++first;
      while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
      if (first == last) continue;
      int v = 0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last)
        throw format_error(path + ": line " + std::to_string(lineno) +
                           ": not an integer label: '" + cell + "'");
      labels.push_back(v);
    }
  }
  if (labels.empty()) throw format_error(path + ": empty label file");
  return Labeling(std::move(labels));
}

}  // namespace clustsel
