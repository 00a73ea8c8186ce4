#include "clustsel/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "clustsel/errors.hpp"
#include "clustsel/threading.hpp"

namespace clustsel {

MetricReport compute_metric_report(const Dataset& ds, const Eigen::MatrixXd& dist,
                                   const Ensemble& ens, const Labeling& consensus,
                                   SilhouetteConvention convention) {
  const std::size_t m = ens.size();
  MetricReport report;
  report.config_names.reserve(m);
  for (const auto& e : ens.entries)
    report.config_names.push_back(e.config.display_name());
  report.rows.resize(m);

  const auto ls = ens.labelings();
  Eigen::MatrixXd nmi_matrix;
  if (m >= 2) nmi_matrix = pairwise_nmi_matrix(ls);

  threading::parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Labeling& l = ens.entries[i].labeling;
      MetricRow& row = report.rows[i];
      if (m >= 2)
        row.anmi = nmi_matrix.row(static_cast<Eigen::Index>(i)).sum() /
                   static_cast<double>(m - 1);
      row.nmi_consensus = nmi(l, consensus);
      row.ari_consensus = ari(l, consensus);
      row.rand_consensus = rand_index(l, consensus);
      row.jaccard_consensus = jaccard(l, consensus);
      row.chi = calinski_harabasz(ds, l);
      row.di1 = dunn_min_max(dist, l);
      row.di2 = dunn_average(dist, l);
      row.silhouette = silhouette(dist, l, convention);
    }
  });
  return report;
}

namespace {

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

constexpr const char* kColumnNames[] = {
    "anmi",  "nmi_consensus", "ari_consensus", "rand_consensus",
    "jaccard_consensus", "chi", "di1", "di2", "silhouette"};

std::vector<MetricValue> row_values(const MetricRow& r) {
  return {r.anmi, r.nmi_consensus, r.ari_consensus, r.rand_consensus,
          r.jaccard_consensus, r.chi, r.di1, r.di2, r.silhouette};
}

}  // namespace

void write_metric_csv(const MetricReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "config";
  for (const char* name : kColumnNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    out << csv_quote(report.config_names[i]);
    for (const auto& v : row_values(report.rows[i]))
      out << ',' << format_metric_value(v);
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

namespace {

// eps values (columns) and min_pts values (blocks) when the ensemble is a
// full DBSCAN product grid, empty otherwise.
struct DbscanShape {
  std::vector<double> eps;
  std::vector<int> min_pts;
  bool valid = false;
};

DbscanShape dbscan_shape(const std::vector<HyperparamConfig>& configs) {
  DbscanShape shape;
  std::set<double> eps;
  std::set<int> min_pts;
  for (const auto& c : configs) {
    if (!c.is<DbscanParams>()) return shape;
    eps.insert(c.as<DbscanParams>().eps);
    min_pts.insert(c.as<DbscanParams>().min_pts);
  }
  if (configs.empty() || eps.size() * min_pts.size() != configs.size())
    return shape;
  shape.eps.assign(eps.begin(), eps.end());
  shape.min_pts.assign(min_pts.begin(), min_pts.end());
  shape.valid = true;
  return shape;
}

const char* kTableMetricNames[] = {"ANMI", "ARI", "CHI", "DI1",
                                   "DI2",  "NMI", "Silhouette"};

MetricValue table_metric(const MetricRow& r, int metric) {
  switch (metric) {
    case 0: return r.anmi;
    case 1: return r.ari_consensus;
    case 2: return r.chi;
    case 3: return r.di1;
    case 4: return r.di2;
    case 5: return r.nmi_consensus;
    default: return r.silhouette;
  }
}

std::string fixed_width(const std::string& s, int width) {
  if (static_cast<int>(s.size()) >= width) return s;
  return std::string(static_cast<std::size_t>(width) - s.size(), ' ') + s;
}

std::string format_double_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string format_metric_table(const MetricReport& report,
                                const std::vector<HyperparamConfig>& configs) {
  std::ostringstream out;
  const DbscanShape shape = dbscan_shape(configs);
  if (shape.valid) {
    // index configs by (eps, min_pts)
    std::map<std::pair<double, int>, std::size_t> index;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto& p = configs[i].as<DbscanParams>();
      index[{p.eps, p.min_pts}] = i;
    }
    const int width = 12;
    for (int mp : shape.min_pts) {
      out << "min_pts=" << mp << '\n';
      out << fixed_width("", width);
      for (double e : shape.eps)
        out << fixed_width("eps=" + format_double_short(e), width);
      out << '\n';
      for (int metric = 0; metric < 7; ++metric) {
        out << fixed_width(kTableMetricNames[metric], width);
        for (double e : shape.eps) {
          const std::size_t i = index.at({e, mp});
          out << fixed_width(format_metric_value(table_metric(report.rows[i], metric)),
                             width);
        }
        out << '\n';
      }
      out << '\n';
    }
    return out.str();
  }

  std::size_t name_width = 6;
  for (const auto& name : report.config_names)
    name_width = std::max(name_width, name.size());
  const int width = 12;
  out << std::left << std::setw(static_cast<int>(name_width + 2)) << "config"
      << std::right;
  for (const char* name : kColumnNames) out << fixed_width(name, width);
  out << '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(name_width + 2))
        << report.config_names[i] << std::right;
    for (const auto& v : row_values(report.rows[i]))
      out << fixed_width(format_metric_value(v), width);
    out << '\n';
  }
  return out.str();
}

std::string format_winner_table(const Dataset& ds, const Eigen::MatrixXd& dist,
                                const Labeling& consensus,
                                const Labeling* strategy1_winner,
                                const Labeling* strategy2_winner,
                                SilhouetteConvention convention) {
  struct Column {
    std::string name;
    const Labeling* labeling;
  };
  std::vector<Column> columns = {{"consensus", &consensus}};
  if (strategy1_winner) columns.push_back({"strategy_1", strategy1_winner});
  if (strategy2_winner) columns.push_back({"strategy_2", strategy2_winner});

  const int width = 14;
  std::ostringstream out;
  out << fixed_width("", width);
  for (const auto& col : columns) out << fixed_width(col.name, width);
  out << '\n';
  const char* names[] = {"CHI", "DI1", "DI2", "Silhouette"};
  for (int metric = 0; metric < 4; ++metric) {
    out << fixed_width(names[metric], width);
    for (const auto& col : columns) {
      MetricValue v;
      switch (metric) {
        case 0: v = calinski_harabasz(ds, *col.labeling); break;
        case 1: v = dunn_min_max(dist, *col.labeling); break;
        case 2: v = dunn_average(dist, *col.labeling); break;
        default: v = silhouette(dist, *col.labeling, convention); break;
      }
      out << fixed_width(format_metric_value(v), width);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace clustsel
