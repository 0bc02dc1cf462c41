#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpnm/errors.hpp"
#include "tpnm/eval.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

/// Floats in CSV artifacts carry 9 significant digits.
inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Rational absent:observed ratio in Table-III style ("11:14").
inline std::string format_ratio(std::uint64_t absent, std::uint64_t observed) {
  auto gcd = [](std::uint64_t a, std::uint64_t b) {
    while (b) {
      const auto t = a % b;
      a = b;
      b = t;
    }
    return a;
  };
  const auto g = (absent && observed) ? gcd(absent, observed) : 1;
  return std::to_string(absent / g) + ":" + std::to_string(observed / g);
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << body;
}

inline std::string stats_to_json(const DatasetStats& s) {
  nlohmann::ordered_json j;
  j["total_nodes"] = s.total_nodes;
  j["average_degree"] = s.average_degree;
  j["absent_observed"] = format_ratio(s.absent_count, s.observed_count);
  j["absent_count"] = s.absent_count;
  j["observed_count"] = s.observed_count;
  j["absent_observed_value"] = s.absent_observed_ratio();
  return j.dump(1) + "\n";
}

inline std::string stats_to_csv(const DatasetStats& s) {
  std::string out = "total_nodes,average_degree,absent_observed,absent_count,observed_count\n";
  out += std::to_string(s.total_nodes) + "," + format_float(s.average_degree) +
         "," + format_ratio(s.absent_count, s.observed_count) + "," +
         std::to_string(s.absent_count) + "," + std::to_string(s.observed_count) +
         "\n";
  return out;
}

inline std::string training_log_to_csv(const std::vector<EpochStats>& log) {
  std::string out = "epoch,objective,rmse,mae,lambda,decay\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + format_float(e.objective) + "," +
           format_float(e.rmse) + "," + format_float(e.mae) + "," +
           format_float(e.lambda) + "," + format_float(e.mean_decay) + "\n";
  }
  return out;
}

inline std::string predictions_to_csv(const NodeCatalog& catalog,
                                      const std::vector<Prediction>& ranked) {
  std::string out = "rank,node_id,label,score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out += std::to_string(i + 1) + "," + std::to_string(ranked[i].node) + "," +
           catalog.at(ranked[i].node).label + "," + format_float(ranked[i].score) +
           "\n";
  }
  return out;
}

inline std::string auc_report_to_csv(const AucReport& r) {
  std::string out = "instance_id,predicted,held_out,score,positive\n";
  for (const auto& o : r.outcomes) {
    out += o.instance_id + "," + std::to_string(o.predicted) + "," +
           std::to_string(o.held_out) + "," + format_float(o.score) + "," +
           (o.positive ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string auc_report_to_json(const AucReport& r) {
  nlohmann::ordered_json j;
  j["auc"] = r.auc;
  j["positives"] = r.positives;
  j["negatives"] = r.negatives;
  j["skipped"] = r.skipped;
  j["stage_hits"] = r.stage_hits;
  j["stage_total"] = r.stage_total;
  return j.dump(1) + "\n";
}

inline std::string ablation_to_csv(const AblationResult& a) {
  const std::size_t rows =
      std::max({a.adjacency.size(), a.tp_initial.size(), a.tp_recent.size()});
  std::string out = "epoch,adjacency_rmse,tp_initial_rmse,tp_recent_rmse\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1);
    out += i < a.adjacency.size() ? "," + format_float(a.adjacency[i].rmse) : ",";
    out += i < a.tp_initial.size() ? "," + format_float(a.tp_initial[i].rmse) : ",";
    out += i < a.tp_recent.size() ? "," + format_float(a.tp_recent[i].rmse) : ",";
    out += "\n";
  }
  return out;
}

/// Correlation matrix CSV; undefined coefficients serialize as the
/// literal token "undef", never as a number.
inline std::string correlation_to_csv(const CorrelationReport& r,
                                      const NodeCatalog& catalog) {
  const auto n = r.coefficients.rows();
  std::string out = "node";
  for (Eigen::Index j = 0; j < n; ++j)
    out += "," + catalog.at(static_cast<NodeId>(j)).label;
  out += "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out += catalog.at(static_cast<NodeId>(i)).label;
    for (Eigen::Index j = 0; j < n; ++j) {
      out += ",";
      out += r.is_defined(i, j) ? format_float(r.coefficients(i, j)) : "undef";
    }
    out += "\n";
  }
  out += "\ncluster_order";
  for (const auto v : r.cluster_order) out += "," + catalog.at(v).label;
  out += "\nlinkage," + r.linkage + "\ndistance," + r.distance + "\n";
  return out;
}

inline std::string bench_to_csv(const BenchReport& r) {
  std::string out = "instances,seconds,seconds_per_instance,epochs\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.instances) + "," + format_float(row.seconds) + "," +
           format_float(row.seconds_per_instance()) + "," +
           std::to_string(row.epochs) + "\n";
  }
  return out;
}

}  // namespace tpnm
