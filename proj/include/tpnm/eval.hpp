#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tpnm/errors.hpp"
#include "tpnm/ingest.hpp"
#include "tpnm/tp_matrix.hpp"
#include "tpnm/trainer.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

inline double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size()) throw LengthMismatch(pred.size(), truth.size());
  if (pred.empty()) throw EmptyInput("rmse needs at least one value");
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(pred.size()));
}

inline double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size()) throw LengthMismatch(pred.size(), truth.size());
  if (pred.empty()) throw EmptyInput("mae needs at least one value");
  double abs = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) abs += std::abs(pred[i] - truth[i]);
  return abs / static_cast<double>(pred.size());
}

/// Mann-Whitney rank AUC with average ranks for tied scores. Degenerate
/// label sets use the convention all-positive -> 1, all-negative -> 0.
inline double rank_auc(const std::vector<double>& scores,
                       const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw LengthMismatch(scores.size(), labels.size());
  if (scores.empty()) throw EmptyInput("auc needs at least one sample");
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = scores.size() - positives;
  if (negatives == 0) return 1.0;
  if (positives == 0) return 0.0;

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t t = i; t <= j; ++t)
      if (labels[idx[t]]) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   0.5 * static_cast<double>(positives) *
                       (static_cast<double>(positives) + 1.0);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

struct InstanceOutcome {
  std::string instance_id;
  std::int64_t predicted = -1;  // -1 when every candidate was excluded
  NodeId held_out = 0;
  double score = 0.0;
  bool positive = false;
};

struct AucReport {
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t skipped = 0;
  std::size_t stage_hits = 0;
  std::size_t stage_total = 0;
  std::vector<InstanceOutcome> outcomes;
};

/// Leave-last-node-out protocol: hold out each instance's terminal event,
/// train on the truncated data, run stage predictions up to T-1, and score
/// the terminal predictions (positive iff the top-ranked node is the
/// held-out one) with the rank AUC.
inline AucReport auc_protocol(const Dataset& ds, const Hyperparams& hp,
                              const TrainOptions& opts = {},
                              std::vector<std::string>* warnings = nullptr) {
  Dataset truncated;
  truncated.catalog = ds.catalog;
  truncated.schema_kind = ds.schema_kind;
  AucReport report;
  std::vector<const EventSequence*> evaluated;
  for (const auto& seq : ds.instances) {
    if (seq.events.size() < 2) {
      ++report.skipped;
      if (warnings)
        warnings->push_back("instance " + seq.instance_id +
                            " skipped: fewer than 2 events");
      continue;
    }
    EventSequence cut;
    cut.instance_id = seq.instance_id;
    cut.events.assign(seq.events.begin(), seq.events.end() - 1);
    cut.delta = cut.events.back().t;
    truncated.instances.push_back(std::move(cut));
    evaluated.push_back(&seq);
  }
  if (truncated.instances.empty())
    throw EmptyInput("no instance has the 2+ events the AUC protocol needs");

  const TrainResult trained = train(truncated, hp, opts);

  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto* full : evaluated) {
    const std::size_t total = full->events.size();
    InstanceOutcome outcome;
    outcome.instance_id = full->instance_id;
    outcome.held_out = full->events.back().node;

    for (std::size_t stage = 1; stage < total; ++stage) {
      EventSequence prefix;
      prefix.instance_id = full->events.size() ? full->instance_id : "";
      prefix.events.assign(full->events.begin(),
                           full->events.begin() + static_cast<std::ptrdiff_t>(stage));
      const Event& truth = full->events[stage];
      prefix.delta = truth.t;
      const auto ranked = predict_next(trained.model, prefix, truth.t);
      ++report.stage_total;
      const bool hit = !ranked.empty() && ranked.front().node == truth.node;
      if (hit) ++report.stage_hits;
      if (stage == total - 1) {
        outcome.predicted = ranked.empty() ? -1 : ranked.front().node;
        outcome.score = ranked.empty() ? 0.0 : ranked.front().score;
        outcome.positive = hit;
      }
    }
    scores.push_back(outcome.score);
    labels.push_back(outcome.positive);
    if (outcome.positive) ++report.positives;
    else ++report.negatives;
    report.outcomes.push_back(std::move(outcome));
  }
  report.auc = rank_auc(scores, labels);
  return report;
}

struct AblationResult {
  std::vector<EpochStats> adjacency;
  std::vector<EpochStats> tp_initial;
  std::vector<EpochStats> tp_recent;

  double final_rmse(WeightScheme s) const {
    const auto& curve = s == WeightScheme::Adjacency  ? adjacency
                        : s == WeightScheme::TPInitial ? tp_initial
                                                       : tp_recent;
    return curve.empty() ? 0.0 : curve.back().rmse;
  }
};

/// Trains three models that differ only in the weight scheme and returns
/// their per-epoch RMSE curves (the Fig.-6 style comparison).
inline AblationResult ablation_curves(const Dataset& ds, const Hyperparams& hp,
                                      TrainOptions opts = {}) {
  AblationResult result;
  opts.scheme = WeightScheme::Adjacency;
  result.adjacency = train(ds, hp, opts).log;
  opts.scheme = WeightScheme::TPInitial;
  result.tp_initial = train(ds, hp, opts).log;
  opts.scheme = WeightScheme::TPRecent;
  result.tp_recent = train(ds, hp, opts).log;
  return result;
}

struct CorrelationReport {
  Eigen::MatrixXd coefficients;          // valid only where defined
  std::vector<std::uint8_t> defined;     // n*n row-major
  std::vector<std::pair<NodeId, NodeId>> undefined_pairs;  // i <= j
  std::vector<NodeId> cluster_order;
  std::string linkage = "average";
  std::string distance = "1-|r|";

  bool is_defined(Eigen::Index i, Eigen::Index j) const {
    return defined[static_cast<std::size_t>(i) *
                       static_cast<std::size_t>(coefficients.cols()) +
                   static_cast<std::size_t>(j)] != 0;
  }
};

namespace detail {

/// Leaf order from agglomerative average-linkage clustering over a
/// precomputed distance matrix. Deterministic: ties merge the lowest pair.
inline std::vector<NodeId> cluster_order(const Eigen::MatrixXd& dist) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::vector<NodeId>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {static_cast<NodeId>(i)};

  const auto cluster_distance = [&](const std::vector<NodeId>& a,
                                    const std::vector<NodeId>& b) {
    double sum = 0.0;
    for (NodeId x : a)
      for (NodeId y : b) sum += dist(x, y);
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };

  while (clusters.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = cluster_distance(clusters[a], clusters[b]);
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    auto merged = clusters[best_a];
    merged.insert(merged.end(), clusters[best_b].begin(), clusters[best_b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    clusters[best_a] = std::move(merged);
  }
  return clusters.front();
}

}  // namespace detail

/// Pearson correlations across node columns of the instances-by-nodes
/// observation matrix. Adjacency scheme stacks binary node-presence rows;
/// TP schemes stack the initial node's row of each instance's TP matrix
/// (time-from-start weights for observed activities, time-to-delta for
/// absent ones). Zero-variance columns yield undefined markers.
inline CorrelationReport correlation_analysis(const Dataset& ds, WeightScheme scheme) {
  if (ds.instances.size() < 2)
    throw TooFewInstances("correlation analysis needs at least 2 instances");
  const auto n = static_cast<Eigen::Index>(ds.catalog.size());
  const auto m = static_cast<Eigen::Index>(ds.instances.size());

  Eigen::MatrixXd x(m, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& seq = ds.instances[static_cast<std::size_t>(r)];
    if (scheme == WeightScheme::Adjacency) {
      x.row(r).setZero();
      for (const auto& ev : seq.events) x(r, ev.node) = 1.0;
    } else {
      const TPMatrix tp = tp_matrix(seq, static_cast<std::size_t>(n), scheme);
      x.row(r) = tp.values().row(seq.events.front().node);
    }
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::VectorXd var = centered.colwise().squaredNorm();

  CorrelationReport report;
  report.coefficients = Eigen::MatrixXd::Zero(n, n);
  report.defined.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (var[i] <= 0.0 || var[j] <= 0.0) {
        report.undefined_pairs.emplace_back(static_cast<NodeId>(i),
                                            static_cast<NodeId>(j));
        continue;
      }
      const double r = i == j ? 1.0
                              : centered.col(i).dot(centered.col(j)) /
                                    std::sqrt(var[i] * var[j]);
      report.coefficients(i, j) = r;
      report.coefficients(j, i) = r;
      report.defined[static_cast<std::size_t>(i * n + j)] = 1;
      report.defined[static_cast<std::size_t>(j * n + i)] = 1;
    }
  }

  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      dist(i, j) = report.is_defined(i, j)
                       ? 1.0 - std::abs(report.coefficients(i, j))
                       : 1.0;
  report.cluster_order = detail::cluster_order(dist);
  return report;
}

struct BenchRow {
  std::size_t instances = 0;
  double seconds = 0.0;
  int epochs = 0;

  double seconds_per_instance() const {
    return seconds / static_cast<double>(instances);
  }
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double per_instance_ratio = 0.0;  // largest vs smallest size
  bool roughly_linear = false;
};

/// Trains on synthetic datasets of increasing size and reports wall time
/// per size; approximate linearity means the per-instance time ratio
/// between the largest and smallest size stays <= 2.
inline BenchReport runtime_bench(const std::vector<std::size_t>& sizes,
                                 const Hyperparams& hp, const TrainOptions& opts = {},
                                 double missing_rate = 0.44) {
  if (sizes.empty()) throw UsageError("bench needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw UsageError("bench sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw UsageError("bench sizes must be strictly ascending");
  }

  BenchReport report;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto cfg =
        presets::activity_workflow(sizes[i], missing_rate, hp.seed + i);
    const Dataset ds = synthesize(cfg);
    const auto start = std::chrono::steady_clock::now();
    const TrainResult result = train(ds, hp, opts);
    const auto stop = std::chrono::steady_clock::now();
    report.rows.push_back(BenchRow{
        sizes[i], std::chrono::duration<double>(stop - start).count(),
        result.epochs});
  }
  report.per_instance_ratio = report.rows.back().seconds_per_instance() /
                              report.rows.front().seconds_per_instance();
  report.roughly_linear = report.per_instance_ratio <= 2.0;
  return report;
}

}  // namespace tpnm
