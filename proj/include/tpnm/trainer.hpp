#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tpnm/errors.hpp"
#include "tpnm/rng.hpp"
#include "tpnm/tp_matrix.hpp"
#include "tpnm/tppi.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

constexpr double kLambdaFloor = 1e-4;
constexpr double kLambdaDecay = 0.95;
constexpr double kConvergenceTolerance = 1e-3;

/// Model hyperparameters. beta has no default and must be supplied.
/// lambda0 is the initial learning rate; the Frobenius regularization
/// weight is a separate constant (the optimization diverges or freezes
/// when the two share one decaying value).
struct Hyperparams {
  int alpha = 3;
  double lambda0 = 0.1;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double gamma = 0.9;
  int max_iterations = 1000;
  int latent_dim = 16;
  double reg_weight = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (std::isnan(beta)) throw UsageError("beta is required");
    if (!(beta >= 0.0 && beta < 1.0)) throw InvalidBeta(beta);
    if (alpha < 1) throw UsageError("alpha must be a positive integer");
    if (!(lambda0 >= kLambdaFloor))
      throw UsageError("lambda must be at least 1e-4");
    if (!(gamma > 0.0 && gamma <= 1.0) && gamma != 0.0)
      throw UsageError("gamma must lie in (0,1] (0 disables momentum)");
    if (max_iterations < 1) throw UsageError("M must be a positive integer");
    if (latent_dim < 1) throw UsageError("k must be a positive integer");
    if (reg_weight < 0.0) throw UsageError("reg must be non-negative");
  }
};

/// Learned latent factors plus everything needed to score new instances.
struct FactorModel {
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  Hyperparams hyperparams;
  WeightScheme scheme = WeightScheme::TPInitial;
  NodeCatalog catalog;

  Eigen::Index n() const { return U.rows(); }
  Eigen::Index k() const { return U.cols(); }
};

/// Momentum carriers and the per-epoch error history E.
struct TrainState {
  Eigen::MatrixXd U_last;
  Eigen::MatrixXd V_last;
  std::vector<double> error_history;
  double lambda = 0.1;
  int epoch = 0;
};

struct Gradients {
  Eigen::MatrixXd dU;
  Eigen::MatrixXd dV;
};

/// R(i,j) = p(i) * sigma(<u_i, v_j>): the TPPI-weighted reconstruction.
inline Eigen::MatrixXd reconstruction(const FactorModel& model,
                                      const TPPIVector& p) {
  if (p.p.size() != model.n())
    throw DimensionMismatch("TPPI vector covers " + std::to_string(p.p.size()) +
                            " nodes, model has " + std::to_string(model.n()));
  Eigen::MatrixXd s = (model.U * model.V.transpose());
  Eigen::MatrixXd sig = s.unaryExpr([](double x) { return sigmoid(x); });
  return p.p.asDiagonal() * sig;
}

/// Decay-weighted squared reconstruction error plus Frobenius regularizers:
///   D/2 ||A - R||_F^2 + lambda/2 ||U||_F^2 + lambda/2 ||V||_F^2.
inline double objective(const Eigen::MatrixXd& a, const FactorModel& model,
                        const TPPIVector& p, double lambda) {
  if (a.rows() != model.n() || a.cols() != model.n())
    throw DimensionMismatch("target matrix shape does not match model");
  const double d = decay(p).d;
  const Eigen::MatrixXd r = reconstruction(model, p);
  const double data = 0.5 * d * (a - r).squaredNorm();
  const double reg = 0.5 * lambda * (model.U.squaredNorm() + model.V.squaredNorm());
  return data + reg;
}

/// Analytic gradients of `objective` via the chain rule through the
/// sigmoid and diag(p):
///   dJ/dU = -D (diag(p) (A - R) o sig o (1 - sig)) V + lambda U
/// and symmetrically for V with the transposed inner term.
inline Gradients gradients(const Eigen::MatrixXd& a, const FactorModel& model,
                           const TPPIVector& p, double lambda) {
  if (a.rows() != model.n() || a.cols() != model.n())
    throw DimensionMismatch("target matrix shape does not match model");
  const double d = decay(p).d;
  const Eigen::MatrixXd s = model.U * model.V.transpose();
  const Eigen::MatrixXd sig = s.unaryExpr([](double x) { return sigmoid(x); });
  const Eigen::MatrixXd r = p.p.asDiagonal() * sig;
  // dJ/dS, shared by both factor gradients.
  const Eigen::MatrixXd g =
      (-d) * (p.p.asDiagonal() *
              ((a - r).array() * sig.array() * (1.0 - sig.array())).matrix());
  return Gradients{g * model.V + lambda * model.U,
                   g.transpose() * model.U + lambda * model.V};
}

/// One heavy-ball step: U <- U - lambda dU + gamma (U - U_last), carriers
/// updated to the pre-step parameters, then the learning rate decays
/// multiplicatively down to its 1e-4 floor.
inline void sgd_step(TrainState& state, FactorModel& model,
                     const Gradients& grads, double gamma) {
  const Eigen::MatrixXd u_prev = model.U;
  const Eigen::MatrixXd v_prev = model.V;
  model.U = u_prev - state.lambda * grads.dU + gamma * (u_prev - state.U_last);
  model.V = v_prev - state.lambda * grads.dV + gamma * (v_prev - state.V_last);
  state.U_last = u_prev;
  state.V_last = v_prev;
  state.lambda = std::max(kLambdaFloor, state.lambda * kLambdaDecay);
}

/// Stop condition: with m the latest epoch index,
///   |sum(E[m-13..m-10]) - sum(E[m-3..m])| < tolerance,
/// requiring at least 14 recorded epochs.
inline bool converged(const std::vector<double>& e,
                      double tolerance = kConvergenceTolerance) {
  if (e.size() < 14) return false;
  const std::size_t m = e.size() - 1;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = m - 13; i <= m - 10; ++i) head += e[i];
  for (std::size_t i = m - 3; i <= m; ++i) tail += e[i];
  return std::abs(head - tail) < tolerance;
}

struct EpochStats {
  int epoch = 0;
  double objective = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double lambda = 0.0;
  double mean_decay = 0.0;
};

struct TrainResult {
  FactorModel model;
  std::vector<EpochStats> log;
  bool converged = false;
  int epochs = 0;
};

struct TrainOptions {
  WeightScheme scheme = WeightScheme::TPInitial;
  int threads = 1;
  /// When set, the data term sums over the snapshot window
  /// max(1, T-alpha)..T of event-count prefixes instead of the single
  /// final state (for KONECT-style single evolving networks).
  bool snapshot_window = false;
  double tolerance = kConvergenceTolerance;
  /// Upper bound of the seeded uniform [0, scale] factor initialization.
  double init_scale = 0.1;
};

namespace detail {

/// Precomputed training view of one instance (or one snapshot of it).
struct InstanceTarget {
  const EventSequence* seq = nullptr;
  EventSequence snapshot;  // owns the prefix when snapshotting
  Eigen::MatrixXd a;

  const EventSequence& sequence() const { return snapshot.events.empty() ? *seq : snapshot; }
};

inline std::vector<InstanceTarget> build_targets(const Dataset& ds,
                                                 const TrainOptions& opts,
                                                 int alpha) {
  std::vector<InstanceTarget> targets;
  const std::size_t n = ds.catalog.size();
  for (const auto& seq : ds.instances) {
    if (!opts.snapshot_window) {
      InstanceTarget t;
      t.seq = &seq;
      t.a = target_matrix(seq, n, opts.scheme);
      targets.push_back(std::move(t));
      continue;
    }
    const auto total = seq.events.size();
    const std::size_t first =
        total > static_cast<std::size_t>(alpha) ? total - alpha : 1;
    for (std::size_t len = first; len <= total; ++len) {
      InstanceTarget t;
      t.snapshot.instance_id = seq.instance_id;
      t.snapshot.events.assign(seq.events.begin(), seq.events.begin() + len);
      t.snapshot.delta = t.snapshot.events.back().t;
      t.a = target_matrix(t.snapshot, n, opts.scheme);
      targets.push_back(std::move(t));
    }
  }
  return targets;
}

struct EpochAccumulator {
  Eigen::MatrixXd g;      // sum of dJ/dS over targets
  double data_loss = 0.0; // sum of D/2 ||A-R||^2
  double sq_err = 0.0;    // sum of ||A-R||^2 (unweighted, for RMSE)
  double abs_err = 0.0;
  double decay_sum = 0.0;
};

template <typename Fn>
inline void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(0, 0, count);
    return;
  }
  const auto nthreads = std::min<std::size_t>(threads, count);
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, t, lo, hi] { fn(t, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Trains the latent-factor model with momentum SGD (Algorithm-1 loop):
/// each epoch refreshes the feature map from U, recomputes TPPI and the
/// relative decay per instance, takes one heavy-ball step on the mean
/// gradient, and appends the post-step objective to the error history.
/// Stops at the Eq.-7 plateau or after max_iterations epochs.
inline TrainResult train(const Dataset& ds, const Hyperparams& hp,
                         const TrainOptions& opts = {}) {
  hp.validate();
  if (ds.instances.empty()) throw EmptyInput("dataset has no instances");
  validate_dataset(ds);

  const auto n = static_cast<Eigen::Index>(ds.catalog.size());
  const Eigen::Index k = hp.latent_dim;

  FactorModel model;
  model.hyperparams = hp;
  model.scheme = opts.scheme;
  model.catalog = ds.catalog;
  model.U.resize(n, k);
  model.V.resize(n, k);
  Rng rng(hp.seed);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      model.U(i, j) = rng.uniform(0.0, opts.init_scale);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      model.V(i, j) = rng.uniform(0.0, opts.init_scale);

  TrainState state;
  state.U_last = model.U;
  state.V_last = model.V;
  state.lambda = hp.lambda0;

  const auto targets = detail::build_targets(ds, opts, hp.alpha);
  const double inv_count = 1.0 / static_cast<double>(targets.size());
  const double inv_entries =
      inv_count / static_cast<double>(n) / static_cast<double>(n);

  TrainResult result;
  const int nthreads = std::max(1, opts.threads);
  const std::size_t nchunks =
      std::max<std::size_t>(1, std::min<std::size_t>(nthreads, targets.size()));

  // Per-target TPPI and decay, refreshed each epoch and shared between the
  // gradient pass and the post-step objective pass.
  std::vector<Eigen::VectorXd> tppi_scratch(targets.size());
  std::vector<double> decay_scratch(targets.size());

  const auto merge = [](std::vector<detail::EpochAccumulator>& accs) {
    for (std::size_t t = 1; t < accs.size(); ++t) {
      if (accs[t].g.size() > 0) accs[0].g += accs[t].g;
      accs[0].data_loss += accs[t].data_loss;
      accs[0].sq_err += accs[t].sq_err;
      accs[0].abs_err += accs[t].abs_err;
      accs[0].decay_sum += accs[t].decay_sum;
    }
    return std::move(accs[0]);
  };

  while (state.epoch < hp.max_iterations) {
    const FeatureMap f(model.U);
    const Eigen::MatrixXd sig = (model.U * model.V.transpose())
                                    .unaryExpr([](double x) { return sigmoid(x); });

    std::vector<detail::EpochAccumulator> accs(nchunks);
    for (auto& a : accs) a.g = Eigen::MatrixXd::Zero(n, n);
    detail::parallel_chunks(
        targets.size(), nthreads,
        [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
          auto& acc = accs[chunk];
          for (std::size_t i = lo; i < hi; ++i) {
            const auto& target = targets[i];
            const TPPIVector p =
                instance_tppi(target.sequence(), f, target.a, hp.alpha, hp.beta);
            const double d = decay(p).d;
            const Eigen::MatrixXd residual = target.a - (p.p.asDiagonal() * sig).eval();
            acc.g.noalias() +=
                (-d) * (p.p.asDiagonal() *
                        (residual.array() * sig.array() * (1.0 - sig.array()))
                            .matrix());
            acc.data_loss += 0.5 * d * residual.squaredNorm();
            tppi_scratch[i] = p.p;
            decay_scratch[i] = d;
          }
        });
    auto acc = merge(accs);

    Gradients grads{
        acc.g * inv_count * model.V + hp.reg_weight * model.U,
        acc.g.transpose() * inv_count * model.U + hp.reg_weight * model.V};

    const double lambda_used = state.lambda;
    sgd_step(state, model, grads, hp.gamma);
    ++state.epoch;
    const double lambda_decayed = state.lambda;

    // Post-step objective (Algorithm 1 appends J after the update); the
    // feature map and TPPI refresh at the top of the next epoch.
    const Eigen::MatrixXd sig_post =
        (model.U * model.V.transpose())
            .unaryExpr([](double x) { return sigmoid(x); });
    std::vector<detail::EpochAccumulator> post_accs(nchunks);
    detail::parallel_chunks(
        targets.size(), nthreads,
        [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
          auto& acc2 = post_accs[chunk];
          for (std::size_t i = lo; i < hi; ++i) {
            const Eigen::MatrixXd residual =
                targets[i].a - (tppi_scratch[i].asDiagonal() * sig_post).eval();
            const double sq = residual.squaredNorm();
            acc2.data_loss += 0.5 * decay_scratch[i] * sq;
            acc2.sq_err += sq;
            acc2.abs_err += residual.cwiseAbs().sum();
            acc2.decay_sum += decay_scratch[i];
          }
        });
    auto post = merge(post_accs);

    const double obj =
        post.data_loss * inv_count +
        0.5 * hp.reg_weight * (model.U.squaredNorm() + model.V.squaredNorm());
    if (!std::isfinite(obj))
      throw NonFinite("training diverged at epoch " + std::to_string(state.epoch) +
                      " (objective is not finite; try a smaller lambda)");

    // Reduce-on-plateau: the rate holds while the objective improves and
    // decays toward the floor once steps stop paying off.
    const bool improved =
        state.error_history.empty() || obj < state.error_history.back();
    state.lambda = improved ? lambda_used : lambda_decayed;
    state.error_history.push_back(obj);

    result.log.push_back(EpochStats{
        state.epoch, obj, std::sqrt(post.sq_err * inv_entries),
        post.abs_err * inv_entries, lambda_used, post.decay_sum * inv_count});

    if (converged(state.error_history, opts.tolerance)) {
      result.converged = true;
      break;
    }
  }

  result.epochs = state.epoch;
  result.model = std::move(model);
  return result;
}

struct Prediction {
  NodeId node = 0;
  double score = 0.0;
};

/// Scores every admissible candidate as the next node after `seq` at
/// `query_time`: TPPI of the last event times sigma(<u_last, v_j>).
/// Candidates already visited are excluded unless their catalog entry is
/// revisitable. Descending scores, ties broken by ascending NodeId.
inline std::vector<Prediction> predict_next(const FactorModel& model,
                                            const EventSequence& seq,
                                            Timestamp query_time) {
  validate_sequence(seq, model.catalog);
  if (query_time < seq.last_time())
    throw DomainError("query time " + std::to_string(query_time) +
                      " precedes the last event at " +
                      std::to_string(seq.last_time()));

  const EventSequence at_now = with_delta(seq, query_time);
  const auto n = static_cast<std::size_t>(model.n());
  const Eigen::MatrixXd weights = target_matrix(at_now, n, model.scheme);

  const FeatureMap f(model.U);
  const Hyperparams& hp = model.hyperparams;
  const double p_last =
      std::exp(detail::window_log_influence(at_now, at_now.events.size() - 1, f,
                                            weights, hp.alpha)) *
      (1.0 - hp.beta);

  std::vector<bool> visited(n, false);
  for (const auto& ev : seq.events) visited[ev.node] = true;

  const NodeId last = seq.events.back().node;
  const Eigen::VectorXd u_last = model.U.row(last).transpose();

  std::vector<Prediction> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (visited[j] && !model.catalog.at(static_cast<NodeId>(j)).revisitable)
      continue;
    const double score = p_last * sigmoid(u_last.dot(model.V.row(j).transpose()));
    out.push_back(Prediction{static_cast<NodeId>(j), score});
  }
  std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node < b.node;
  });
  return out;
}

}  // namespace tpnm
