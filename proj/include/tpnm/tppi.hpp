#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tpnm/errors.hpp"
#include "tpnm/tp_matrix.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

/// Per-node feature vectors; during training these are the latent rows of U.
class FeatureMap {
 public:
  explicit FeatureMap(Eigen::MatrixXd f) : f_(std::move(f)) {
    if (f_.cols() < 1) throw DomainError("feature dimension must be >= 1");
    if (!f_.allFinite()) throw NonFinite("feature map contains non-finite values");
  }

  Eigen::Index dimension() const { return f_.cols(); }
  Eigen::Index size() const { return f_.rows(); }

  Eigen::VectorXd vector(NodeId v) const {
    if (static_cast<Eigen::Index>(v) >= f_.rows()) throw UnknownNode(v);
    return f_.row(v).transpose();
  }

  const Eigen::MatrixXd& matrix() const noexcept { return f_; }

 private:
  Eigen::MatrixXd f_;
};

/// log(sigmoid(x)) without intermediate overflow or underflow to -inf
/// until x is far outside double range.
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// P(v_j | f(v_i)): logistic of the feature inner product scaled by the
/// pair's temporal weight. Evaluated through log_sigmoid so strongly
/// negative arguments stay strictly positive instead of flushing to 0.
inline double pair_probability(const Eigen::VectorXd& f_i,
                               const Eigen::VectorXd& f_j, double a_ij) {
  if (f_i.size() != f_j.size())
    throw DimensionMismatch("feature vectors differ in dimension: " +
                            std::to_string(f_i.size()) + " vs " +
                            std::to_string(f_j.size()));
  return std::exp(log_sigmoid(f_i.dot(f_j) * a_ij));
}

namespace detail {

/// Sum of log pair probabilities over the clipped event-index window
/// [i-alpha, i+alpha], j != i.
inline double window_log_influence(const EventSequence& seq, std::size_t i,
                                   const FeatureMap& f, const Eigen::MatrixXd& a,
                                   int alpha) {
  const auto len = seq.events.size();
  if (i >= len) throw IndexOutOfRange(i, len);
  const NodeId vi = seq.events[i].node;
  const Eigen::VectorXd fi = f.vector(vi);

  const std::size_t lo = i >= static_cast<std::size_t>(alpha)
                             ? i - static_cast<std::size_t>(alpha)
                             : 0;
  const std::size_t hi = std::min(len - 1, i + static_cast<std::size_t>(alpha));

  double log_prod = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    if (j == i) continue;
    const NodeId vj = seq.events[j].node;
    log_prod += log_sigmoid(fi.dot(f.vector(vj)) * a(vi, vj));
  }
  return log_prod;
}

}  // namespace detail

/// Backward and forward-looking influence: the product of pair
/// probabilities over the alpha-window around event i, clipped to the
/// sequence bounds. Empty windows give the empty product 1.
inline double influence_max(const EventSequence& seq, std::size_t i,
                            const FeatureMap& f, const TPMatrix& tp, int alpha) {
  return std::exp(detail::window_log_influence(seq, i, f, tp.values(), alpha));
}

inline void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidBeta(beta);
}

/// Time-parameterized predictive influence of the node at event i:
/// influence_max scaled by (1 - beta). beta = 0 applies no threshold.
inline double tppi(const EventSequence& seq, std::size_t i, const FeatureMap& f,
                   const TPMatrix& tp, int alpha, double beta) {
  check_beta(beta);
  return influence_max(seq, i, f, tp, alpha) * (1.0 - beta);
}

/// Per-node predictive influence of one instance at its running time.
struct TPPIVector {
  Eigen::VectorXd p;
  double beta = 0.0;
  int alpha = 1;
};

/// TPPI for every catalog node: present nodes are evaluated at their most
/// recent occurrence; nodes absent from the instance contribute 0 (they do
/// not influence this instance's evolution).
inline TPPIVector instance_tppi(const EventSequence& seq, const FeatureMap& f,
                                const Eigen::MatrixXd& weights, int alpha,
                                double beta) {
  check_beta(beta);
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<std::ptrdiff_t> last_index(n, -1);
  for (std::size_t i = 0; i < seq.events.size(); ++i)
    last_index[seq.events[i].node] = static_cast<std::ptrdiff_t>(i);

  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (last_index[v] < 0) continue;
    const double log_inf = detail::window_log_influence(
        seq, static_cast<std::size_t>(last_index[v]), f, weights, alpha);
    p[v] = std::exp(log_inf) * (1.0 - beta);
  }
  return TPPIVector{std::move(p), beta, alpha};
}

/// Relative exponential decay D(t) = e^{-(1-theta)} with theta the mean TPPI.
struct DecayValue {
  double d = 1.0;
  double theta = 1.0;
};

inline DecayValue decay(const TPPIVector& p) {
  if (p.p.size() == 0) throw EmptyInfluence();
  const double theta = p.p.mean();
  return DecayValue{std::exp(-(1.0 - theta)), theta};
}

/// The commonly used time-only decay e^{-theta (T - t)}; kept for
/// comparison against the relative decay.
inline double classic_decay(double theta_param, double t_gap) {
  return std::exp(-theta_param * t_gap);
}

}  // namespace tpnm
