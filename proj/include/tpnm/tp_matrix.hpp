#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tpnm/errors.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

/// Edge-weight scheme: binary adjacency baseline, or temporal residuals
/// referenced to the instance's initial event (TPInitial) or to each node's
/// most recent occurrence (TPRecent).
enum class WeightScheme { Adjacency, TPInitial, TPRecent };

inline std::string to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::Adjacency: return "adjacency";
    case WeightScheme::TPInitial: return "tp-initial";
    case WeightScheme::TPRecent: return "tp-recent";
  }
  return "?";
}

inline WeightScheme scheme_from_string(const std::string& s) {
  if (s == "adjacency") return WeightScheme::Adjacency;
  if (s == "tp-initial") return WeightScheme::TPInitial;
  if (s == "tp-recent") return WeightScheme::TPRecent;
  throw UsageError("unknown weight scheme '" + s +
                   "' (expected adjacency, tp-initial or tp-recent)");
}

/// Unnormalized temporal residuals in seconds. Entries are exact integer
/// values stored as doubles, so timestamp-shift invariance is bit-wise.
struct RawTemporalMatrix {
  Eigen::MatrixXd entries;

  Eigen::Index n() const { return entries.rows(); }
};

/// Normalized time-parameterized matrix: entries in (0,1], unit diagonal.
class TPMatrix {
 public:
  explicit TPMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
      throw DimensionMismatch("TP matrix must be square");
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        const double v = entries_(i, j);
        if (!(v > 0.0 && v <= 1.0))
          throw DomainError("TP entry (" + std::to_string(i) + "," +
                            std::to_string(j) + ") = " + std::to_string(v) +
                            " outside (0,1]");
      }
      if (entries_(i, i) != 1.0)
        throw DomainError("TP diagonal must be 1 at " + std::to_string(i));
    }
  }

  Eigen::Index n() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& values() const noexcept { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// Binary adjacency baseline. Kept distinct from TPMatrix because it
/// violates the no-zero invariant by design.
struct BaselineMatrix {
  Eigen::MatrixXd entries;

  Eigen::Index n() const { return entries.rows(); }
};

namespace detail {

/// Representative timestamp per catalog node: earliest occurrence under
/// TPInitial, latest under TPRecent; nodes never seen take the instance start.
inline std::vector<Timestamp> reference_timestamps(const EventSequence& seq,
                                                   std::size_t n,
                                                   WeightScheme scheme) {
  std::vector<Timestamp> ref(n, seq.start());
  std::vector<bool> seen(n, false);
  for (const auto& ev : seq.events) {
    if (scheme == WeightScheme::TPRecent || !seen[ev.node]) ref[ev.node] = ev.t;
    seen[ev.node] = true;
  }
  return ref;
}

/// Ordered observed-transition indicator: consecutive event pairs, plus
/// (TPInitial only) the initial event to every later event.
inline std::vector<std::uint8_t> observed_transitions(const EventSequence& seq,
                                                      std::size_t n,
                                                      WeightScheme scheme) {
  std::vector<std::uint8_t> obs(n * n, 0);
  for (std::size_t i = 0; i + 1 < seq.events.size(); ++i)
    obs[seq.events[i].node * n + seq.events[i + 1].node] = 1;
  if (scheme == WeightScheme::TPInitial) {
    const NodeId first = seq.events.front().node;
    for (std::size_t i = 1; i < seq.events.size(); ++i)
      obs[first * n + seq.events[i].node] = 1;
  }
  return obs;
}

}  // namespace detail

/// Temporal residuals before normalization: for an observed transition
/// (i,j) the time distance between the reference events, for unobserved
/// pairs the distance from i's reference event to the running time Δ,
/// and 0 on the diagonal (a node is at zero time distance from itself).
inline RawTemporalMatrix raw_temporal_matrix(const EventSequence& seq,
                                             std::size_t n, WeightScheme scheme) {
  if (scheme == WeightScheme::Adjacency)
    throw SchemeMismatch("raw_temporal_matrix requires a TP scheme");
  if (seq.events.empty()) throw EmptySequence();

  const auto ref = detail::reference_timestamps(seq, n, scheme);
  const auto obs = detail::observed_transitions(seq, n, scheme);

  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp to_delta = std::llabs(ref[i] - seq.delta);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        a(i, j) = 0.0;
      } else if (obs[i * n + j]) {
        a(i, j) = static_cast<double>(std::llabs(ref[i] - ref[j]));
      } else {
        a(i, j) = static_cast<double>(to_delta);
      }
    }
  }
  return RawTemporalMatrix{std::move(a)};
}

/// Eq.-2 style normalization: entry(i,j) = 1 / (1 + |a(i,i) - a(i,j)|).
/// Keeps every value strictly positive, maps the diagonal to exactly 1.
inline TPMatrix normalize_tp(const RawTemporalMatrix& raw) {
  const Eigen::Index n = raw.n();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double self = raw.entries(i, i);
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = 1.0 / (1.0 + std::abs(self - raw.entries(i, j)));
  }
  return TPMatrix(std::move(out));
}

inline TPMatrix tp_matrix(const EventSequence& seq, std::size_t n,
                          WeightScheme scheme) {
  return normalize_tp(raw_temporal_matrix(seq, n, scheme));
}

/// Binary baseline: entry 1 iff the ordered consecutive transition was
/// observed, else 0.
inline BaselineMatrix adjacency_matrix(const EventSequence& seq, std::size_t n) {
  if (seq.events.empty()) throw EmptySequence();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < seq.events.size(); ++i)
    a(seq.events[i].node, seq.events[i + 1].node) = 1.0;
  return BaselineMatrix{std::move(a)};
}

/// Training/prediction target under the chosen scheme.
inline Eigen::MatrixXd target_matrix(const EventSequence& seq, std::size_t n,
                                     WeightScheme scheme) {
  if (scheme == WeightScheme::Adjacency) return adjacency_matrix(seq, n).entries;
  return tp_matrix(seq, n, scheme).values();
}

/// Copy of `seq` with the running time moved to `query_time` (continuous
/// prediction at an arbitrary "now").
inline EventSequence with_delta(EventSequence seq, Timestamp query_time) {
  seq.delta = query_time;
  return seq;
}

}  // namespace tpnm
