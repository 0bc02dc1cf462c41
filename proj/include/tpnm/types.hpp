#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tpnm/errors.hpp"

namespace tpnm {

/// Index into a dataset's node catalog.
using NodeId = std::uint32_t;

/// Timestamps are integer seconds; loaders convert coarser resolutions.
using Timestamp = std::int64_t;

struct NodeInfo {
  NodeId id = 0;
  std::string label;
  /// Whether predict_next may propose this node again after it was visited.
  bool revisitable = true;
};

/// Immutable catalog of the nodes a dataset may reference.
class NodeCatalog {
 public:
  NodeCatalog() = default;

  explicit NodeCatalog(std::vector<NodeInfo> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id != i)
        throw DomainError("catalog ids must be contiguous from 0; slot " +
                          std::to_string(i) + " holds id " +
                          std::to_string(nodes_[i].id));
    }
  }

  /// Catalog of `n` nodes labelled by their index.
  static NodeCatalog indexed(std::size_t n) {
    std::vector<NodeInfo> nodes(n);
    for (std::size_t i = 0; i < n; ++i)
      nodes[i] = NodeInfo{static_cast<NodeId>(i), std::to_string(i), true};
    return NodeCatalog(std::move(nodes));
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool contains(NodeId id) const noexcept { return id < nodes_.size(); }
  const NodeInfo& at(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeInfo>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<NodeInfo> nodes_;
};

struct Event {
  NodeId node = 0;
  Timestamp t = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// One network instance: a time-ordered activity trail plus its running
/// time Δ (the reference "now" used for unobserved edges).
struct EventSequence {
  std::string instance_id;
  std::vector<Event> events;
  Timestamp delta = 0;

  std::size_t size() const noexcept { return events.size(); }
  Timestamp start() const { return events.front().t; }
  Timestamp last_time() const { return events.back().t; }

  friend bool operator==(const EventSequence&, const EventSequence&) = default;
};

enum class SchemaKind { EdgeList, ActivityLog, Synthetic };

struct Dataset {
  NodeCatalog catalog;
  std::vector<EventSequence> instances;
  SchemaKind schema_kind = SchemaKind::ActivityLog;
};

/// Aggregate counts reported by dataset_stats. The absent:observed ratio
/// counts, per instance, catalog nodes that never appear vs nodes that do.
struct DatasetStats {
  std::size_t total_nodes = 0;
  double average_degree = 0.0;
  std::uint64_t absent_count = 0;
  std::uint64_t observed_count = 0;

  double absent_observed_ratio() const {
    return observed_count == 0
               ? 0.0
               : static_cast<double>(absent_count) / static_cast<double>(observed_count);
  }
};

/// Checks Definition-1 style invariants: at least one event, strictly
/// increasing timestamps, known nodes, Δ ≥ last timestamp. Returns the
/// sequence unchanged on success, so validation is idempotent.
inline const EventSequence& validate_sequence(const EventSequence& seq,
                                              const NodeCatalog& catalog) {
  if (seq.events.empty()) throw EmptySequence();
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    if (!catalog.contains(seq.events[i].node)) throw UnknownNode(seq.events[i].node);
    if (i > 0 && seq.events[i - 1].t >= seq.events[i].t)
      throw NonMonotonicTimestamps(i, seq.events[i - 1].t, seq.events[i].t);
  }
  if (seq.delta < seq.last_time())
    throw DomainError("instance " + seq.instance_id + ": delta " +
                      std::to_string(seq.delta) + " precedes last event at " +
                      std::to_string(seq.last_time()));
  return seq;
}

inline void validate_dataset(const Dataset& ds) {
  for (const auto& seq : ds.instances) validate_sequence(seq, ds.catalog);
}

/// Distinct undirected transition pairs {u,w}, u != w, from consecutive events.
inline std::set<std::pair<NodeId, NodeId>> undirected_transition_pairs(
    const EventSequence& seq) {
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
    NodeId a = seq.events[i].node;
    NodeId b = seq.events[i + 1].node;
    if (a == b) continue;
    pairs.insert({std::min(a, b), std::max(a, b)});
  }
  return pairs;
}

/// Counts distinct nodes, the per-instance average degree
/// (2·|undirected transition pairs| / |nodes|, averaged over instances)
/// and the aggregate absent:observed node ratio. Empty dataset -> zeros.
inline DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats stats;
  stats.total_nodes = ds.catalog.size();
  if (ds.instances.empty() || stats.total_nodes == 0) return stats;

  double degree_sum = 0.0;
  for (const auto& seq : ds.instances) {
    const auto pairs = undirected_transition_pairs(seq);
    degree_sum += 2.0 * static_cast<double>(pairs.size()) /
                  static_cast<double>(stats.total_nodes);

    std::vector<bool> seen(stats.total_nodes, false);
    for (const auto& ev : seq.events) seen[ev.node] = true;
    const auto observed =
        static_cast<std::uint64_t>(std::count(seen.begin(), seen.end(), true));
    stats.observed_count += observed;
    stats.absent_count += stats.total_nodes - observed;
  }
  stats.average_degree = degree_sum / static_cast<double>(ds.instances.size());
  return stats;
}

}  // namespace tpnm
