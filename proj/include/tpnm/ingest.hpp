#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tpnm/errors.hpp"
#include "tpnm/rng.hpp"
#include "tpnm/types.hpp"

namespace tpnm {

struct LoadOptions {
  /// Group edge-list rows into one instance per source node instead of a
  /// single global instance.
  bool group_by_source = false;
  /// Sort out-of-order rows instead of rejecting them.
  bool sort_on_disorder = false;
  /// Reject duplicate timestamps instead of nudging them by +1s.
  bool strict_timestamps = false;
  /// Collects non-fatal messages (nudged timestamps etc.) when non-null.
  std::vector<std::string>* warnings = nullptr;
};

namespace detail {

inline void warn(const LoadOptions& opts, std::string msg) {
  if (opts.warnings) opts.warnings->push_back(std::move(msg));
}

inline std::int64_t parse_int(std::string_view tok, std::size_t line,
                              const char* what) {
  std::int64_t value = 0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(std::string("expected integer ") + what + ", got '" +
                         std::string(tok) + "'",
                     line);
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(s);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

/// Sorts (optionally), enforces strict monotonicity by nudging or
/// rejecting, and sets delta to the last timestamp.
inline void finalize_sequence(EventSequence& seq, const LoadOptions& opts) {
  bool ordered = true;
  for (std::size_t i = 1; i < seq.events.size(); ++i)
    if (seq.events[i].t < seq.events[i - 1].t) ordered = false;
  if (!ordered) {
    if (!opts.sort_on_disorder) {
      for (std::size_t i = 1; i < seq.events.size(); ++i)
        if (seq.events[i].t < seq.events[i - 1].t)
          throw NonMonotonicTimestamps(i, seq.events[i - 1].t, seq.events[i].t);
    }
    std::stable_sort(seq.events.begin(), seq.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }
  std::size_t nudged = 0;
  for (std::size_t i = 1; i < seq.events.size(); ++i) {
    if (seq.events[i].t <= seq.events[i - 1].t) {
      if (opts.strict_timestamps)
        throw DuplicateTimestamp(seq.instance_id, seq.events[i].t);
      seq.events[i].t = seq.events[i - 1].t + 1;
      ++nudged;
    }
  }
  if (nudged > 0)
    warn(opts, "instance " + seq.instance_id + ": nudged " +
                   std::to_string(nudged) + " duplicate timestamp(s) by +1s");
  seq.delta = seq.events.back().t;
}

}  // namespace detail

/// Node catalog file: CSV `id,label[,revisitable]`, header optional.
/// External ids may be arbitrary integers; they map onto contiguous
/// internal indices in file order.
struct CatalogFile {
  NodeCatalog catalog;
  std::unordered_map<std::int64_t, NodeId> to_internal;
};

inline CatalogFile load_node_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open catalog file " + path);
  CatalogFile out;
  std::vector<NodeInfo> nodes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (lineno == 1 && !fields.empty() && fields[0] == "id") continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("expected id,label[,revisitable]", lineno);
    const auto ext = detail::parse_int(fields[0], lineno, "node id");
    if (ext < 0) throw ParseError("node id must be non-negative", lineno);
    bool revisit = true;
    if (fields.size() == 3) {
      if (fields[2] == "true" || fields[2] == "1") revisit = true;
      else if (fields[2] == "false" || fields[2] == "0") revisit = false;
      else throw ParseError("revisitable must be true/false", lineno);
    }
    const auto internal = static_cast<NodeId>(nodes.size());
    if (!out.to_internal.emplace(ext, internal).second)
      throw ParseError("duplicate node id " + std::to_string(ext), lineno);
    nodes.push_back(NodeInfo{internal, fields[1], revisit});
  }
  out.catalog = NodeCatalog(std::move(nodes));
  return out;
}

/// Whitespace-separated `src dst [weight] timestamp` rows (KONECT style).
/// Events are the edge destinations in time order; sources only
/// contribute catalog entries (and instances under per-source grouping).
inline Dataset load_edge_list(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path);

  struct Edge {
    std::int64_t src, dst;
    Timestamp t;
  };
  std::vector<Edge> edges;
  std::unordered_map<std::int64_t, NodeId> ids;
  std::vector<std::int64_t> externals;
  const auto intern = [&](std::int64_t ext) {
    auto [it, fresh] = ids.emplace(ext, static_cast<NodeId>(externals.size()));
    if (fresh) externals.push_back(ext);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 3 && toks.size() != 4)
      throw ParseError("expected 'src dst [weight] timestamp'", lineno);
    Edge e;
    e.src = detail::parse_int(toks[0], lineno, "source node");
    e.dst = detail::parse_int(toks[1], lineno, "destination node");
    e.t = detail::parse_int(toks.back(), lineno, "timestamp");
    intern(e.src);
    intern(e.dst);
    edges.push_back(e);
  }
  if (edges.empty()) throw ParseError("edge list " + path + " has no data rows");

  std::vector<NodeInfo> nodes(externals.size());
  for (std::size_t i = 0; i < externals.size(); ++i)
    nodes[i] = NodeInfo{static_cast<NodeId>(i), std::to_string(externals[i]), true};

  Dataset ds;
  ds.catalog = NodeCatalog(std::move(nodes));
  ds.schema_kind = SchemaKind::EdgeList;

  if (!opts.group_by_source) {
    EventSequence seq;
    seq.instance_id = "global";
    for (const auto& e : edges) seq.events.push_back(Event{ids.at(e.dst), e.t});
    detail::finalize_sequence(seq, opts);
    ds.instances.push_back(std::move(seq));
  } else {
    std::vector<std::int64_t> order;
    std::unordered_map<std::int64_t, EventSequence> by_src;
    for (const auto& e : edges) {
      auto [it, fresh] = by_src.try_emplace(e.src);
      if (fresh) {
        it->second.instance_id = "src-" + std::to_string(e.src);
        order.push_back(e.src);
      }
      it->second.events.push_back(Event{ids.at(e.dst), e.t});
    }
    for (auto src : order) {
      auto& seq = by_src.at(src);
      detail::finalize_sequence(seq, opts);
      ds.instances.push_back(std::move(seq));
    }
  }
  validate_dataset(ds);
  return ds;
}

/// Activity log: CSV with header `instance_id,activity_id,timestamp`, one
/// EventSequence per instance_id. Activity ids validate against the
/// catalog when one is supplied.
inline Dataset load_activity_csv(const std::string& path,
                                 const std::optional<CatalogFile>& catalog = {},
                                 const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open activity log " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("activity log " + path + " is empty");
  {
    auto header = detail::split_csv(line);
    if (header.size() != 3 || header[0] != "instance_id" ||
        header[1] != "activity_id" || header[2] != "timestamp")
      throw ParseError("expected header instance_id,activity_id,timestamp", 1);
  }

  struct Row {
    NodeId node;
    Timestamp t;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> rows;
  std::unordered_map<std::int64_t, NodeId> seen_ids;
  std::vector<std::int64_t> seen_order;

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 3)
      throw ParseError("expected 3 comma-separated fields", lineno);
    const auto ext = detail::parse_int(fields[1], lineno, "activity id");
    const auto t = detail::parse_int(fields[2], lineno, "timestamp");

    NodeId node;
    if (catalog) {
      const auto it = catalog->to_internal.find(ext);
      if (it == catalog->to_internal.end())
        throw UnknownNode(static_cast<std::uint32_t>(ext));
      node = it->second;
    } else {
      auto [it, fresh] = seen_ids.emplace(ext, static_cast<NodeId>(seen_order.size()));
      if (fresh) seen_order.push_back(ext);
      node = it->second;
    }
    auto [it, fresh] = rows.try_emplace(fields[0]);
    if (fresh) order.push_back(fields[0]);
    it->second.push_back(Row{node, t});
  }
  if (order.empty()) throw ParseError("activity log " + path + " has no data rows");

  Dataset ds;
  ds.schema_kind = SchemaKind::ActivityLog;
  if (catalog) {
    ds.catalog = catalog->catalog;
  } else {
    // Without a catalog file, activity ids become nodes in ascending order.
    std::vector<std::int64_t> sorted = seen_order;
    std::sort(sorted.begin(), sorted.end());
    std::unordered_map<std::int64_t, NodeId> remap;
    std::vector<NodeInfo> nodes(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      remap[sorted[i]] = static_cast<NodeId>(i);
      nodes[i] = NodeInfo{static_cast<NodeId>(i), std::to_string(sorted[i]), true};
    }
    for (auto& [id, rws] : rows)
      for (auto& r : rws) r.node = remap.at(seen_order[r.node]);
    ds.catalog = NodeCatalog(std::move(nodes));
  }

  LoadOptions seq_opts = opts;
  seq_opts.sort_on_disorder = true;  // per instance, rows sort by timestamp
  for (const auto& id : order) {
    EventSequence seq;
    seq.instance_id = id;
    for (const auto& r : rows.at(id)) seq.events.push_back(Event{r.node, r.t});
    detail::finalize_sequence(seq, seq_opts);
    ds.instances.push_back(std::move(seq));
  }
  validate_dataset(ds);
  return ds;
}

/// Replaces every event time with a seeded uniform draw inside
/// [instance_start, instance_start + window), then restores strict order
/// (sort + 1s nudges). Used for reaction-style data published without
/// timestamps. Default window: 72 hours.
inline Dataset randomize_timestamps(const Dataset& ds, Timestamp window,
                                    std::uint64_t seed) {
  if (window <= 0) throw UsageError("randomization window must be positive");
  Dataset out;
  out.catalog = ds.catalog;
  out.schema_kind = ds.schema_kind;
  Rng master(seed);
  for (const auto& seq : ds.instances) {
    Rng rng = master.fork(out.instances.size());
    EventSequence next;
    next.instance_id = seq.instance_id;
    const Timestamp start = seq.events.front().t;
    for (const auto& ev : seq.events)
      next.events.push_back(Event{ev.node, start + rng.uniform_int(0, window - 1)});
    std::stable_sort(next.events.begin(), next.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < next.events.size(); ++i)
      if (next.events[i].t <= next.events[i - 1].t)
        next.events[i].t = next.events[i - 1].t + 1;
    next.delta = std::max(start + window, next.events.back().t);
    out.instances.push_back(std::move(next));
  }
  validate_dataset(out);
  return out;
}

/// One weighted outgoing transition with its dwell-time range in seconds.
struct TransitionEntry {
  NodeId to = 0;
  double weight = 1.0;
  Timestamp dwell_min = 1;
  Timestamp dwell_max = 1;
};

/// Configuration of the synthetic temporally-consistent network generator.
struct SyntheticConfig {
  std::size_t instance_count = 0;
  std::size_t node_count = 12;
  /// Outgoing transitions per node; an empty list marks an absorbing node.
  std::vector<std::vector<TransitionEntry>> transitions;
  /// Probability that a visited activity is dropped from the record
  /// (all its occurrences), mimicking missing activity types.
  double missing_rate = 0.0;
  std::uint64_t seed = 0;
  NodeId start_node = 0;
  /// Uniform random start node instead of start_node.
  bool uniform_random_start = false;
  /// When max_events > 0, each walk stops after a length drawn uniformly
  /// from [min_events, max_events]; required for tables without a
  /// reachable absorbing node.
  std::size_t min_events = 0;
  std::size_t max_events = 0;
  std::vector<std::string> labels;  // optional; defaults to indices

  void validate() const {
    if (instance_count < 1) throw UsageError("instance_count must be positive");
    if (node_count < 1) throw UsageError("node_count must be positive");
    if (transitions.size() != node_count)
      throw UsageError("transition table must have one row per node");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
      throw UsageError("missing_rate must lie in [0,1)");
    if (start_node >= node_count && !uniform_random_start)
      throw UsageError("start_node outside catalog");
    if (max_events > 0 && min_events > max_events)
      throw UsageError("min_events exceeds max_events");
    for (const auto& row : transitions) {
      double total = 0.0;
      for (const auto& e : row) {
        if (e.to >= node_count) throw UsageError("transition target outside catalog");
        if (e.weight < 0.0) throw UsageError("transition weights must be >= 0");
        if (e.dwell_min < 1 || e.dwell_max < e.dwell_min)
          throw UsageError("dwell range must satisfy 1 <= min <= max");
        total += e.weight;
      }
      if (!row.empty() && total <= 0.0)
        throw UsageError("non-absorbing node has zero total transition weight");
    }
    if (max_events == 0 && !has_reachable_absorbing_state())
      throw NoAbsorbingState();
  }

  bool has_reachable_absorbing_state() const {
    std::vector<bool> visited(node_count, false);
    std::deque<NodeId> frontier;
    if (uniform_random_start) {
      for (NodeId v = 0; v < node_count; ++v) {
        visited[v] = true;
        frontier.push_back(v);
      }
    } else {
      visited[start_node] = true;
      frontier.push_back(start_node);
    }
    while (!frontier.empty()) {
      const NodeId v = frontier.front();
      frontier.pop_front();
      if (transitions[v].empty()) return true;
      for (const auto& e : transitions[v]) {
        if (e.weight > 0.0 && !visited[e.to]) {
          visited[e.to] = true;
          frontier.push_back(e.to);
        }
      }
    }
    return false;
  }
};

/// Walks the transition table from the start node until an absorbing node
/// (or the per-instance length cap), sampling dwell times, then drops
/// whole activities at missing_rate. Deterministic per seed.
inline Dataset synthesize(const SyntheticConfig& cfg) {
  cfg.validate();

  Dataset ds;
  ds.schema_kind = SchemaKind::Synthetic;
  {
    std::vector<NodeInfo> nodes(cfg.node_count);
    for (std::size_t i = 0; i < cfg.node_count; ++i) {
      nodes[i] = NodeInfo{static_cast<NodeId>(i),
                          i < cfg.labels.size() ? cfg.labels[i] : std::to_string(i),
                          true};
    }
    ds.catalog = NodeCatalog(std::move(nodes));
  }

  Rng master(cfg.seed);
  std::vector<double> weights;
  for (std::size_t m = 0; m < cfg.instance_count; ++m) {
    Rng rng = master.fork(m);

    std::size_t cap = 0;
    if (cfg.max_events > 0) {
      const std::size_t lo = std::max<std::size_t>(1, cfg.min_events);
      cap = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(lo),
                          static_cast<std::int64_t>(cfg.max_events)));
    }

    NodeId node = cfg.uniform_random_start
                      ? static_cast<NodeId>(rng.uniform_int(
                            0, static_cast<std::int64_t>(cfg.node_count) - 1))
                      : cfg.start_node;
    Timestamp t = 0;
    std::vector<Event> walk{Event{node, t}};
    while (!cfg.transitions[node].empty() && (cap == 0 || walk.size() < cap)) {
      const auto& row = cfg.transitions[node];
      weights.clear();
      for (const auto& e : row) weights.push_back(e.weight);
      const auto& entry = row[rng.weighted_index(weights)];
      t += rng.uniform_int(entry.dwell_min, entry.dwell_max);
      node = entry.to;
      walk.push_back(Event{node, t});
    }

    // Activity-level sparsity: drop every occurrence of a sampled node.
    std::vector<bool> drop(cfg.node_count, false);
    if (cfg.missing_rate > 0.0) {
      std::vector<bool> present(cfg.node_count, false);
      for (const auto& ev : walk) present[ev.node] = true;
      for (std::size_t v = 0; v < cfg.node_count; ++v)
        if (present[v] && rng.uniform() < cfg.missing_rate) drop[v] = true;
    }
    EventSequence seq;
    seq.instance_id = "synth-" + std::to_string(m);
    for (const auto& ev : walk)
      if (!drop[ev.node]) seq.events.push_back(ev);
    if (seq.events.empty()) seq.events = walk;  // keep at least the raw walk
    seq.delta = seq.events.back().t;
    ds.instances.push_back(std::move(seq));
  }
  validate_dataset(ds);
  return ds;
}

namespace presets {

/// 12-activity sales-workflow chain covering every node once, with a
/// negotiation bounce (8 <-> 9) and widely varying dwell times. The
/// workhorse for sparsity and training experiments.
inline SyntheticConfig activity_workflow(std::size_t instances, double missing_rate,
                                         std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.instance_count = instances;
  cfg.node_count = 12;
  cfg.missing_rate = missing_rate;
  cfg.seed = seed;
  cfg.labels = {"start",    "inbound",   "contact",  "appt_set",
                "appt_ok",  "appt_done", "visit",    "test_drive",
                "negotiate", "turnover", "beback",   "closed"};
  cfg.transitions.assign(12, {});
  const auto chain = [&](NodeId from, NodeId to, Timestamp lo, Timestamp hi) {
    cfg.transitions[from].push_back(TransitionEntry{to, 1.0, lo, hi});
  };
  chain(0, 1, 1, 2);    // instant: request received
  chain(1, 2, 1, 4);    // quick: first response
  chain(2, 3, 2, 9);    // scheduling takes longer
  chain(3, 4, 1, 3);
  chain(4, 5, 4, 12);   // waiting for the appointment
  chain(5, 6, 1, 2);
  chain(6, 7, 2, 6);
  chain(7, 8, 1, 5);
  cfg.transitions[8].push_back(TransitionEntry{9, 1.0, 1, 8});
  cfg.transitions[9].push_back(TransitionEntry{10, 0.7, 1, 4});
  cfg.transitions[9].push_back(TransitionEntry{8, 0.3, 1, 6});  // renegotiate
  chain(10, 11, 1, 3);
  cfg.min_events = cfg.max_events = 40;  // fixed safety cap for bounce tails
  return cfg;
}

/// Sales-graph transition table with the full branching structure
/// (several admissible follow-ups per activity), uniform weights.
inline SyntheticConfig branching_workflow(std::size_t instances, double missing_rate,
                                          std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.instance_count = instances;
  cfg.node_count = 12;
  cfg.missing_rate = missing_rate;
  cfg.seed = seed;
  cfg.labels = {"start",    "inbound",   "contact",  "appt_set",
                "appt_ok",  "appt_done", "visit",    "test_drive",
                "negotiate", "turnover", "beback",   "closed"};
  const std::vector<std::vector<NodeId>> adjacency = {
      {1, 2}, {2, 3, 6, 8}, {3, 6, 8}, {4},          {5},      {6, 10},
      {7, 8, 9}, {8, 9, 11}, {7, 9, 11}, {3, 10},    {7, 8, 9, 11}, {}};
  cfg.transitions.assign(12, {});
  for (NodeId from = 0; from < 12; ++from)
    for (NodeId to : adjacency[from])
      cfg.transitions[from].push_back(TransitionEntry{to, 1.0, 1, 6});
  cfg.min_events = cfg.max_events = 60;  // fixed safety cap for cycles
  return cfg;
}

/// Fixed next-activity rule (v -> v+1 mod n) with random starts and
/// lengths: the fully learnable benchmark.
inline SyntheticConfig deterministic_successor(std::size_t n, std::size_t instances,
                                               std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.instance_count = instances;
  cfg.node_count = n;
  cfg.seed = seed;
  cfg.uniform_random_start = true;
  cfg.min_events = 6;
  cfg.max_events = 10;
  cfg.transitions.assign(n, {});
  for (NodeId v = 0; v < n; ++v)
    cfg.transitions[v].push_back(
        TransitionEntry{static_cast<NodeId>((v + 1) % n), 1.0, 1, 3});
  return cfg;
}

/// Uniformly random successor: the no-signal baseline.
inline SyntheticConfig shuffled_successor(std::size_t n, std::size_t instances,
                                          std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.instance_count = instances;
  cfg.node_count = n;
  cfg.seed = seed;
  cfg.uniform_random_start = true;
  cfg.min_events = 6;
  cfg.max_events = 10;
  cfg.transitions.assign(n, {});
  for (NodeId v = 0; v < n; ++v)
    for (NodeId w = 0; w < n; ++w)
      if (w != v)
        cfg.transitions[v].push_back(TransitionEntry{w, 1.0, 1, 3});
  return cfg;
}

}  // namespace presets

}  // namespace tpnm
