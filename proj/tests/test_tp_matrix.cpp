#include <catch2/catch_amalgamated.hpp>

#include "tpnm/ingest.hpp"
#include "tpnm/rng.hpp"
#include "tpnm/tp_matrix.hpp"

using namespace tpnm;

namespace {

EventSequence seq_of(std::vector<Event> events, Timestamp delta) {
  EventSequence s;
  s.instance_id = "t";
  s.events = std::move(events);
  s.delta = delta;
  return s;
}

/// Random valid instance over n nodes for property tests.
EventSequence random_instance(Rng& rng, std::size_t n) {
  EventSequence s;
  s.instance_id = "r";
  const auto len = rng.uniform_int(1, 10);
  Timestamp t = rng.uniform_int(0, 50);
  for (std::int64_t i = 0; i < len; ++i) {
    s.events.push_back(
        Event{static_cast<NodeId>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)),
              t});
    t += rng.uniform_int(1, 20);
  }
  s.delta = s.events.back().t + rng.uniform_int(0, 30);
  return s;
}

}  // namespace

TEST_CASE("raw temporal matrix, observed and absent branches") {
  // nodes 0,1,2; transition 0 -> 1 at t=10 -> t=25; delta = 40.
  const auto s = seq_of({{0, 10}, {1, 25}}, 40);
  const auto raw = raw_temporal_matrix(s, 3, WeightScheme::TPInitial);

  CHECK(raw.entries(0, 1) == 15.0);  // |10 - 25|
  CHECK(raw.entries(0, 2) == 30.0);  // absent: |10 - 40|
  CHECK(raw.entries(1, 0) == 15.0);  // absent from 1: |25 - 40|
  CHECK(raw.entries(1, 2) == 15.0);
  // Never-seen node 2 references the instance start.
  CHECK(raw.entries(2, 0) == 30.0);  // |10 - 40|
  // Self time-distance is zero, normalizing the diagonal to 1.
  CHECK(raw.entries(0, 0) == 0.0);
  CHECK(raw.entries(2, 2) == 0.0);
}

TEST_CASE("raw temporal matrix rejects the adjacency scheme") {
  const auto s = seq_of({{0, 10}}, 10);
  CHECK_THROWS_AS(raw_temporal_matrix(s, 2, WeightScheme::Adjacency), SchemeMismatch);
}

TEST_CASE("TP-initial links the initial event to every later event") {
  const auto s = seq_of({{0, 0}, {1, 5}, {2, 12}}, 15);
  const auto raw = raw_temporal_matrix(s, 3, WeightScheme::TPInitial);
  CHECK(raw.entries(0, 2) == 12.0);  // initial -> later, not consecutive

  const auto recent = raw_temporal_matrix(s, 3, WeightScheme::TPRecent);
  CHECK(recent.entries(0, 2) == 15.0);  // absent under TP-recent: |0 - 15|
}

TEST_CASE("TP-recent references the latest occurrence") {
  // Node 0 occurs at 0 and again at 12.
  const auto s = seq_of({{0, 0}, {1, 5}, {0, 12}, {2, 20}}, 25);
  const auto initial = raw_temporal_matrix(s, 3, WeightScheme::TPInitial);
  const auto recent = raw_temporal_matrix(s, 3, WeightScheme::TPRecent);
  // Observed consecutive transition 0 -> 1.
  CHECK(initial.entries(0, 1) == 5.0);   // earliest occurrence: |0 - 5|
  CHECK(recent.entries(0, 1) == 7.0);    // latest occurrence: |12 - 5|
  // Absent row entries use the reference-to-delta distance.
  CHECK(initial.entries(0, 0) == 0.0);
  CHECK(recent.entries(1, 2) == 20.0);   // absent pair: |5 - 25|
}

TEST_CASE("normalize_tp hand values") {
  RawTemporalMatrix raw;
  raw.entries = Eigen::MatrixXd::Zero(2, 2);

  SECTION("identity case: a(i,i) = a(i,j) -> 1") {
    raw.entries << 5, 5, 7, 7;
    const auto tp = normalize_tp(raw);
    CHECK(tp(0, 1) == 1.0);
    CHECK(tp(1, 0) == 1.0);
  }
  SECTION("a(i,i)=5, a(i,j)=7 -> 1/3") {
    raw.entries << 5, 7, 0, 0;
    const auto tp = normalize_tp(raw);
    CHECK(tp(0, 1) == Catch::Approx(1.0 / 3.0));
  }
  SECTION("a(i,i)=0, a(i,j)=1e6 stays strictly positive") {
    raw.entries << 0, 1e6, 0, 0;
    const auto tp = normalize_tp(raw);
    CHECK(tp(0, 1) == Catch::Approx(1e-6).epsilon(1e-5));
    CHECK(tp(0, 1) > 0.0);
  }
}

TEST_CASE("normalize_tp is monotone in the residual gap") {
  RawTemporalMatrix a, b;
  a.entries = Eigen::MatrixXd::Zero(2, 2);
  b.entries = Eigen::MatrixXd::Zero(2, 2);
  a.entries << 5, 9, 0, 0;
  b.entries << 5, 13, 0, 0;
  CHECK(normalize_tp(b)(0, 1) < normalize_tp(a)(0, 1));
}

TEST_CASE("adjacency baseline") {
  SECTION("direct observation") {
    const auto s = seq_of({{1, 10}, {2, 20}}, 20);
    const auto adj = adjacency_matrix(s, 4);
    CHECK(adj.entries(1, 2) == 1.0);
    CHECK(adj.entries(1, 3) == 0.0);
    CHECK(adj.entries(2, 1) == 0.0);
  }
  SECTION("single event -> all zero") {
    const auto s = seq_of({{0, 10}}, 10);
    CHECK(adjacency_matrix(s, 3).entries.isZero(0.0));
  }
  SECTION("indicator of the observed-transition set (brute force)") {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
      const auto s = random_instance(rng, 5);
      const auto adj = adjacency_matrix(s, 5);
      Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(5, 5);
      for (std::size_t i = 0; i + 1 < s.events.size(); ++i)
        expected(s.events[i].node, s.events[i + 1].node) = 1.0;
      CHECK(adj.entries == expected);
    }
  }
}

TEST_CASE("workflow-graph instance rows match the transition table") {
  // First row of a branching workflow: start may hand over to 1 or 2 only.
  const auto ds = synthesize(presets::branching_workflow(40, 0.0, 3));
  for (const auto& seq : ds.instances) {
    const auto adj = adjacency_matrix(seq, 12);
    CHECK(adj.entries(0, 1) + adj.entries(0, 2) >= 1.0);
    for (int j = 3; j < 12; ++j) CHECK(adj.entries(0, j) == 0.0);
    // Node 3 (appointment set) is only ever followed by 4.
    for (int j = 0; j < 12; ++j)
      if (j != 4) CHECK(adj.entries(3, j) == 0.0);
  }
}

TEST_CASE("TP matrices stay in (0,1] with unit diagonal for both schemes") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = random_instance(rng, 6);
    for (const auto scheme : {WeightScheme::TPInitial, WeightScheme::TPRecent}) {
      const auto tp = tp_matrix(s, 6, scheme);  // ctor enforces the invariants
      for (Eigen::Index i = 0; i < 6; ++i) CHECK(tp(i, i) == 1.0);
    }
  }
}

TEST_CASE("timestamp shift leaves the TP matrix bit-identical") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = random_instance(rng, 6);
    EventSequence shifted = s;
    const Timestamp offset = rng.uniform_int(-1000000, 1000000);
    for (auto& ev : shifted.events) ev.t += offset;
    shifted.delta += offset;
    for (const auto scheme : {WeightScheme::TPInitial, WeightScheme::TPRecent}) {
      const auto a = tp_matrix(s, 6, scheme);
      const auto b = tp_matrix(shifted, 6, scheme);
      CHECK(a.values() == b.values());
    }
  }
}

TEST_CASE("TPMatrix constructor rejects out-of-range entries") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.5, 1.0;  // zero entry
  CHECK_THROWS_AS(TPMatrix(bad), DomainError);
  Eigen::MatrixXd bad_diag(2, 2);
  bad_diag << 0.5, 1.0, 1.0, 1.0;  // diagonal != 1
  CHECK_THROWS_AS(TPMatrix(bad_diag), DomainError);
}
