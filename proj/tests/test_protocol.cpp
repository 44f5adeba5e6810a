#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "relayabc/errors.hpp"
#include "relayabc/protocol.hpp"
#include "support.hpp"

using namespace relayabc;

namespace {

StateRecord signed_record(const KeyRing& ring, NodeId origin, double value, Marker marker) {
  return {origin, value, marker, ring.sign(origin, value, marker)};
}

LocalView fresh_view(const KeyRing& ring, NodeId owner, std::size_t m, double value) {
  return LocalView::initial(owner, m, value, ring.sign(owner, value, kInitialMarker), 0.0);
}

}  // namespace

TEST_CASE("trimmed mean examples") {
  const std::vector<double> a{1, 2, 3, 10};
  CHECK(trimmed_mean(a, 1) == 2.5);
  const std::vector<double> b{-5, 0, 1, 2, 3, 4, 100};
  CHECK(trimmed_mean(b, 2) == oracle::trimmed_mean(b, 2));
  CHECK(trimmed_mean(b, 2) == 2.0);
  const std::vector<double> same(7, 4.25);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(trimmed_mean(same, k) == 4.25);
  CHECK_THROWS_AS(trimmed_mean(a, 2), BadCardinality);
  const std::vector<double> bad{1, INFINITY, 2};
  CHECK_THROWS_AS(trimmed_mean(bad, 1), std::invalid_argument);
}

TEST_CASE("property: trimmed mean equals the repeated-extraction oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t b = rng() % 4;
    const std::size_t m = 2 * b + 1 + rng() % 6;
    std::vector<double> v(m);
    for (auto& x : v) x = static_cast<double>(static_cast<int>(rng() % 21) - 10);  // ties on purpose
    CHECK(trimmed_mean(v, b) == doctest::Approx(oracle::trimmed_mean(v, b)).epsilon(1e-12));
  }
}

TEST_CASE("trim outcome partitions entries and breaks ties by origin") {
  std::vector<TrimEntry> e{{0, 5.0, 1}, {1, 5.0, 1}, {2, -1.0, 1}, {3, 9.0, 1}, {4, 5.0, 1}};
  const auto out = trim_entries(e, 1);
  REQUIRE(out.low().size() == 1);
  REQUIRE(out.high().size() == 1);
  REQUIRE(out.survivors().size() == 3);
  CHECK(out.low()[0].origin == 2);
  CHECK(out.high()[0].origin == 3);
  CHECK(out.survivors()[0].origin == 0);
  CHECK(out.survivors()[2].origin == 4);
  CHECK(out.survived(1));
  CHECK_FALSE(out.survived(3));
  CHECK(out.mean == 5.0);
}

TEST_CASE("merge keeps the freshest verified record") {
  const KeyRing ring(SchemeKind::KeyedHash, 4, 7);
  LocalView view = fresh_view(ring, 0, 4, 1.0);
  view.records[1] = signed_record(ring, 1, 3.0, 2);

  SUBCASE("fresher incoming wins") {
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 1, 4.0, 4)}}};
    const auto merged = merge_views(view, in, 5, ring.verifier());
    CHECK(merged.records[1].marker == 4);
    CHECK(merged.records[1].value == 4.0);
  }
  SUBCASE("tampered value is rejected") {
    auto r = signed_record(ring, 1, 4.0, 4);
    r.value = 4.5;
    MergeStats stats;
    const std::vector<InboundMessage> in{{1, {r}}};
    const auto merged = merge_views(view, in, 5, ring.verifier(), &stats);
    CHECK(merged.records[1] == view.records[1]);
    CHECK(stats.bad_signature == 1);
  }
  SUBCASE("marker equal to the current iteration is rejected") {
    MergeStats stats;
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 1, 4.0, 5)}}};
    const auto merged = merge_views(view, in, 5, ring.verifier(), &stats);
    CHECK(merged.records[1].marker == 2);
    CHECK(stats.bad_marker == 1);
  }
  SUBCASE("equal marker keeps the held record") {
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 1, -8.0, 2)}}};
    CHECK(merge_views(view, in, 5, ring.verifier()).records[1].value == 3.0);
  }
  SUBCASE("the owner slot is never overwritten") {
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 0, 50.0, 3)}}};
    CHECK(merge_views(view, in, 5, ring.verifier()).records[0] == view.records[0]);
  }
  SUBCASE("senders outside the allowed set are ignored") {
    const std::vector<NodeId> allowed{2, 3};
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 1, 4.0, 4)}}};
    CHECK(merge_views(view, in, 5, ring.verifier(), nullptr, &allowed).records[1].marker == 2);
  }
  SUBCASE("stale and non-finite records never win") {
    const std::vector<InboundMessage> in{{1, {signed_record(ring, 1, 0.0, 1), signed_record(ring, 2, INFINITY, 1)}}};
    MergeStats stats;
    const auto merged = merge_views(view, in, 5, ring.verifier(), &stats);
    CHECK(merged.records[1].marker == 2);
    CHECK_FALSE(merged.records[2].held());
    CHECK(stats.bad_value == 1);
  }
}

TEST_CASE("property: merge result does not depend on inbox order") {
  const std::size_t m = 5;
  const KeyRing ring(SchemeKind::KeyedHash, m, 3);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    LocalView view = fresh_view(ring, 0, m, 0.5);
    std::vector<InboundMessage> inbox;
    for (NodeId s = 1; s < m; ++s) {
      InboundMessage msg{s, {}};
      for (int k = 0; k < 4; ++k) {
        const auto origin = static_cast<NodeId>(rng() % m);
        const Marker marker = static_cast<Marker>(rng() % 6) - 1;
        auto r = signed_record(ring, origin, static_cast<double>(rng() % 5), marker);
        if (rng() % 5 == 0) r.value += 1.0;  // some fail verification
        msg.records.push_back(r);
      }
      inbox.push_back(msg);
    }
    const auto ref = merge_views(view, inbox, 4, ring.verifier());
    for (int p = 0; p < 5; ++p) {
      std::shuffle(inbox.begin(), inbox.end(), rng);
      for (auto& msg : inbox) std::shuffle(msg.records.begin(), msg.records.end(), rng);
      CHECK(merge_views(view, inbox, 4, ring.verifier()) == ref);
    }
  }
}

TEST_CASE("honest step before and at D") {
  const std::size_t m = 4;
  const KeyRing ring(SchemeKind::KeyedHash, m, 11);
  const LocalView start = fresh_view(ring, 0, m, 0.0);
  const std::vector<InboundMessage> inbox{
      {1, {signed_record(ring, 1, 1.0, kInitialMarker)}},
      {2, {signed_record(ring, 2, 2.0, kInitialMarker)}},
      {3, {signed_record(ring, 3, 100.0, kInitialMarker)}},
  };
  const std::size_t D = 2;
  StepContext ctx{0, D, 1, &ring, nullptr};

  const auto early = step_honest_node(start, inbox, ctx);
  CHECK_FALSE(early.trim.has_value());
  CHECK(early.view.own() == start.own());
  ctx.t = 1;
  const auto early2 = step_honest_node(early.view, inbox, ctx);
  CHECK(early2.broadcast == early.broadcast);

  ctx.t = static_cast<Marker>(D);
  const auto at_d = step_honest_node(early2.view, inbox, ctx);
  REQUIRE(at_d.trim.has_value());
  CHECK(at_d.view.own().value == 1.5);
  CHECK(at_d.view.own().marker == static_cast<Marker>(D));
  CHECK(ring.verifier().verify(0, 1.5, static_cast<Marker>(D), at_d.view.own().signature));
  CHECK(at_d.merged.own() == early2.view.own());
}

TEST_CASE("empty inbox still updates from defaults") {
  const KeyRing ring(SchemeKind::KeyedHash, 4, 1);
  const LocalView start = fresh_view(ring, 2, 4, 9.0);
  const StepContext ctx{1, 1, 1, &ring, nullptr};
  const auto out = step_honest_node(start, {}, ctx);
  REQUIRE(out.trim.has_value());
  // Entries {0, 0, 9, 0} trimmed by one on each side.
  CHECK(out.view.own().value == 0.0);
  CHECK(out.broadcast.size() == 1);
}

TEST_CASE("wire size and payload contents") {
  const KeyRing ring(SchemeKind::KeyedHash, 3, 1);
  const auto r = signed_record(ring, 1, 1.0, 0);
  CHECK(record_wire_bytes(r) == 20 + r.signature.size());
  LocalView v = fresh_view(ring, 0, 3, 1.0);
  CHECK(v.payload().size() == 1);
  v.records[1] = r;
  CHECK(v.payload().size() == 2);
}
