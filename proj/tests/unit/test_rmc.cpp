#include "adcs/rmc.hpp"

#include <doctest.h>

using namespace adcs;

namespace {

Inbox inbox_of(const std::vector<WireMessage>& msgs, std::vector<const WireMessage*>& ptrs) {
  ptrs.clear();
  for (const auto& m : msgs) ptrs.push_back(&m);
  return Inbox(ptrs.data(), ptrs.size());
}

WireMessage gossip(Status st, const Int& phi) {
  WireMessage m;
  m.kind = MsgKind::rmc_gossip;
  m.status = st;
  m.potential = phi;
  return m;
}

}  // namespace

TEST_CASE("initial states") {
  RmcProtocol p(1, 1, 1);
  const auto sup = p.initial_state(Role::supervisor);
  const auto sub = p.initial_state(Role::supervised);
  CHECK(sup.k == 2);
  CHECK(sup.status == Status::probing);
  CHECK(sup.phi == 0);
  CHECK(sub.phi == sub.params->denominator);
  CHECK(sub.params->d == 8);
}

TEST_CASE("probing node with no neighbors keeps its potential") {
  RmcProtocol p(1, 1, 1);
  auto s = p.initial_state(Role::supervised);
  const Int before = s.phi;
  std::vector<const WireMessage*> ptrs;
  p.step(s, inbox_of({}, ptrs));
  CHECK(s.phi == before);
  CHECK(s.status == Status::probing);
  CHECK(s.round == 2);
}

TEST_CASE("receiving d/2 or more potentials raises the alarm") {
  RmcProtocol p(1, 1, 1);
  auto s = p.initial_state(Role::supervised);
  const Int D = s.params->denominator;
  std::vector<WireMessage> msgs(4, gossip(Status::probing, Int(0)));  // d = 8
  std::vector<const WireMessage*> ptrs;
  p.step(s, inbox_of(msgs, ptrs));
  CHECK(s.status == Status::low);
  CHECK(s.phi == D);

  auto t = p.initial_state(Role::supervised);
  msgs.resize(3);
  p.step(t, inbox_of(msgs, ptrs));
  CHECK(t.status == Status::probing);
  CHECK(t.phi == D - 3 * (D / 8));
}

TEST_CASE("a non-probing neighbor pins the potential at ell") {
  RmcProtocol p(2, 1, 1);
  auto s = p.initial_state(Role::supervisor);
  CHECK(s.phi == 0);
  std::vector<const WireMessage*> ptrs;
  p.step(s, inbox_of({gossip(Status::low, Int(0))}, ptrs));
  CHECK(s.status == Status::low);
  CHECK(s.phi == 2 * s.params->denominator);
  // Once alarmed, the potential stays pinned.
  p.step(s, inbox_of({gossip(Status::probing, Int(0))}, ptrs));
  CHECK(s.phi == 2 * s.params->denominator);
}

TEST_CASE("gossip rounds reject foreign messages") {
  RmcProtocol p(1, 1, 1);
  auto s = p.initial_state(Role::supervised);
  WireMessage status_only;
  status_only.kind = MsgKind::rmc_status;
  std::vector<const WireMessage*> ptrs;
  CHECK_THROWS_AS(p.step(s, inbox_of({status_only}, ptrs)), ProtocolViolation);
  auto t = p.initial_state(Role::supervised);
  CHECK_THROWS_AS(p.step(t, inbox_of({gossip(Status::done, Int(0))}, ptrs)), ProtocolViolation);
}

TEST_CASE("n=2 on K2 counts 2") {
  const auto s = EvolvingSchedule::static_graph(ConstituentGraph::complete(2), 1);
  const auto r = rmc_run({2, 1, 1, {}}, s);
  CHECK(r.outputs == std::vector<std::uint64_t>{2, 2});
  REQUIRE(r.estimate_path.size() == 1);
  CHECK(r.estimate_path[0].outcome == Status::done);
  CHECK(Int(static_cast<unsigned long>(r.rounds)) == r.round_bound);
  CHECK(r.congestion.clean());
}

TEST_CASE("n=3 on a triangle follows 2 low, 4 high, 3 done") {
  const auto s = EvolvingSchedule::static_graph(ConstituentGraph::complete(3), 1);
  const auto r = rmc_run({3, 1, 1, {}}, s);
  CHECK(r.outputs == std::vector<std::uint64_t>(3, 3));
  REQUIRE(r.estimate_path.size() == 3);
  CHECK(r.estimate_path[0].k == 2);
  CHECK(r.estimate_path[0].outcome == Status::low);
  CHECK(r.estimate_path[1].k == 4);
  CHECK(r.estimate_path[1].outcome == Status::high);
  CHECK(r.estimate_path[2].k == 3);
  CHECK(r.estimate_path[2].outcome == Status::done);
  Int total = 0;
  for (const auto& e : r.estimate_path) total += e.epoch_rounds;
  CHECK(total == r.round_bound);
  CHECK(Int(static_cast<unsigned long>(r.rounds)) == r.round_bound);
  // All nodes saw the same epoch sequence.
  for (const auto& h : r.histories) {
    REQUIRE(h.size() == 3);
    CHECK(h[2].outcome == Status::done);
  }
}

TEST_CASE("n=5, ell=2 on matching alternation with T=2 counts 5") {
  const auto s = EvolvingSchedule::matching_alternation(5, 2);
  const auto r = rmc_run({5, 2, 2, {}}, s);
  CHECK(r.outputs == std::vector<std::uint64_t>(5, 5));
  CHECK(r.congestion.clean());
}

TEST_CASE("role placement does not change outputs") {
  const auto s = EvolvingSchedule::static_graph(ConstituentGraph::path(4), 1);
  RmcRunOptions a, b;
  b.roles = {Role::supervised, Role::supervised, Role::supervisor, Role::supervised};
  const auto ra = rmc_run({4, 1, 1, {}}, s, a);
  const auto rb = rmc_run({4, 1, 1, {}}, s, b);
  CHECK(ra.outputs == std::vector<std::uint64_t>(4, 4));
  CHECK(rb.outputs == ra.outputs);
  CHECK(rb.rounds == ra.rounds);
}

TEST_CASE("fast-forward does not change results") {
  const auto s = EvolvingSchedule::random_t_connected(3, 1, 7);
  RmcRunOptions slow;
  slow.reduced = {16, 256, 1};
  slow.sim.fast_forward = false;
  RmcRunOptions fast = slow;
  fast.sim.fast_forward = true;
  const auto a = rmc_run({3, 1, 1, {}}, s, slow);
  const auto b = rmc_run({3, 1, 1, {}}, s, fast);
  CHECK(a.outputs == b.outputs);
  CHECK(a.rounds == b.rounds);
  CHECK(a.reduced);
  CHECK(b.stats.skipped_rounds + b.stats.stepped_rounds == b.rounds);
}

TEST_CASE("configuration validation") {
  const auto s = EvolvingSchedule::static_graph(ConstituentGraph::complete(3), 1);
  CHECK_THROWS_AS(rmc_run({3, 3, 1, {}}, s), InfeasibleParameterError);
  CHECK_THROWS_AS(rmc_run({3, 0, 1, {}}, s), InfeasibleParameterError);
  CHECK_THROWS_AS(rmc_run({4, 1, 1, {}}, s), Error);
  RmcRunOptions opt;
  opt.sim.round_cap = 10;
  CHECK_THROWS_AS(rmc_run({3, 1, 1, {}}, s, opt), RoundCapExceeded);
}
