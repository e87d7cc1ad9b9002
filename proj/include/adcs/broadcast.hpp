#pragma once

// Flooding of a boolean: every round each node sends its flag and ORs in
// what it hears.

#include "adcs/simulator.hpp"

namespace adcs {

struct BroadcastNodeState {
  bool flag = false;
  std::uint64_t round = 0;  // rounds executed
  std::uint64_t rounds = 0;
};

class BroadcastProtocol {
 public:
  using State = BroadcastNodeState;

  void emit(const State& s, WireMessage& out) const {
    out.kind = MsgKind::flag;
    out.flag = s.flag;
  }
  void step(State& s, Inbox in) const;
  bool terminated(const State& s) const { return s.round >= s.rounds; }
  AuditTag audit_tag(const State&) const { return {0, congestion_bound(1, 1, 0)}; }
  NodeView view(const State& s) const;

  std::uint64_t uniform_rounds_ahead(const State& s) const { return s.rounds - s.round; }
  bool same_dynamics(const State& a, const State& b) const { return a.flag == b.flag; }
  void advance(State& s, std::uint64_t m) const { s.round += m; }
  bool frozen(std::span<const State> all, std::size_t n) const;
};

struct BroadcastResult {
  std::vector<bool> outputs;
  std::uint64_t rounds = 0;
  CongestionReport congestion;
};

/// Runs `rounds` flooding rounds starting at global round `start`.
BroadcastResult broadcast_or(const std::vector<bool>& bits, const EvolvingSchedule& schedule, std::uint64_t start,
                             std::uint64_t rounds, SimOptions sim = {});

}  // namespace adcs
