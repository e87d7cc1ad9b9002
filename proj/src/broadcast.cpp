#include "adcs/broadcast.hpp"

namespace adcs {

void BroadcastProtocol::step(State& s, Inbox in) const {
  for (const auto& m : in) {
    if (m.kind != MsgKind::flag) throw Error("broadcast: unexpected message kind");
    s.flag = s.flag || m.flag;
  }
  ++s.round;
}

NodeView BroadcastProtocol::view(const State& s) const {
  NodeView v;
  v.stage = "broadcast";
  v.round_in_phase = s.round;
  v.status = s.flag ? "true" : "false";
  return v;
}

bool BroadcastProtocol::frozen(std::span<const State> all, std::size_t) const {
  for (const auto& s : all)
    if (s.flag != all.front().flag) return false;
  return true;
}

BroadcastResult broadcast_or(const std::vector<bool>& bits, const EvolvingSchedule& schedule, std::uint64_t start,
                             std::uint64_t rounds, SimOptions sim) {
  if (rounds < 1) throw Error("broadcast_or: rounds >= 1 required");
  std::vector<BroadcastNodeState> init(bits.size());
  for (std::size_t v = 0; v < bits.size(); ++v) init[v] = {bits[v], 0, rounds};
  sim.start_round = start;
  auto res = simulate(BroadcastProtocol{}, std::move(init), schedule, sim);
  BroadcastResult out;
  for (const auto& s : res.states) out.outputs.push_back(s.flag);
  out.rounds = res.stats.rounds;
  out.congestion = std::move(res.congestion);
  return out;
}

}  // namespace adcs
