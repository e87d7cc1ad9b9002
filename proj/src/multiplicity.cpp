#include "adcs/multiplicity.hpp"

namespace adcs {

std::uint64_t scaled_round_half_up(const Int& num, std::uint64_t n, const Int& denominator) {
  const Int twice = 2 * num * Int(static_cast<unsigned long>(n)) + denominator;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), Int(2 * denominator).get_mpz_t());
  return q.get_ui();
}

MultiplicityProtocol::MultiplicityProtocol(std::shared_ptr<const MultParams> params, std::uint64_t n,
                                           std::uint64_t ell)
    : params_(std::move(params)), n_(n), bound_(congestion_bound(ell, params_->d, params_->c)) {}

MultNodeState MultiplicityProtocol::initial_state(bool holder) const {
  State s;
  s.phi = holder ? params_->denominator : Int(0);
  return s;
}

void MultiplicityProtocol::step(State& s, Inbox in) const {
  if (s.result) return;
  const MultParams& P = *params_;
  if (2 * in.size() >= P.d)
    throw DegreeOverflowError("multiplicity: " + std::to_string(in.size()) + " neighbors with d = " +
                              std::to_string(P.d));
  sum_ = 0;
  for (const auto& m : in) {
    if (m.kind != MsgKind::potential) throw Error("multiplicity: unexpected message kind");
    mpz_fdiv_q_ui(scratch_.get_mpz_t(), m.potential.get_mpz_t(), P.d);
    sum_ += scratch_;
  }
  apply_truncated_exchange(s.phi, sum_, in.size(), P.d, scratch_);
  if (++s.round == P.r) s.result = scaled_round_half_up(s.phi, n_, P.denominator);
}

NodeView MultiplicityProtocol::view(const State& s) const {
  NodeView v;
  v.stage = s.result ? "multiplicity-done" : "multiplicity";
  v.round_in_phase = s.round;
  v.block = s.round == 0 ? 0 : (s.round - 1) / params_->T;
  v.phi = potential_string(s.phi, params_->d, params_->c);
  return v;
}

std::uint64_t MultiplicityProtocol::uniform_rounds_ahead(const State& s) const {
  if (s.result) return 0;
  // The last round also computes the result, so it is stepped normally.
  return params_->r - s.round - 1;
}

bool MultiplicityProtocol::frozen(std::span<const State> all, std::size_t n) const {
  const std::uint64_t d = params_->d;
  if (all.empty() || 2 * (n - 1) >= d) return false;
  Int q0, q;
  mpz_fdiv_q_ui(q0.get_mpz_t(), all.front().phi.get_mpz_t(), d);
  for (const auto& s : all) {
    if (s.result) return false;
    mpz_fdiv_q_ui(q.get_mpz_t(), s.phi.get_mpz_t(), d);
    if (q != q0) return false;
  }
  return true;
}

GossipBatchResult MultiplicityProtocol::run_batch(std::span<State> all, const BatchRequest& req) const {
  if (all.empty()) return {};
  for (const auto& s : all)
    if (s.result || s.round != all.front().round) return {};
  std::vector<Int> phi(all.size());
  for (std::size_t v = 0; v < all.size(); ++v) phi[v].swap(all[v].phi);
  GossipBatch b;
  b.d = params_->d;
  b.start_round = req.t;
  b.max_rounds = req.limit;
  b.period = req.period;
  b.cycle_history = req.cycle_history;
  b.adjacency = req.adjacency;
  b.auditor = req.auditor;
  b.audit_key = 0;
  b.bound = bound_;
  b.header_bits = 4;
  const auto res = run_truncated_gossip(phi, b);
  for (std::size_t v = 0; v < all.size(); ++v) {
    all[v].phi.swap(phi[v]);
    all[v].round += res.rounds;
  }
  return res;
}

MultiplicityResult multiplicity_run(const std::vector<bool>& holders, std::uint64_t n,
                                    const EvolvingSchedule& schedule, const MultRunOptions& options) {
  if (holders.size() != n) throw Error("multiplicity_run: holder vector size differs from n");
  auto params = std::make_shared<const MultParams>(derive_mult_params(n, schedule.T(), options.i_min, options.reduced));
  MultiplicityProtocol protocol(params, n);
  std::vector<MultNodeState> init;
  for (bool h : holders) init.push_back(protocol.initial_state(h));
  auto sim = simulate(protocol, std::move(init), schedule, options.sim);
  MultiplicityResult out;
  for (const auto& s : sim.states) out.outputs.push_back(*s.result);
  out.rounds = sim.stats.rounds;
  out.params = *params;
  out.congestion = std::move(sim.congestion);
  out.stats = sim.stats;
  return out;
}

MultiplicityResult multiplicity_run(const std::vector<std::string>& messages, const std::string& target,
                                    std::uint64_t n, const EvolvingSchedule& schedule,
                                    const MultRunOptions& options) {
  std::vector<bool> holders;
  for (const auto& m : messages) holders.push_back(m == target);
  return multiplicity_run(holders, n, schedule, options);
}

}  // namespace adcs
