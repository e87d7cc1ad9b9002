#pragma once

// Counting the holders of one message: holders start with potential 1, the
// rest with 0, everyone runs the truncated exchange for r'' rounds and
// reports round(phi * n).

#include "adcs/expansion.hpp"
#include "adcs/numerics.hpp"
#include "adcs/params.hpp"
#include "adcs/simulator.hpp"

#include <memory>

namespace adcs {

struct MultNodeState {
  Int phi;  // numerator at scale d^c
  std::uint64_t round = 0;
  std::optional<std::uint64_t> result;
};

/// round(num * n / d^c), ties upward.
std::uint64_t scaled_round_half_up(const Int& num, std::uint64_t n, const Int& denominator);

class MultiplicityProtocol {
 public:
  using State = MultNodeState;

  /// `n` is the node count the nodes believe in (the RMC output inside the
  /// all-to-all protocol).
  MultiplicityProtocol(std::shared_ptr<const MultParams> params, std::uint64_t n, std::uint64_t ell = 1);

  State initial_state(bool holder) const;

  void emit(const State& s, WireMessage& out) const {
    out.kind = MsgKind::potential;
    out.potential = s.phi;
  }
  void step(State& s, Inbox in) const;
  bool terminated(const State& s) const { return s.result.has_value(); }
  AuditTag audit_tag(const State&) const { return {0, bound_}; }
  NodeView view(const State& s) const;

  std::uint64_t uniform_rounds_ahead(const State& s) const;
  bool same_dynamics(const State& a, const State& b) const { return a.phi == b.phi; }
  void advance(State& s, std::uint64_t m) const { s.round += m; }
  bool frozen(std::span<const State> all, std::size_t n) const;
  GossipBatchResult run_batch(std::span<State> all, const BatchRequest& req) const;

  const MultParams& params() const { return *params_; }
  std::size_t bound() const { return bound_; }

 private:
  std::shared_ptr<const MultParams> params_;
  std::uint64_t n_;
  std::size_t bound_;
  mutable Int sum_, scratch_;
};

struct MultRunOptions {
  std::optional<Rational> i_min;
  ReducedMode reduced;
  SimOptions sim;
};

struct MultiplicityResult {
  std::vector<std::uint64_t> outputs;
  std::uint64_t rounds = 0;
  MultParams params;
  CongestionReport congestion;
  SimStats stats;
};

MultiplicityResult multiplicity_run(const std::vector<bool>& holders, std::uint64_t n,
                                    const EvolvingSchedule& schedule, const MultRunOptions& options = {});

/// Message-level form: holders are the nodes whose message equals `target`.
MultiplicityResult multiplicity_run(const std::vector<std::string>& messages, const std::string& target,
                                    std::uint64_t n, const EvolvingSchedule& schedule,
                                    const MultRunOptions& options = {});

}  // namespace adcs
