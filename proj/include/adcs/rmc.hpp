#pragma once

// Restricted Methodical Counting: supervisors and supervised nodes estimate
// n by mass distribution. Each epoch fixes an estimate k, runs p phases of r
// gossip rounds, lets supervisors classify their accumulated mass, spreads
// the verdict for d rounds, then doubles k or bisects.

#include "adcs/numerics.hpp"
#include "adcs/params.hpp"
#include "adcs/simulator.hpp"

#include <map>
#include <memory>

namespace adcs {

struct ProtocolViolation : Error {
  using Error::Error;
};

enum class Role : std::uint8_t { supervisor, supervised };

/// What one node saw during one epoch. Used by the lemma checks.
struct RmcEpochRecord {
  std::uint64_t epoch = 0;
  std::uint64_t k = 0;
  bool phase1_over_tau = false;
  std::optional<Status> status_after_phase2;
  Status status_after_gossip = Status::probing;
  std::optional<Int> rho;  // supervisors, numerator at scale d^c
  Status outcome = Status::probing;
};

struct RmcNodeState {
  enum class Stage : std::uint8_t { gossip, disseminate, finished };

  Role role = Role::supervised;
  std::uint64_t k = 0;
  std::uint64_t min = 0;
  std::optional<std::uint64_t> max;
  Status status = Status::probing;
  Int phi;
  Int rho;
  std::shared_ptr<const RmcParams> params;
  Stage stage = Stage::gossip;
  std::uint64_t epoch = 0;
  std::uint64_t phase = 1;
  std::uint64_t round = 1;   // within the phase, 1-based
  std::uint64_t dround = 0;  // within dissemination, 1-based
  std::uint64_t output = 0;  // the estimate once finished
  std::vector<RmcEpochRecord> history;
};

class RmcProtocol {
 public:
  using State = RmcNodeState;

  RmcProtocol(std::uint64_t ell, std::uint32_t T, Rational epsilon, std::optional<Rational> i_min = std::nullopt,
              ReducedMode reduced = {});

  State initial_state(Role role) const;
  std::shared_ptr<const RmcParams> params_for(std::uint64_t k) const;

  void emit(const State& s, WireMessage& out) const;
  void step(State& s, Inbox in) const;
  bool terminated(const State& s) const { return s.stage == State::Stage::finished; }
  AuditTag audit_tag(const State& s) const;
  NodeView view(const State& s) const;

  std::uint64_t uniform_rounds_ahead(const State& s) const;
  bool same_dynamics(const State& a, const State& b) const;
  void advance(State& s, std::uint64_t rounds) const;
  bool frozen(std::span<const State> all, std::size_t n) const;
  bool frozen_ptrs(const std::vector<const State*>& all, std::size_t n) const;
  GossipBatchResult run_batch(std::span<State> all, const BatchRequest& req) const;
  GossipBatchResult run_batch_ptrs(const std::vector<State*>& all, const BatchRequest& req) const;

  std::uint64_t ell() const { return ell_; }

 private:
  void start_epoch(State& s) const;
  void end_phase(State& s) const;
  void end_epoch(State& s) const;

  std::uint64_t ell_;
  std::uint32_t T_;
  Rational epsilon_;
  std::optional<Rational> i_min_;
  ReducedMode reduced_;
  std::shared_ptr<std::map<std::uint64_t, std::shared_ptr<const RmcParams>>> cache_;
  mutable Int sum_, scratch_;
};

struct SystemConfig {
  std::uint64_t n = 0;
  std::uint64_t ell = 1;
  std::uint32_t T = 1;
  std::optional<Rational> i_min_hint;

  void validate() const;
};

struct RmcRunOptions {
  Rational epsilon = 1;
  ReducedMode reduced;
  SimOptions sim;
  /// Role per simulator label; empty means labels 0..ell-1 supervise.
  std::vector<Role> roles;
};

struct EstimateStep {
  std::uint64_t epoch = 0;
  std::uint64_t k = 0;
  Status outcome = Status::probing;
  std::uint64_t p = 0, r = 0, d = 0;
  std::uint32_t c = 0;
  Int epoch_rounds;  // p * r + d
};

struct RmcRunResult {
  std::vector<std::uint64_t> outputs;
  std::uint64_t rounds = 0;
  std::vector<EstimateStep> estimate_path;
  Int round_bound;  // sum over the path of p * r + d
  std::vector<Role> roles;
  std::vector<std::vector<RmcEpochRecord>> histories;
  CongestionReport congestion;
  SimStats stats;
  bool reduced = false;
};

RmcRunResult rmc_run(const SystemConfig& config, const EvolvingSchedule& schedule, const RmcRunOptions& options = {});

std::vector<Role> default_roles(std::size_t n, std::uint64_t ell);

}  // namespace adcs
