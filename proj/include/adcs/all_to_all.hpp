#pragma once

// All-to-all exchange of short messages in an anonymous dynamic network.
// Nodes first count themselves with RMC, then repeatedly discover the
// largest undelivered message bit by bit (flooding match1, and match0 when
// no 1 exists) and count its holders with the multiplicity protocol.

#include "adcs/multiplicity.hpp"
#include "adcs/rmc.hpp"

#include <map>

namespace adcs {

/// How raw bit strings become equal-width node inputs.
///   fixed_width: left zero-padding to ceil(log2 n) bits; raw strings that
///     pad to the same value are rejected.
///   length_prefixed: [length][raw][zero fill], total ceil(log2 n) +
///     bit_length(ceil(log2 n)) bits; injective for every raw length.
///   automatic: fixed_width when every raw string already has full width,
///     otherwise length_prefixed.
enum class MessageEncoding { fixed_width, length_prefixed, automatic };

struct InputMessage {
  std::string bits;  // '0'/'1', most significant first

  friend auto operator<=>(const InputMessage&, const InputMessage&) = default;
};

/// Width in bits of a canonical input for a system of n nodes.
std::size_t message_width(std::uint64_t n, MessageEncoding encoding);
MessageEncoding resolve_encoding(const std::vector<std::string>& raw, std::uint64_t n, MessageEncoding encoding);
InputMessage canonicalize(const std::string& raw, std::uint64_t n, MessageEncoding encoding);
/// Canonicalizes a whole input vector, rejecting collisions of distinct raw strings.
std::vector<InputMessage> canonicalize_all(const std::vector<std::string>& raw, std::uint64_t n,
                                           MessageEncoding encoding);
/// Inverse of canonicalize for an already resolved encoding.
std::optional<std::string> decode_message(const InputMessage& m, std::uint64_t n, MessageEncoding encoding);

struct A2ANodeState {
  enum class Stage : std::uint8_t { counting, discovery, multiplicity, finished };

  Stage stage = Stage::counting;
  RmcNodeState rmc;
  InputMessage input;
  std::uint64_t n = 0;  // as counted
  std::uint64_t width = 0;
  std::uint64_t r_prime = 0;
  std::shared_ptr<const MultParams> mult;

  bool delivered = false;
  bool match = false, match0 = false, match1 = false;
  bool zero_pass = false;  // currently flooding match0
  std::uint64_t epoch = 0;
  std::uint64_t index = 1;  // bit being discovered, 1-based
  std::uint64_t round = 0;  // rounds executed in the current flood or count
  std::string new_message;
  Int phi;
  std::vector<std::pair<std::string, std::uint64_t>> external_output;
};

class AllToAllProtocol {
 public:
  using State = A2ANodeState;

  AllToAllProtocol(std::uint64_t ell, std::uint32_t T, Rational epsilon, std::optional<Rational> i_min,
                   ReducedMode reduced, MessageEncoding encoding);

  State initial_state(Role role, InputMessage input) const;

  void emit(const State& s, WireMessage& out) const;
  void step(State& s, Inbox in) const;
  bool terminated(const State& s) const { return s.stage == State::Stage::finished; }
  AuditTag audit_tag(const State& s) const;
  NodeView view(const State& s) const;

  std::uint64_t uniform_rounds_ahead(const State& s) const;
  bool same_dynamics(const State& a, const State& b) const;
  void advance(State& s, std::uint64_t m) const;
  bool frozen(std::span<const State> all, std::size_t n) const;
  GossipBatchResult run_batch(std::span<State> all, const BatchRequest& req) const;

  const RmcProtocol& rmc() const { return rmc_; }
  std::shared_ptr<const MultParams> mult_params(std::uint64_t n) const;

 private:
  void begin_discovery_epoch(State& s) const;
  void begin_phase(State& s) const;
  void next_index(State& s) const;

  RmcProtocol rmc_;
  std::uint64_t ell_;
  std::uint32_t T_;
  std::optional<Rational> i_min_;
  ReducedMode reduced_;
  MessageEncoding encoding_;
  std::shared_ptr<std::map<std::uint64_t, std::shared_ptr<const MultParams>>> mult_cache_;
  mutable Int sum_, scratch_;
};

constexpr std::uint64_t kDiscoveryAuditBase = std::uint64_t{1} << 40;
constexpr std::uint64_t kMultiplicityAuditBase = std::uint64_t{2} << 40;

struct A2ARunOptions {
  Rational epsilon = 1;
  ReducedMode reduced;
  SimOptions sim;
  std::vector<Role> roles;
  MessageEncoding encoding = MessageEncoding::automatic;
};

struct A2ARunResult {
  /// Per node: raw message -> count.
  std::vector<std::map<std::string, std::uint64_t>> outputs;
  /// Per node: canonical messages with counts, in discovery order.
  std::vector<std::vector<std::pair<std::string, std::uint64_t>>> discovery;
  std::vector<std::uint64_t> counted_n;
  std::uint64_t rounds = 0;
  MessageEncoding encoding = MessageEncoding::fixed_width;
  CongestionReport congestion;
  SimStats stats;
  bool reduced = false;
};

A2ARunResult all_to_all(const std::vector<std::string>& messages, const SystemConfig& config,
                        const EvolvingSchedule& schedule, const A2ARunOptions& options = {});

}  // namespace adcs
