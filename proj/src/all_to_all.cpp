#include "adcs/all_to_all.hpp"

namespace adcs {

namespace {

std::size_t prefix_width(std::size_t w) { return bit_length(Int(static_cast<unsigned long>(w))); }

std::string to_bits(std::uint64_t value, std::size_t width) {
  std::string out(width, '0');
  for (std::size_t i = 0; i < width; ++i)
    if ((value >> (width - 1 - i)) & 1U) out[i] = '1';
  return out;
}

void check_bits(const std::string& raw) {
  for (char ch : raw)
    if (ch != '0' && ch != '1') throw Error("input message '" + raw + "' is not a bit string");
}

}  // namespace

std::size_t message_width(std::uint64_t n, MessageEncoding encoding) {
  const std::size_t w = std::max<std::uint32_t>(1, ceil_log2(n));
  if (encoding == MessageEncoding::length_prefixed) return w + prefix_width(w);
  return w;
}

MessageEncoding resolve_encoding(const std::vector<std::string>& raw, std::uint64_t n, MessageEncoding encoding) {
  if (encoding != MessageEncoding::automatic) return encoding;
  const std::size_t w = message_width(n, MessageEncoding::fixed_width);
  for (const auto& m : raw)
    if (m.size() != w) return MessageEncoding::length_prefixed;
  return MessageEncoding::fixed_width;
}

InputMessage canonicalize(const std::string& raw, std::uint64_t n, MessageEncoding encoding) {
  check_bits(raw);
  if (encoding == MessageEncoding::automatic) encoding = resolve_encoding({raw}, n, encoding);
  const std::size_t w = message_width(n, MessageEncoding::fixed_width);
  if (raw.size() > w)
    throw Error("input message '" + raw + "' is longer than ceil(log2 n) = " + std::to_string(w) + " bits");
  if (encoding == MessageEncoding::fixed_width) return {std::string(w - raw.size(), '0') + raw};
  return {to_bits(raw.size(), prefix_width(w)) + raw + std::string(w - raw.size(), '0')};
}

std::vector<InputMessage> canonicalize_all(const std::vector<std::string>& raw, std::uint64_t n,
                                           MessageEncoding encoding) {
  encoding = resolve_encoding(raw, n, encoding);
  std::vector<InputMessage> out;
  std::map<std::string, std::string> seen;
  for (const auto& m : raw) {
    out.push_back(canonicalize(m, n, encoding));
    auto [it, fresh] = seen.emplace(out.back().bits, m);
    if (!fresh && it->second != m)
      throw Error("input messages '" + it->second + "' and '" + m + "' collide after padding");
  }
  return out;
}

std::optional<std::string> decode_message(const InputMessage& m, std::uint64_t n, MessageEncoding encoding) {
  const std::size_t w = message_width(n, MessageEncoding::fixed_width);
  if (m.bits.size() != message_width(n, encoding)) return std::nullopt;
  if (encoding != MessageEncoding::length_prefixed) return m.bits;
  const std::size_t pw = prefix_width(w);
  std::size_t len = 0;
  for (std::size_t i = 0; i < pw; ++i) len = 2 * len + (m.bits[i] == '1');
  if (len > w) return std::nullopt;
  return m.bits.substr(pw, len);
}

AllToAllProtocol::AllToAllProtocol(std::uint64_t ell, std::uint32_t T, Rational epsilon,
                                   std::optional<Rational> i_min, ReducedMode reduced, MessageEncoding encoding)
    : rmc_(ell, T, std::move(epsilon), i_min, reduced),
      ell_(ell),
      T_(T),
      i_min_(std::move(i_min)),
      reduced_(reduced),
      encoding_(encoding),
      mult_cache_(std::make_shared<std::map<std::uint64_t, std::shared_ptr<const MultParams>>>()) {
  if (encoding_ == MessageEncoding::automatic) throw Error("all-to-all protocol needs a resolved encoding");
}

std::shared_ptr<const MultParams> AllToAllProtocol::mult_params(std::uint64_t n) const {
  auto it = mult_cache_->find(n);
  if (it != mult_cache_->end()) return it->second;
  auto p = std::make_shared<const MultParams>(derive_mult_params(n, T_, i_min_, reduced_));
  mult_cache_->emplace(n, p);
  return p;
}

A2ANodeState AllToAllProtocol::initial_state(Role role, InputMessage input) const {
  State s;
  s.rmc = rmc_.initial_state(role);
  s.input = std::move(input);
  return s;
}

void AllToAllProtocol::begin_discovery_epoch(State& s) const {
  s.stage = State::Stage::discovery;
  s.match = !s.delivered;
  s.new_message.clear();
  s.index = 1;
  begin_phase(s);
}

void AllToAllProtocol::begin_phase(State& s) const {
  // Inputs narrower than the counted width read as zeros past their end.
  const char bit = s.index <= s.input.bits.size() ? s.input.bits[s.index - 1] : '0';
  s.match0 = s.match && bit == '0';
  s.match1 = s.match && bit == '1';
  s.zero_pass = false;
  s.round = 0;
}

void AllToAllProtocol::next_index(State& s) const {
  if (s.index < s.width) {
    ++s.index;
    begin_phase(s);
    return;
  }
  if (s.match) s.delivered = true;
  s.stage = State::Stage::multiplicity;
  s.phi = s.input.bits == s.new_message ? s.mult->denominator : Int(0);
  s.round = 0;
}

void AllToAllProtocol::emit(const State& s, WireMessage& out) const {
  switch (s.stage) {
    case State::Stage::counting:
      rmc_.emit(s.rmc, out);
      return;
    case State::Stage::discovery:
      out.kind = MsgKind::flag;
      out.flag = s.zero_pass ? s.match0 : s.match1;
      return;
    case State::Stage::multiplicity:
      out.kind = MsgKind::potential;
      out.potential = s.phi;
      return;
    case State::Stage::finished:
      out.kind = MsgKind::flag;
      out.flag = false;
      return;
  }
}

void AllToAllProtocol::step(State& s, Inbox in) const {
  switch (s.stage) {
    case State::Stage::counting:
      rmc_.step(s.rmc, in);
      if (rmc_.terminated(s.rmc)) {
        s.n = s.rmc.output;
        s.width = message_width(s.n, encoding_);
        s.r_prime = broadcast_rounds(s.n, T_, i_min_);
        s.mult = mult_params(s.n);
        begin_discovery_epoch(s);
      }
      return;
    case State::Stage::discovery: {
      bool any = false;
      for (const auto& m : in) {
        if (m.kind != MsgKind::flag) throw ProtocolViolation("discovery round received a non-flag message");
        any = any || m.flag;
      }
      bool& flag = s.zero_pass ? s.match0 : s.match1;
      flag = flag || any;
      if (++s.round < s.r_prime) return;
      const char bit = s.index <= s.input.bits.size() ? s.input.bits[s.index - 1] : '0';
      if (!s.zero_pass) {
        if (s.match1) {
          s.new_message.push_back('1');
          if (bit == '0') s.match = false;
          next_index(s);
        } else {
          s.zero_pass = true;
          s.round = 0;
        }
      } else if (s.match0) {
        s.new_message.push_back('0');
        if (bit == '1') s.match = false;
        next_index(s);
      } else {
        s.stage = State::Stage::finished;  // nothing left to discover
      }
      return;
    }
    case State::Stage::multiplicity: {
      const MultParams& P = *s.mult;
      if (2 * in.size() >= P.d)
        throw DegreeOverflowError("multiplicity: " + std::to_string(in.size()) + " neighbors with d = " +
                                  std::to_string(P.d));
      sum_ = 0;
      for (const auto& m : in) {
        if (m.kind != MsgKind::potential) throw ProtocolViolation("multiplicity round received a non-potential message");
        mpz_fdiv_q_ui(scratch_.get_mpz_t(), m.potential.get_mpz_t(), P.d);
        sum_ += scratch_;
      }
      apply_truncated_exchange(s.phi, sum_, in.size(), P.d, scratch_);
      if (++s.round < P.r) return;
      s.external_output.emplace_back(s.new_message, scaled_round_half_up(s.phi, s.n, P.denominator));
      ++s.epoch;
      begin_discovery_epoch(s);
      return;
    }
    case State::Stage::finished:
      return;
  }
}

AuditTag AllToAllProtocol::audit_tag(const State& s) const {
  switch (s.stage) {
    case State::Stage::counting: return rmc_.audit_tag(s.rmc);
    case State::Stage::multiplicity:
      return {kMultiplicityAuditBase + s.epoch, congestion_bound(ell_, s.mult->d, s.mult->c)};
    default: return {kDiscoveryAuditBase + s.epoch, congestion_bound(ell_, 1, 0)};
  }
}

NodeView AllToAllProtocol::view(const State& s) const {
  if (s.stage == State::Stage::counting) return rmc_.view(s.rmc);
  NodeView v;
  v.epoch = s.epoch;
  v.phase = s.index;
  v.round_in_phase = s.round;
  v.block = s.round / T_;
  switch (s.stage) {
    case State::Stage::discovery:
      v.stage = s.zero_pass ? "a2a-match0" : "a2a-match1";
      v.status = (s.zero_pass ? s.match0 : s.match1) ? "true" : "false";
      break;
    case State::Stage::multiplicity:
      v.stage = "a2a-multiplicity";
      v.phi = potential_string(s.phi, s.mult->d, s.mult->c);
      break;
    default:
      v.stage = "a2a-finished";
      break;
  }
  return v;
}

std::uint64_t AllToAllProtocol::uniform_rounds_ahead(const State& s) const {
  switch (s.stage) {
    case State::Stage::counting: return rmc_.uniform_rounds_ahead(s.rmc);
    case State::Stage::discovery: return s.r_prime - s.round - 1;
    case State::Stage::multiplicity: return s.mult->r - s.round - 1;
    case State::Stage::finished: return 0;
  }
  return 0;
}

bool AllToAllProtocol::same_dynamics(const State& a, const State& b) const {
  if (a.stage != b.stage) return false;
  switch (a.stage) {
    case State::Stage::counting: return rmc_.same_dynamics(a.rmc, b.rmc);
    case State::Stage::discovery: return a.zero_pass == b.zero_pass && a.match0 == b.match0 && a.match1 == b.match1;
    case State::Stage::multiplicity: return a.phi == b.phi;
    case State::Stage::finished: return true;
  }
  return false;
}

void AllToAllProtocol::advance(State& s, std::uint64_t m) const {
  if (s.stage == State::Stage::counting) {
    rmc_.advance(s.rmc, m);
  } else {
    s.round += m;
  }
}

bool AllToAllProtocol::frozen(std::span<const State> all, std::size_t n) const {
  if (all.empty()) return false;
  const State& f = all.front();
  for (const auto& s : all)
    if (s.stage != f.stage) return false;
  switch (f.stage) {
    case State::Stage::counting: {
      std::vector<const RmcNodeState*> ptrs;
      for (const auto& s : all) ptrs.push_back(&s.rmc);
      return rmc_.frozen_ptrs(ptrs, n);
    }
    case State::Stage::discovery:
      for (const auto& s : all) {
        if (s.zero_pass != f.zero_pass) return false;
        if ((s.zero_pass ? s.match0 : s.match1) != (f.zero_pass ? f.match0 : f.match1)) return false;
      }
      return true;
    case State::Stage::multiplicity: {
      const std::uint64_t d = f.mult->d;
      if (2 * (n - 1) >= d) return false;
      Int q0, q;
      mpz_fdiv_q_ui(q0.get_mpz_t(), f.phi.get_mpz_t(), d);
      for (const auto& s : all) {
        if (s.mult != f.mult) return false;
        mpz_fdiv_q_ui(q.get_mpz_t(), s.phi.get_mpz_t(), d);
        if (q != q0) return false;
      }
      return true;
    }
    case State::Stage::finished: return false;
  }
  return false;
}

GossipBatchResult AllToAllProtocol::run_batch(std::span<State> all, const BatchRequest& req) const {
  if (all.empty()) return {};
  const State& f = all.front();
  for (const auto& s : all)
    if (s.stage != f.stage) return {};
  if (f.stage == State::Stage::counting) {
    std::vector<RmcNodeState*> ptrs;
    for (auto& s : all) ptrs.push_back(&s.rmc);
    return rmc_.run_batch_ptrs(ptrs, req);
  }
  if (f.stage != State::Stage::multiplicity) return {};
  for (const auto& s : all)
    if (s.mult != f.mult || s.round != f.round || s.epoch != f.epoch) return {};
  std::vector<Int> phi(all.size());
  for (std::size_t v = 0; v < all.size(); ++v) phi[v].swap(all[v].phi);
  GossipBatch b;
  b.d = f.mult->d;
  b.start_round = req.t;
  b.max_rounds = req.limit;
  b.period = req.period;
  b.cycle_history = req.cycle_history;
  b.adjacency = req.adjacency;
  b.auditor = req.auditor;
  b.audit_key = kMultiplicityAuditBase + f.epoch;
  b.bound = congestion_bound(ell_, f.mult->d, f.mult->c);
  b.header_bits = 4;
  const auto res = run_truncated_gossip(phi, b);
  for (std::size_t v = 0; v < all.size(); ++v) {
    all[v].phi.swap(phi[v]);
    all[v].round += res.rounds;
  }
  return res;
}

A2ARunResult all_to_all(const std::vector<std::string>& messages, const SystemConfig& config,
                        const EvolvingSchedule& schedule, const A2ARunOptions& options) {
  config.validate();
  if (messages.size() != config.n) throw Error("all_to_all: message vector size differs from n");
  if (schedule.n() != config.n) throw Error("all_to_all: schedule size differs from n");
  if (schedule.T() != config.T) throw Error("all_to_all: schedule T differs from config T");
  const MessageEncoding encoding = resolve_encoding(messages, config.n, options.encoding);
  const auto inputs = canonicalize_all(messages, config.n, encoding);
  AllToAllProtocol protocol(config.ell, config.T, options.epsilon, config.i_min_hint, options.reduced, encoding);
  const auto roles = options.roles.empty() ? default_roles(config.n, config.ell) : options.roles;
  if (roles.size() != config.n) throw Error("all_to_all: role vector size differs from n");
  std::vector<A2ANodeState> init;
  for (std::size_t v = 0; v < config.n; ++v) init.push_back(protocol.initial_state(roles[v], inputs[v]));

  auto sim = simulate(protocol, std::move(init), schedule, options.sim);

  A2ARunResult out;
  out.encoding = encoding;
  out.rounds = sim.stats.rounds;
  out.stats = sim.stats;
  out.congestion = std::move(sim.congestion);
  out.reduced = options.reduced.active();
  for (auto& s : sim.states) {
    std::map<std::string, std::uint64_t> m;
    for (const auto& [msg, count] : s.external_output) {
      auto raw = decode_message({msg}, s.n, encoding);
      m[raw.value_or(msg)] += count;
    }
    out.outputs.push_back(std::move(m));
    out.discovery.push_back(std::move(s.external_output));
    out.counted_n.push_back(s.n);
  }
  return out;
}

}  // namespace adcs
