#include "adcs/rmc.hpp"

namespace adcs {

namespace {

int precedence(Status s) {
  switch (s) {
    case Status::low: return 3;
    case Status::high: return 2;
    case Status::done: return 1;
    case Status::probing: return 0;
  }
  return 0;
}

}  // namespace

RmcProtocol::RmcProtocol(std::uint64_t ell, std::uint32_t T, Rational epsilon, std::optional<Rational> i_min,
                         ReducedMode reduced)
    : ell_(ell),
      T_(T),
      epsilon_(std::move(epsilon)),
      i_min_(std::move(i_min)),
      reduced_(reduced),
      cache_(std::make_shared<std::map<std::uint64_t, std::shared_ptr<const RmcParams>>>()) {
  if (ell_ < 1) throw InfeasibleParameterError("ell >= 1 violated");
}

std::shared_ptr<const RmcParams> RmcProtocol::params_for(std::uint64_t k) const {
  auto it = cache_->find(k);
  if (it != cache_->end()) return it->second;
  auto p = std::make_shared<const RmcParams>(derive_rmc_params(k, ell_, T_, epsilon_, i_min_, reduced_));
  cache_->emplace(k, p);
  return p;
}

RmcNodeState RmcProtocol::initial_state(Role role) const {
  State s;
  s.role = role;
  s.k = ell_ + 1;
  s.min = s.k;
  start_epoch(s);
  s.epoch = 0;
  s.history.back().epoch = 0;
  return s;
}

void RmcProtocol::start_epoch(State& s) const {
  s.params = params_for(s.k);
  s.status = Status::probing;
  s.phi = s.role == Role::supervisor ? Int(0) : Int(static_cast<unsigned long>(ell_)) * s.params->denominator;
  s.rho = 0;
  s.stage = State::Stage::gossip;
  s.phase = 1;
  s.round = 1;
  s.dround = 0;
  if (!s.history.empty()) ++s.epoch;
  RmcEpochRecord rec;
  rec.epoch = s.epoch;
  rec.k = s.k;
  s.history.push_back(rec);
}

void RmcProtocol::emit(const State& s, WireMessage& out) const {
  if (s.stage == State::Stage::gossip) {
    out.kind = MsgKind::rmc_gossip;
    out.status = s.status;
    out.potential = s.phi;
  } else {
    out.kind = MsgKind::rmc_status;
    out.status = s.stage == State::Stage::finished ? Status::done : s.status;
  }
}

void RmcProtocol::step(State& s, Inbox in) const {
  const RmcParams& P = *s.params;
  switch (s.stage) {
    case State::Stage::gossip: {
      bool all_probing = true;
      for (const auto& m : in) {
        if (m.kind != MsgKind::rmc_gossip) throw ProtocolViolation("gossip round received a non-gossip message");
        if (m.status == Status::done) throw ProtocolViolation("gossip round received status 'done'");
        if (m.status != Status::probing) all_probing = false;
      }
      if (s.status == Status::probing && 2 * in.size() < P.d && all_probing) {
        sum_ = 0;
        for (const auto& m : in) {
          mpz_fdiv_q_ui(scratch_.get_mpz_t(), m.potential.get_mpz_t(), P.d);
          sum_ += scratch_;
        }
        apply_truncated_exchange(s.phi, sum_, in.size(), P.d, scratch_);
      } else {
        s.status = Status::low;
        s.phi = Int(static_cast<unsigned long>(ell_)) * P.denominator;
      }
      if (s.round == P.r) {
        end_phase(s);
      } else {
        ++s.round;
      }
      break;
    }
    case State::Stage::disseminate: {
      Status pick = Status::probing;
      for (const auto& m : in) {
        if (m.kind != MsgKind::rmc_status) throw ProtocolViolation("dissemination round received a gossip message");
        if (precedence(m.status) > precedence(pick)) pick = m.status;
      }
      if (s.role == Role::supervised && pick != Status::probing) s.status = pick;
      if (s.dround == P.d) {
        end_epoch(s);
      } else {
        ++s.dround;
      }
      break;
    }
    case State::Stage::finished:
      break;
  }
}

void RmcProtocol::end_phase(State& s) const {
  const RmcParams& P = *s.params;
  auto& rec = s.history.back();
  if (s.phase == 1) {
    rec.phase1_over_tau = P.exceeds_tau(s.phi);
    if (rec.phase1_over_tau) {
      s.status = Status::low;
      s.phi = Int(static_cast<unsigned long>(ell_)) * P.denominator;
    }
  }
  if (s.role == Role::supervisor && s.status == Status::probing) {
    s.rho += s.phi;
    s.phi = 0;
  }
  if (s.phase == 2) rec.status_after_phase2 = s.status;
  if (s.phase < P.p) {
    ++s.phase;
    s.round = 1;
    return;
  }
  rec.status_after_gossip = s.status;
  if (s.role == Role::supervisor) {
    rec.rho = s.rho;
    if (s.status == Status::probing) {
      Rational rho(s.rho, P.denominator);
      rho.canonicalize();
      if (rho < P.rho_lower) {
        s.status = Status::high;
      } else if (rho > P.rho_upper) {
        s.status = Status::low;
      } else {
        s.status = Status::done;
      }
    }
  }
  s.stage = State::Stage::disseminate;
  s.dround = 1;
}

void RmcProtocol::end_epoch(State& s) const {
  s.history.back().outcome = s.status;
  switch (s.status) {
    case Status::done:
      s.stage = State::Stage::finished;
      s.output = s.k;
      return;
    case Status::low:
      s.min = s.k + 1;
      s.k = s.max ? (s.min + *s.max) / 2 : 2 * s.k;
      break;
    case Status::high:
      s.max = s.k - 1;
      s.k = (s.min + *s.max) / 2;
      break;
    case Status::probing:
      break;
  }
  start_epoch(s);
}

AuditTag RmcProtocol::audit_tag(const State& s) const {
  return {s.epoch, congestion_bound(ell_, s.params->d, s.params->c)};
}

NodeView RmcProtocol::view(const State& s) const {
  NodeView v;
  switch (s.stage) {
    case State::Stage::gossip: v.stage = "rmc-gossip"; break;
    case State::Stage::disseminate: v.stage = "rmc-disseminate"; break;
    case State::Stage::finished: v.stage = "rmc-finished"; break;
  }
  v.epoch = s.epoch;
  v.phase = s.phase;
  v.round_in_phase = s.stage == State::Stage::disseminate ? s.dround : s.round;
  v.block = (v.round_in_phase - 1) / T_;
  v.phi = potential_string(s.phi, s.params->d, s.params->c);
  v.status = to_string(s.status);
  return v;
}

std::uint64_t RmcProtocol::uniform_rounds_ahead(const State& s) const {
  switch (s.stage) {
    case State::Stage::gossip: return s.params->r - s.round;
    case State::Stage::disseminate: return s.params->d - s.dround;
    case State::Stage::finished: return 0;
  }
  return 0;
}

bool RmcProtocol::same_dynamics(const State& a, const State& b) const {
  return a.stage == b.stage && a.status == b.status && a.phi == b.phi && a.rho == b.rho;
}

void RmcProtocol::advance(State& s, std::uint64_t rounds) const {
  if (s.stage == State::Stage::gossip) {
    s.round += rounds;
  } else if (s.stage == State::Stage::disseminate) {
    s.dround += rounds;
  }
}

bool RmcProtocol::frozen(std::span<const State> all, std::size_t n) const {
  std::vector<const State*> ptrs;
  ptrs.reserve(all.size());
  for (const auto& s : all) ptrs.push_back(&s);
  return frozen_ptrs(ptrs, n);
}

bool RmcProtocol::frozen_ptrs(const std::vector<const State*>& all, std::size_t n) const {
  if (all.empty()) return false;
  const State& first = *all.front();
  for (const State* s : all)
    if (s->stage != first.stage || s->k != first.k) return false;
  if (first.stage == State::Stage::disseminate) {
    for (const State* s : all)
      if (s->status != first.status) return false;
    return true;
  }
  if (first.stage != State::Stage::gossip) return false;
  bool all_low = true;
  for (const State* s : all) all_low = all_low && s->status == Status::low;
  if (all_low) return true;
  // All probing with equal shares: every exchange cancels and no degree can
  // reach d/2, whatever the graph.
  const std::uint64_t d = first.params->d;
  if (2 * (n - 1) >= d) return false;
  Int q0, q;
  mpz_fdiv_q_ui(q0.get_mpz_t(), first.phi.get_mpz_t(), d);
  for (const State* s : all) {
    if (s->status != Status::probing) return false;
    mpz_fdiv_q_ui(q.get_mpz_t(), s->phi.get_mpz_t(), d);
    if (q != q0) return false;
  }
  return true;
}

GossipBatchResult RmcProtocol::run_batch(std::span<State> all, const BatchRequest& req) const {
  std::vector<State*> ptrs;
  ptrs.reserve(all.size());
  for (auto& s : all) ptrs.push_back(&s);
  return run_batch_ptrs(ptrs, req);
}

GossipBatchResult RmcProtocol::run_batch_ptrs(const std::vector<State*>& all, const BatchRequest& req) const {
  if (all.empty()) return {};
  const State& first = *all.front();
  for (const State* s : all)
    if (s->stage != State::Stage::gossip || s->status != Status::probing || s->params != first.params ||
        s->round != first.round)
      return {};
  const RmcParams& P = *first.params;
  std::vector<Int> phi(all.size());
  for (std::size_t v = 0; v < all.size(); ++v) phi[v].swap(all[v]->phi);
  GossipBatch b;
  b.d = P.d;
  b.start_round = req.t;
  b.max_rounds = req.limit;
  b.period = req.period;
  b.cycle_history = req.cycle_history;
  b.adjacency = req.adjacency;
  b.auditor = req.auditor;
  b.audit_key = first.epoch;
  b.bound = congestion_bound(ell_, P.d, P.c);
  b.header_bits = 4 + 2;
  const GossipBatchResult res = run_truncated_gossip(phi, b);
  for (std::size_t v = 0; v < all.size(); ++v) {
    all[v]->phi.swap(phi[v]);
    advance(*all[v], res.rounds);
  }
  return res;
}

void SystemConfig::validate() const {
  if (n < 2) throw InfeasibleParameterError("n >= 2 violated");
  if (ell < 1 || ell >= n) throw InfeasibleParameterError("0 < ell < n violated");
  if (T < 1) throw InfeasibleParameterError("T >= 1 violated");
  if (i_min_hint && *i_min_hint <= 0) throw InfeasibleParameterError("i_min > 0 violated");
}

std::vector<Role> default_roles(std::size_t n, std::uint64_t ell) {
  std::vector<Role> roles(n, Role::supervised);
  for (std::size_t v = 0; v < n && v < ell; ++v) roles[v] = Role::supervisor;
  return roles;
}

RmcRunResult rmc_run(const SystemConfig& config, const EvolvingSchedule& schedule, const RmcRunOptions& options) {
  config.validate();
  if (schedule.n() != config.n) throw Error("rmc_run: schedule size differs from n");
  if (schedule.T() != config.T) throw Error("rmc_run: schedule T differs from config T");
  RmcProtocol protocol(config.ell, config.T, options.epsilon, config.i_min_hint, options.reduced);
  std::vector<Role> roles = options.roles.empty() ? default_roles(config.n, config.ell) : options.roles;
  if (roles.size() != config.n) throw Error("rmc_run: role vector size differs from n");
  std::vector<RmcNodeState> init;
  init.reserve(config.n);
  for (auto role : roles) init.push_back(protocol.initial_state(role));

  auto sim = simulate(protocol, std::move(init), schedule, options.sim);

  RmcRunResult result;
  result.rounds = sim.stats.rounds;
  result.stats = sim.stats;
  result.congestion = std::move(sim.congestion);
  result.roles = roles;
  result.reduced = options.reduced.active();
  std::size_t reference = 0;
  for (std::size_t v = 0; v < roles.size(); ++v)
    if (roles[v] == Role::supervisor) {
      reference = v;
      break;
    }
  result.round_bound = 0;
  for (const auto& rec : sim.states[reference].history) {
    auto P = protocol.params_for(rec.k);
    EstimateStep step{rec.epoch, rec.k, rec.outcome, P->p, P->r, P->d, P->c, P->epoch_rounds()};
    result.round_bound += step.epoch_rounds;
    result.estimate_path.push_back(std::move(step));
  }
  for (auto& s : sim.states) {
    result.outputs.push_back(s.output);
    result.histories.push_back(std::move(s.history));
  }
  return result;
}

}  // namespace adcs
