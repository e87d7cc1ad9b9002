#pragma once

// Synchronous round engine. Each round every node emits one message, every
// node receives the unordered multiset of its neighbors' messages for that
// round, and all nodes step together. Node labels never reach protocol code:
// a step only sees an Inbox of message references.

#include "adcs/codec.hpp"
#include "adcs/gossip_kernel.hpp"
#include "adcs/graph.hpp"
#include "adcs/trace.hpp"

#include <algorithm>
#include <concepts>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace adcs {

class Inbox {
 public:
  class iterator {
   public:
    explicit iterator(const WireMessage* const* p) : p_(p) {}
    const WireMessage& operator*() const { return **p_; }
    const WireMessage* operator->() const { return *p_; }
    iterator& operator++() {
      ++p_;
      return *this;
    }
    bool operator==(const iterator& o) const { return p_ == o.p_; }

   private:
    const WireMessage* const* p_;
  };

  Inbox(const WireMessage* const* data, std::size_t size) : data_(data), size_(size) {}
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  iterator begin() const { return iterator(data_); }
  iterator end() const { return iterator(data_ + size_); }

 private:
  const WireMessage* const* data_;
  std::size_t size_;
};

struct NodeView {
  std::string stage;
  std::uint64_t epoch = 0;
  std::uint64_t phase = 0;
  std::uint64_t block = 0;
  std::uint64_t round_in_phase = 0;
  std::string phi;
  std::string status;
};

/// Which epoch a message belongs to and the bit bound for that epoch.
struct AuditTag {
  std::uint64_t key = 0;
  std::size_t bound = 0;
};

template <class P>
concept NodeProtocol = requires(const P& p, typename P::State& s, const typename P::State& cs, WireMessage& m,
                                Inbox in) {
  p.emit(cs, m);
  p.step(s, in);
  { p.terminated(cs) } -> std::convertible_to<bool>;
  { p.audit_tag(cs) } -> std::same_as<AuditTag>;
  { p.view(cs) } -> std::same_as<NodeView>;
};

/// Optional hooks that let the engine jump over rounds whose outcome is
/// already determined. uniform_rounds_ahead(s) counts upcoming rounds that
/// apply the plain per-round rule (no phase or epoch bookkeeping);
/// same_dynamics compares the parts of two states that evolve inside such a
/// stretch; advance moves the counters; frozen reports a configuration that
/// no graph can change.
template <class P>
concept SkippableProtocol = NodeProtocol<P> && requires(const P& p, const typename P::State& cs,
                                                        typename P::State& s,
                                                        std::span<const typename P::State> all, std::uint64_t m,
                                                        std::size_t n) {
  { p.uniform_rounds_ahead(cs) } -> std::convertible_to<std::uint64_t>;
  { p.same_dynamics(cs, cs) } -> std::convertible_to<bool>;
  p.advance(s, m);
  { p.frozen(all, n) } -> std::convertible_to<bool>;
};

/// A stretch of plain rounds handed to a protocol's batch kernel.
struct BatchRequest {
  std::uint64_t t = 0;
  std::uint64_t limit = 0;
  std::uint64_t period = 0;
  std::uint64_t cycle_history = 8;
  std::function<const AdjacencyList&(std::uint64_t)> adjacency;
  CongestionAuditor* auditor = nullptr;
};

/// Optional whole-stretch execution. run_batch returns zero rounds when the
/// configuration does not qualify; otherwise it leaves the states exactly as
/// round-by-round stepping would.
template <class P>
concept BatchProtocol = SkippableProtocol<P> && requires(const P& p, std::span<typename P::State> all,
                                                         const BatchRequest& req) {
  { p.run_batch(all, req) } -> std::same_as<GossipBatchResult>;
};

struct SimOptions {
  std::uint64_t round_cap = std::uint64_t{1} << 62;
  /// Global index of the first simulated round.
  std::uint64_t start_round = 0;
  /// Exact cycle/fixed-point skipping; disabled automatically while tracing.
  bool fast_forward = true;
  bool strict_congestion = false;
  TraceSink* trace = nullptr;
  /// Shuffle every inbox with this seed (anonymity tests).
  std::optional<std::uint64_t> shuffle_seed;
  /// Initial snapshot refresh interval in schedule periods; doubles on every
  /// refresh within a stretch so cycles of any length are eventually caught.
  std::uint64_t cycle_history = 8;
};

struct SimStats {
  std::uint64_t rounds = 0;
  std::uint64_t stepped_rounds = 0;
  std::uint64_t skipped_rounds = 0;
  std::uint64_t cycle_jumps = 0;
  std::uint64_t frozen_jumps = 0;
};

template <class State>
struct SimResult {
  std::vector<State> states;
  SimStats stats;
  CongestionReport congestion;
};

struct RoundCapExceeded : Error {
  RoundCapExceeded(std::uint64_t rounds_, std::vector<TraceRecord> partial)
      : Error("round cap of " + std::to_string(rounds_) + " rounds exceeded before termination"),
        rounds(rounds_),
        partial_trace(std::move(partial)) {}
  std::uint64_t rounds;
  std::vector<TraceRecord> partial_trace;
};

namespace detail {

class AdjacencyCache {
 public:
  explicit AdjacencyCache(const EvolvingSchedule& s) : s_(s) {
    auto p = s.period();
    if (p && *p <= (1U << 16)) {
      period_ = *p;
      cache_.resize(*p);
    }
  }
  const std::vector<std::vector<NodeId>>& at(std::uint64_t t) {
    if (period_ == 0) {
      scratch_ = s_.graph_at(t).adjacency();
      return scratch_;
    }
    auto& slot = cache_[t % period_];
    if (!slot) slot = s_.graph_at(t % period_).adjacency();
    return *slot;
  }

 private:
  const EvolvingSchedule& s_;
  std::uint64_t period_ = 0;
  std::vector<std::optional<std::vector<std::vector<NodeId>>>> cache_;
  std::vector<std::vector<NodeId>> scratch_;
};

}  // namespace detail

template <NodeProtocol P>
SimResult<typename P::State> simulate(const P& protocol, std::vector<typename P::State> states,
                                      const EvolvingSchedule& schedule, const SimOptions& opt = {}) {
  using State = typename P::State;
  const std::size_t n = states.size();
  if (n != schedule.n()) throw Error("simulate: node count differs from schedule");
  if (opt.round_cap < 1) throw Error("simulate: round cap must be >= 1");

  detail::AdjacencyCache adjacency(schedule);
  std::vector<WireMessage> outbox(n);
  std::vector<const WireMessage*> ptrs;
  std::vector<AuditTag> tags(n);
  std::vector<std::size_t> bits(n);
  CongestionAuditor auditor;
  SimStats stats;
  std::optional<std::mt19937_64> shuffler;
  if (opt.shuffle_seed) shuffler.emplace(*opt.shuffle_seed);

  [[maybe_unused]] const std::uint64_t period = schedule.period().value_or(0);
  [[maybe_unused]] std::optional<std::vector<State>> snapshot;
  [[maybe_unused]] std::uint64_t snap_round = 0, snap_end = 0, next_frozen_check = 0, snap_window = 0;

  auto all_terminated = [&] {
    return std::all_of(states.begin(), states.end(), [&](const State& s) { return protocol.terminated(s); });
  };

  const std::uint64_t t0 = opt.start_round;
  const std::uint64_t t_end = t0 + opt.round_cap;
  std::uint64_t t = t0;
  while (!all_terminated()) {
    if (t >= t_end) {
      std::vector<TraceRecord> partial;
      if (auto* mem = dynamic_cast<MemoryTrace*>(opt.trace)) partial = mem->rows;
      throw RoundCapExceeded(opt.round_cap, std::move(partial));
    }

    if constexpr (SkippableProtocol<P>) {
      if (opt.fast_forward && opt.trace == nullptr) {
        std::uint64_t ahead = UINT64_MAX;
        for (const auto& s : states) ahead = std::min<std::uint64_t>(ahead, protocol.uniform_rounds_ahead(s));
        ahead = std::min(ahead, t_end - t);
        auto jump = [&](std::uint64_t m) {
          for (std::size_t v = 0; v < n; ++v) {
            auditor.observe_repeat(protocol.audit_tag(states[v]).key, m);
            protocol.advance(states[v], m);
          }
          t += m;
          stats.skipped_rounds += m;
          snapshot.reset();
        };
        if constexpr (BatchProtocol<P>) {
          if (ahead > 0) {
            BatchRequest req;
            req.t = t;
            req.limit = ahead;
            req.period = period;
            req.cycle_history = opt.cycle_history;
            req.adjacency = [&](std::uint64_t r) -> const AdjacencyList& { return adjacency.at(r); };
            req.auditor = &auditor;
            const GossipBatchResult b = protocol.run_batch(std::span<State>(states), req);
            if (b.rounds > 0) {
              t += b.rounds;
              stats.stepped_rounds += b.stepped;
              stats.skipped_rounds += b.skipped;
              stats.cycle_jumps += b.cycle_jumps;
              stats.frozen_jumps += b.frozen_jumps;
              snapshot.reset();
              continue;
            }
          }
        }
        if (ahead > 0 && t >= next_frozen_check) {
          next_frozen_check = t + 4;
          if (protocol.frozen(std::span<const State>(states), n)) {
            ++stats.frozen_jumps;
            jump(ahead);
            continue;
          }
        }
        if (ahead > 0 && period > 0 && t % period == 0) {
          if (snapshot && snap_end == t + ahead) {
            bool same = true;
            for (std::size_t v = 0; v < n && same; ++v) same = protocol.same_dynamics(states[v], (*snapshot)[v]);
            if (same) {
              const std::uint64_t cycle = t - snap_round;
              const std::uint64_t m = (ahead / cycle) * cycle;
              if (m > 0) {
                ++stats.cycle_jumps;
                jump(m);
                continue;
              }
            }
          }
          const bool new_stretch = !snapshot || snap_end != t + ahead;
          if (new_stretch || t - snap_round >= snap_window) {
            snap_window = new_stretch ? opt.cycle_history * period : 2 * snap_window;
            snapshot = states;
            snap_round = t;
            snap_end = t + ahead;
          }
        }
      }
    }

    for (std::size_t v = 0; v < n; ++v) {
      protocol.emit(states[v], outbox[v]);
      tags[v] = protocol.audit_tag(states[v]);
      bits[v] = encoded_bits(outbox[v]);
      auditor.observe(t, static_cast<std::uint32_t>(v), tags[v].key, bits[v], tags[v].bound, opt.strict_congestion);
    }
    const auto& adj = adjacency.at(t);
    for (std::size_t v = 0; v < n; ++v) {
      ptrs.clear();
      for (NodeId u : adj[v]) ptrs.push_back(&outbox[u]);
      if (shuffler) std::shuffle(ptrs.begin(), ptrs.end(), *shuffler);
      protocol.step(states[v], Inbox(ptrs.data(), ptrs.size()));
    }
    if (opt.trace) {
      for (std::size_t v = 0; v < n; ++v) {
        NodeView view = protocol.view(states[v]);
        TraceRecord r;
        r.round = t;
        r.node = static_cast<std::uint32_t>(v);
        r.stage = std::move(view.stage);
        r.epoch = view.epoch;
        r.phase = view.phase;
        r.block = view.block;
        r.round_in_phase = view.round_in_phase;
        r.sent_hex = encode(outbox[v]).hex();
        r.sent_bits = bits[v];
        r.bit_bound = tags[v].bound;
        r.audit_key = tags[v].key;
        r.received_count = adj[v].size();
        r.phi = std::move(view.phi);
        r.status = std::move(view.status);
        opt.trace->record(r);
      }
    }
    ++t;
    ++stats.stepped_rounds;
  }
  stats.rounds = t - t0;
  return {std::move(states), stats, auditor.report()};
}

}  // namespace adcs
