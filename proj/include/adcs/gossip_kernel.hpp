#pragma once

// Batched execution of the truncated exchange rule over many rounds. The
// rule is invariant under subtracting K*d from every numerator, so the kernel
// keeps phi_v = K*d + R_v with min_v floor(R_v / d) = 0 and works on the
// small residuals R_v in fixed-width limbs. Results are bit-identical to
// stepping the rule one round at a time.

#include "adcs/exact_math.hpp"
#include "adcs/graph.hpp"
#include "adcs/trace.hpp"

#include <functional>
#include <vector>

namespace adcs {

using AdjacencyList = std::vector<std::vector<NodeId>>;

struct GossipBatch {
  std::uint64_t d = 2;
  std::uint64_t start_round = 0;
  std::uint64_t max_rounds = 0;
  /// Schedule period, 0 when aperiodic.
  std::uint64_t period = 0;
  /// Initial snapshot window for cycle detection, in periods.
  std::uint64_t cycle_history = 8;
  std::function<const AdjacencyList&(std::uint64_t)> adjacency;

  CongestionAuditor* auditor = nullptr;
  std::uint64_t audit_key = 0;
  std::size_t bound = 0;
  /// Frame bits besides the numerator (tag and status).
  std::size_t header_bits = 0;
};

struct GossipBatchResult {
  std::uint64_t rounds = 0;
  std::uint64_t stepped = 0;
  std::uint64_t skipped = 0;
  std::uint64_t cycle_jumps = 0;
  std::uint64_t frozen_jumps = 0;
};

/// Runs up to `max_rounds` rounds of phi_v += sum floor(phi_u/d) - |N| floor(phi_v/d)
/// in place. Stops early before any round in which some node has 2|N| >= d
/// or some message would exceed the congestion bound, so the caller can
/// handle that round with its regular step.
GossipBatchResult run_truncated_gossip(std::vector<Int>& phi, const GossipBatch& batch);

}  // namespace adcs
