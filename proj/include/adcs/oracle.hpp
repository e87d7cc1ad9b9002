#pragma once

// Exact references the protocols are checked against: untruncated share
// dynamics, one-block contraction, truncation error and flooding time.

#include "adcs/expansion.hpp"
#include "adcs/numerics.hpp"

namespace adcs {

using DistributionVector = std::vector<Rational>;

Rational l1_mass(const DistributionVector& x);
/// ||x - (mass/n) 1||_2^2.
Rational squared_distance_to_uniform(const DistributionVector& x);

/// Applies P^(start) ... P^(start+rounds-1) without truncation.
DistributionVector ideal_evolution(const DistributionVector& initial, const EvolvingSchedule& s, std::uint64_t d,
                                   std::uint64_t rounds, std::uint64_t start = 0);

struct ContractionCheck {
  Rational before;       // ||Pi_t - 1/n||^2
  Rational after;        // ||Pi_{t+1} - 1/n||^2
  Rational conductance;  // phi(P_i)
  Rational rhs;          // (1 - phi^2) * before
  bool holds = false;
};

/// One aligned block i (rounds iT..iT+T-1). `initial` is normalized to a
/// probability vector first.
ContractionCheck contraction_check(const EvolvingSchedule& s, std::uint64_t d, std::uint32_t T,
                                   std::uint64_t window_index, const DistributionVector& initial,
                                   const EnumerationCaps& caps = {});

struct TruncationGap {
  std::vector<Rational> gap;  // |ideal - truncated| per node
  Rational bound;             // rounds * (n - 1) / d^c
  bool within_bound = false;
  std::vector<Rational> ideal;
  std::vector<Rational> truncated;
};

/// Runs the truncated exchange and the ideal dynamics side by side from
/// `initial` (multiples of d^-c).
TruncationGap truncation_gap(const EvolvingSchedule& s, std::uint64_t d, std::uint32_t c, std::uint64_t rounds,
                             const DistributionVector& initial, std::uint64_t start = 0);

/// Fewest rounds after which OR-flooding from `sources`, starting at round
/// `start`, has reached every node; nullopt if not reached within `cap`.
std::optional<std::uint64_t> temporal_broadcast_time(const EvolvingSchedule& s, const std::vector<bool>& sources,
                                                     std::uint64_t start = 0, std::uint64_t cap = 1U << 20);

/// Largest flooding time over every single-node source and every start in
/// [0, horizon).
std::uint64_t worst_broadcast_time(const EvolvingSchedule& s, std::uint64_t horizon, std::uint64_t cap = 1U << 20);

}  // namespace adcs
