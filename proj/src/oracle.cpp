#include "adcs/oracle.hpp"

#include <algorithm>

namespace adcs {

Rational l1_mass(const DistributionVector& x) {
  Rational m = 0;
  for (const auto& v : x) m += v;
  return m;
}

Rational squared_distance_to_uniform(const DistributionVector& x) {
  if (x.empty()) return 0;
  const Rational mean = l1_mass(x) / Rational(static_cast<long>(x.size()));
  Rational s = 0;
  for (const auto& v : x) {
    const Rational diff = v - mean;
    s += diff * diff;
  }
  return s;
}

DistributionVector ideal_evolution(const DistributionVector& initial, const EvolvingSchedule& s, std::uint64_t d,
                                   std::uint64_t rounds, std::uint64_t start) {
  if (initial.size() != s.n()) throw Error("ideal_evolution: vector size differs from n");
  DistributionVector x = initial;
  for (std::uint64_t t = start; t < start + rounds; ++t) x = share_matrix(s.graph_at(t), d).apply(x);
  return x;
}

ContractionCheck contraction_check(const EvolvingSchedule& s, std::uint64_t d, std::uint32_t T,
                                   std::uint64_t window_index, const DistributionVector& initial,
                                   const EnumerationCaps& caps) {
  if (initial.size() != s.n()) throw Error("contraction_check: vector size differs from n");
  const Rational mass = l1_mass(initial);
  if (mass <= 0) throw Error("contraction_check: initial vector has no mass");
  DistributionVector pi;
  for (const auto& v : initial) {
    if (v < 0) throw Error("contraction_check: negative entry");
    pi.push_back(v / mass);
  }
  const ShareMatrix P = window_product(s, window_index * T, T, d);
  ContractionCheck c;
  c.conductance = conductance(P, caps);
  c.before = squared_distance_to_uniform(pi);
  c.after = squared_distance_to_uniform(P.apply(pi));
  c.rhs = (1 - c.conductance * c.conductance) * c.before;
  c.holds = c.after <= c.rhs;
  return c;
}

TruncationGap truncation_gap(const EvolvingSchedule& s, std::uint64_t d, std::uint32_t c, std::uint64_t rounds,
                             const DistributionVector& initial, std::uint64_t start) {
  const std::size_t n = s.n();
  if (initial.size() != n) throw Error("truncation_gap: vector size differs from n");
  const FixedPointParams scale(d, c);
  std::vector<Potential> phi;
  for (const auto& v : initial) phi.push_back(Potential::from_rational(scale, v));
  for (std::uint64_t t = start; t < start + rounds; ++t) {
    const auto adj = s.graph_at(t).adjacency();
    std::vector<Potential> next;
    next.reserve(n);
    std::vector<Potential> received;
    for (std::size_t v = 0; v < n; ++v) {
      received.clear();
      for (NodeId u : adj[v]) received.push_back(phi[u]);
      next.push_back(potential_update(phi[v], received, scale));
    }
    phi = std::move(next);
  }
  TruncationGap g;
  g.ideal = ideal_evolution(initial, s, d, rounds, start);
  g.bound = Rational(static_cast<long>(rounds)) * Rational(static_cast<long>(n - 1)) / Rational(scale.denominator());
  g.within_bound = true;
  for (std::size_t v = 0; v < n; ++v) {
    g.truncated.push_back(phi[v].value());
    Rational diff = g.ideal[v] - g.truncated[v];
    if (diff < 0) diff = -diff;
    g.within_bound = g.within_bound && diff <= g.bound;
    g.gap.push_back(diff);
  }
  return g;
}

std::optional<std::uint64_t> temporal_broadcast_time(const EvolvingSchedule& s, const std::vector<bool>& sources,
                                                     std::uint64_t start, std::uint64_t cap) {
  if (sources.size() != s.n()) throw Error("temporal_broadcast_time: source vector size differs from n");
  std::vector<bool> reached = sources;
  auto done = [&] { return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; }); };
  std::vector<bool> next(s.n());
  // One hop per round: a node learns the flag from neighbors that held it
  // at the start of the round.
  for (std::uint64_t k = 0; k <= cap; ++k) {
    if (done()) return k;
    if (k == cap) break;
    next = reached;
    const auto g = s.graph_at(start + k);
    for (auto [u, v] : g.edges()) {
      if (reached[u]) next[v] = true;
      if (reached[v]) next[u] = true;
    }
    reached.swap(next);
  }
  return std::nullopt;
}

std::uint64_t worst_broadcast_time(const EvolvingSchedule& s, std::uint64_t horizon, std::uint64_t cap) {
  std::uint64_t worst = 0;
  for (std::uint64_t start = 0; start < horizon; ++start) {
    for (std::size_t v = 0; v < s.n(); ++v) {
      std::vector<bool> src(s.n(), false);
      src[v] = true;
      auto t = temporal_broadcast_time(s, src, start, cap);
      if (!t) throw Error("worst_broadcast_time: flooding did not complete within the cap");
      worst = std::max(worst, *t);
    }
  }
  return worst;
}

}  // namespace adcs
