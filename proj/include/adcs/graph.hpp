#pragma once

#include "adcs/exact_math.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adcs {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

struct SizeGuardError : Error {
  using Error::Error;
};

/// One round's undirected, simple link set over nodes 0..n-1.
class ConstituentGraph {
 public:
  ConstituentGraph() = default;
  explicit ConstituentGraph(std::size_t n, std::vector<Edge> edges = {});

  static ConstituentGraph complete(std::size_t n);
  static ConstituentGraph path(std::size_t n);
  static ConstituentGraph cycle(std::size_t n);
  static ConstituentGraph star(std::size_t n);

  std::size_t n() const { return n_; }
  /// Canonical edge list: (u,v) with u < v, sorted, no duplicates.
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeId u, NodeId v) const;

  std::vector<std::vector<NodeId>> adjacency() const;
  std::vector<std::size_t> degrees() const;
  std::size_t max_degree() const;
  bool connected() const;
  /// Component label per node (labels are the smallest member of each component).
  std::vector<NodeId> components() const;

  ConstituentGraph relabeled(const std::vector<NodeId>& perm) const;

  friend bool operator==(const ConstituentGraph&, const ConstituentGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

enum class ScheduleKind { static_graph, cycling, matching_alternation, random_t_connected };

/// Deterministic adversary: graph_at(t) depends only on the construction
/// arguments and t.
class EvolvingSchedule {
 public:
  static EvolvingSchedule static_graph(ConstituentGraph g, std::uint32_t T, std::string label = "static");
  static EvolvingSchedule cycling(std::vector<ConstituentGraph> rounds, std::uint32_t T,
                                  std::string label = "cycling");
  static EvolvingSchedule matching_alternation(std::size_t n, std::uint32_t T);
  /// Every T-th round (starting at a seed-chosen offset) carries a fresh random
  /// spanning tree; every round also carries sparse random edges. With
  /// period_windows > 0 the pattern repeats after that many windows.
  static EvolvingSchedule random_t_connected(std::size_t n, std::uint32_t T, std::uint64_t seed,
                                             std::uint64_t period_windows = kDefaultRandomPeriod);
  /// Builds one of the named families: static-clique, static-path,
  /// static-cycle, static-star, matching-alternation, random-t-connected.
  static EvolvingSchedule named(const std::string& name, std::size_t n, std::uint32_t T, std::uint64_t seed);

  static constexpr std::uint64_t kDefaultRandomPeriod = 16;

  ConstituentGraph graph_at(std::uint64_t t) const;

  std::size_t n() const { return n_; }
  std::uint32_t T() const { return T_; }
  ScheduleKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }
  /// Length of the repeating pattern in rounds, if the schedule is periodic.
  std::optional<std::uint64_t> period() const;

  /// Same schedule with node v renamed perm[v].
  EvolvingSchedule relabeled(const std::vector<NodeId>& perm) const;

 private:
  ConstituentGraph raw_graph_at(std::uint64_t t) const;

  ScheduleKind kind_ = ScheduleKind::static_graph;
  std::size_t n_ = 0;
  std::uint32_t T_ = 1;
  std::uint64_t seed_ = 0;
  std::uint64_t period_windows_ = 0;
  std::uint64_t tree_offset_ = 0;
  std::string label_;
  std::vector<ConstituentGraph> pattern_;
  std::vector<NodeId> relabel_;
};

/// Schedule text format: header "n=<int> T=<int>", then "t=<int>: u-v,u-v,...".
EvolvingSchedule read_schedule(std::istream& in);
EvolvingSchedule load_schedule_file(const std::string& path);
void write_schedule(std::ostream& out, const EvolvingSchedule& s, std::uint64_t rounds);

ConstituentGraph union_graph(const EvolvingSchedule& s, std::uint64_t start, std::uint64_t window);

/// Nodes reachable from `sources` by opportunistic paths in rounds
/// start..start+rounds-1, closing under each round's connectivity.
std::vector<bool> temporal_reach(const EvolvingSchedule& s, const std::vector<bool>& sources,
                                 std::uint64_t start, std::uint64_t rounds);

bool is_t_connected(const EvolvingSchedule& s, std::uint64_t start, std::uint32_t T);

enum class WindowMode { every_offset, aligned };

/// Checks windows starting in [0, horizon); returns the first failing start.
std::optional<std::uint64_t> first_disconnected_window(const EvolvingSchedule& s, std::uint64_t horizon,
                                                       WindowMode mode = WindowMode::every_offset);

}  // namespace adcs
