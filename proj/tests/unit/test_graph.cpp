#include "adcs/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

using namespace adcs;

namespace {

EvolvingSchedule rounds_of(std::size_t n, std::vector<std::vector<Edge>> rounds, std::uint32_t T) {
  std::vector<ConstituentGraph> gs;
  for (auto& e : rounds) gs.emplace_back(n, std::move(e));
  return EvolvingSchedule::cycling(std::move(gs), T);
}

// Independent check: some simple vertex path whose hops can be assigned
// non-decreasing rounds inside the window (earliest feasible round per hop).
bool naive_t_connected(const EvolvingSchedule& s, std::uint64_t start, std::uint32_t T) {
  const std::size_t n = s.n();
  std::vector<ConstituentGraph> window;
  for (std::uint32_t j = 0; j < T; ++j) window.push_back(s.graph_at(start + j));
  auto earliest = [&](NodeId a, NodeId b, std::uint32_t from) -> std::optional<std::uint32_t> {
    for (std::uint32_t j = from; j < T; ++j)
      if (window[j].has_edge(a, b)) return j;
    return std::nullopt;
  };
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      bool found = false;
      std::vector<bool> used(n, false);
      std::function<void(NodeId, std::uint32_t)> dfs = [&](NodeId x, std::uint32_t t) {
        if (found) return;
        if (x == v) {
          found = true;
          return;
        }
        used[x] = true;
        for (NodeId y = 0; y < n; ++y)
          if (!used[y])
            if (auto r = earliest(x, y, t)) dfs(y, *r);
        used[x] = false;
      };
      dfs(u, 0);
      if (!found) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("constituent graphs are canonical") {
  ConstituentGraph g(4, {{2, 1}, {1, 2}, {0, 3}});
  CHECK(g.edges() == std::vector<Edge>{{0, 3}, {1, 2}});
  CHECK(g.has_edge(3, 0));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK_THROWS_AS(ConstituentGraph(3, {{0, 3}}), Error);
  CHECK_THROWS_AS(ConstituentGraph(3, {{1, 1}}), Error);
  CHECK(ConstituentGraph::complete(4).edges().size() == 6);
  CHECK(ConstituentGraph::path(4).max_degree() == 2);
  CHECK(ConstituentGraph::star(5).max_degree() == 4);
  CHECK(ConstituentGraph::cycle(5).connected());
  CHECK_FALSE(ConstituentGraph(3, {{0, 1}}).connected());
  CHECK(ConstituentGraph(4, {{2, 3}}).components() == std::vector<NodeId>{0, 1, 2, 2});
}

TEST_CASE("relabeling moves edges with the permutation") {
  const auto g = ConstituentGraph::path(3).relabeled({2, 0, 1});
  CHECK(g.has_edge(2, 0));
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(2, 1));
}

TEST_CASE("union graph") {
  const auto s = rounds_of(3, {{{0, 1}}, {{1, 2}}}, 2);
  CHECK(union_graph(s, 0, 2).edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(union_graph(rounds_of(3, {{}}, 1), 0, 3).edges().empty());
  CHECK_THROWS_AS(union_graph(s, 0, 0), Error);

  // Membership check against a random 5-node schedule.
  const auto r = EvolvingSchedule::random_t_connected(5, 3, 11);
  const auto u = union_graph(r, 4, 3);
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) {
      bool any = false;
      for (std::uint64_t t = 4; t < 7; ++t) any = any || r.graph_at(t).has_edge(a, b);
      CHECK(u.has_edge(a, b) == any);
    }
}

TEST_CASE("T-connectivity examples") {
  CHECK(is_t_connected(EvolvingSchedule::static_graph(ConstituentGraph::path(5), 1), 0, 1));
  const auto m = rounds_of(4, {{{0, 1}, {2, 3}}, {{1, 2}, {0, 3}}}, 2);
  CHECK(is_t_connected(m, 0, 2));
  CHECK_FALSE(is_t_connected(m, 0, 1));
  const auto iso = rounds_of(4, {{{0, 1}, {1, 2}}, {{0, 2}}}, 2);
  CHECK_FALSE(is_t_connected(iso, 0, 2));
}

TEST_CASE("T-connectivity agrees with path enumeration") {
  std::mt19937_64 rng(3);
  int agree_true = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const auto T = static_cast<std::uint32_t>(1 + rng() % 3);
    std::vector<std::vector<Edge>> rounds(T);
    for (auto& r : rounds)
      for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b)
          if (rng() % 3 == 0) r.emplace_back(a, b);
    const auto s = rounds_of(n, rounds, T);
    const bool fast = is_t_connected(s, 0, T);
    CHECK(fast == naive_t_connected(s, 0, T));
    if (fast) {
      ++agree_true;
      CHECK(union_graph(s, 0, T).connected());
    }
  }
  CHECK(agree_true > 20);
}

TEST_CASE("named schedule families are T-connected at every offset") {
  for (std::size_t n = 2; n <= 7; ++n)
    for (std::uint32_t T : {1u, 2u, 3u})
      for (const char* name : {"static-clique", "static-path", "static-cycle", "static-star",
                               "matching-alternation", "random-t-connected"}) {
        const auto s = EvolvingSchedule::named(name, n, T, 5);
        CAPTURE(name);
        CAPTURE(n);
        CAPTURE(T);
        CHECK_FALSE(first_disconnected_window(s, 3 * s.period().value_or(16)).has_value());
      }
}

TEST_CASE("matching alternation with T=2 is disconnected per round") {
  const auto s = EvolvingSchedule::matching_alternation(6, 2);
  CHECK_FALSE(s.graph_at(0).connected());
  CHECK_FALSE(s.graph_at(1).connected());
  CHECK(is_t_connected(s, 0, 2));
  CHECK(is_t_connected(s, 1, 2));
}

TEST_CASE("random schedules replay from their seed") {
  const auto a = EvolvingSchedule::random_t_connected(6, 2, 42);
  const auto b = EvolvingSchedule::random_t_connected(6, 2, 42);
  const auto c = EvolvingSchedule::random_t_connected(6, 2, 43);
  bool differs = false;
  for (std::uint64_t t = 0; t < 40; ++t) {
    CHECK(a.graph_at(t) == b.graph_at(t));
    differs = differs || !(a.graph_at(t) == c.graph_at(t));
  }
  CHECK(differs);
  CHECK(a.period() == std::optional<std::uint64_t>(32));
  CHECK(a.graph_at(5) == a.graph_at(37));
}

TEST_CASE("temporal reach closes within each round") {
  const auto s = EvolvingSchedule::static_graph(ConstituentGraph::path(4), 1);
  CHECK(temporal_reach(s, {true, false, false, false}, 0, 1) == std::vector<bool>(4, true));
  const auto m = rounds_of(4, {{{0, 1}}, {{1, 2}}, {{2, 3}}}, 3);
  CHECK(temporal_reach(m, {true, false, false, false}, 0, 2) == std::vector<bool>{true, true, true, false});
  CHECK(temporal_reach(m, {true, false, false, false}, 1, 2) == std::vector<bool>{true, false, false, false});
}

TEST_CASE("aligned and every-offset window modes differ") {
  // Rounds 0 and 3 are spanning paths; rounds 1 and 2 together leave {0,1} cut off.
  const auto s = rounds_of(4, {{{0, 1}, {1, 2}, {2, 3}}, {{0, 1}}, {{2, 3}}, {{0, 1}, {1, 2}, {2, 3}}}, 2);
  CHECK(first_disconnected_window(s, 4, WindowMode::aligned) == std::nullopt);
  CHECK(first_disconnected_window(s, 4, WindowMode::every_offset) == std::optional<std::uint64_t>(1));
}

TEST_CASE("schedule files round-trip") {
  const auto s = EvolvingSchedule::matching_alternation(5, 2);
  std::stringstream buf;
  write_schedule(buf, s, 4);
  const auto text = buf.str();
  CHECK(text.rfind("n=5 T=2\n", 0) == 0);
  const auto back = read_schedule(buf);
  CHECK(back.n() == 5);
  CHECK(back.T() == 2);
  for (std::uint64_t t = 0; t < 8; ++t) CHECK(back.graph_at(t) == s.graph_at(t));

  std::stringstream with_empty("n=3 T=1\nt=0: 0-1,1-2\nt=1:\n");
  const auto e = read_schedule(with_empty);
  CHECK(e.graph_at(1).edges().empty());

  std::stringstream bad("n=3 T=1\nt=0: 0-7\n");
  CHECK_THROWS_AS(read_schedule(bad), Error);
  std::stringstream no_header("t=0: 0-1\n");
  CHECK_THROWS_AS(read_schedule(no_header), Error);
}
