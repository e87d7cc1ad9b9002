#include "adcs/expansion.hpp"

#include <doctest.h>

#include <random>

using namespace adcs;

namespace {

// Brute-force reference over all subsets, written independently of the library.
Rational brute_isoperimetric(const ConstituentGraph& g) {
  const std::size_t n = g.n();
  std::optional<Rational> best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (size > n / 2) continue;
    std::size_t boundary = 0;
    for (auto [u, v] : g.edges()) boundary += ((mask >> u) & 1) != ((mask >> v) & 1);
    const Rational r = ratio(static_cast<long>(boundary), static_cast<long>(size));
    if (!best || r < *best) best = r;
  }
  return *best;
}

}  // namespace

TEST_CASE("share matrix examples") {
  const auto k2 = share_matrix(ConstituentGraph::complete(2), 4);
  CHECK(k2.at(0, 0) == Rational(3, 4));
  CHECK(k2.at(0, 1) == Rational(1, 4));
  CHECK(k2.at(1, 0) == Rational(1, 4));
  CHECK(k2.at(1, 1) == Rational(3, 4));

  const auto empty = share_matrix(ConstituentGraph(3), 5);
  CHECK(empty == ShareMatrix::identity(3));

  const auto p3 = share_matrix(ConstituentGraph::path(3), 8);
  CHECK(p3.doubly_stochastic());
  for (std::size_t u = 0; u < 3; ++u) {
    Rational row = 0;
    for (std::size_t v = 0; v < 3; ++v) row += p3.at(u, v);
    CHECK(row == 1);
    CHECK(p3.at(u, u) >= Rational(1, 2));
  }
  CHECK_THROWS_AS(share_matrix(ConstituentGraph::path(3), 4), DegreeOverflowError);
  CHECK_NOTHROW(share_matrix(ConstituentGraph::path(3), 5));
}

TEST_CASE("window products") {
  const auto k2 = EvolvingSchedule::static_graph(ConstituentGraph::complete(2), 2);
  const auto sq = window_product(k2, 0, 2, 4);
  CHECK(sq.at(0, 0) == Rational(5, 8));
  CHECK(sq.at(0, 1) == Rational(3, 8));
  CHECK(window_product(k2, 0, 1, 4) == share_matrix(ConstituentGraph::complete(2), 4));

  const auto none = EvolvingSchedule::static_graph(ConstituentGraph(4), 3);
  CHECK(window_product(none, 0, 3, 7) == ShareMatrix::identity(4));

  // Products are applied in round order: x P0 P1.
  const auto s = EvolvingSchedule::cycling({ConstituentGraph(3, {{0, 1}}), ConstituentGraph(3, {{1, 2}})}, 2);
  const auto P = window_product(s, 0, 2, 4);
  const std::vector<Rational> x{1, 0, 0};
  const auto step1 = share_matrix(s.graph_at(0), 4).apply(x);
  const auto step2 = share_matrix(s.graph_at(1), 4).apply(step1);
  CHECK(P.apply(x) == step2);
  CHECK(P.doubly_stochastic());
}

TEST_CASE("isoperimetric number examples") {
  CHECK(isoperimetric_number(ConstituentGraph::complete(4)) == 2);
  CHECK(isoperimetric_number(ConstituentGraph::path(4)) == Rational(1, 2));
  CHECK(isoperimetric_number(ConstituentGraph(4, {{0, 1}, {1, 2}})) == 0);
  EnumerationCaps caps;
  caps.isoperimetric = 5;
  CHECK_THROWS_AS(isoperimetric_number(ConstituentGraph::path(6), caps), SizeGuardError);
}

TEST_CASE("isoperimetric number matches brute force") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<Edge> e;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (rng() % 2) e.emplace_back(u, v);
    ConstituentGraph g(n, e);
    const auto i = isoperimetric_number(g);
    CHECK(i == brute_isoperimetric(g));
    CHECK((i > 0) == g.connected());
  }
}

TEST_CASE("conductance examples") {
  CHECK(conductance(ShareMatrix::identity(4)) == 0);
  CHECK(conductance(share_matrix(ConstituentGraph::complete(2), 4)) == Rational(1, 4));
  EnumerationCaps caps;
  caps.conductance = 3;
  CHECK_THROWS_AS(conductance(ShareMatrix::identity(4), caps), SizeGuardError);
}

TEST_CASE("conductance of a window is at least i(union) / d^T") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed)
    for (std::uint32_t T : {1u, 2u}) {
      const auto s = EvolvingSchedule::random_t_connected(5, T, seed);
      const std::uint64_t d = 50;
      for (std::uint64_t j = 0; j < 6; ++j) {
        const auto st = window_stats(s, j, d);
        CHECK(st.window_index == j);
        CHECK(st.isoperimetric > 0);
        CHECK(st.conductance >= st.isoperimetric / Rational(pow_int(Int(50), T)));
      }
    }
}

TEST_CASE("minimum window isoperimetric number") {
  const auto s = EvolvingSchedule::matching_alternation(4, 2);
  const auto m = min_window_isoperimetric(s, 2);
  CHECK(m == std::min(isoperimetric_number(union_graph(s, 0, 2)), isoperimetric_number(union_graph(s, 1, 2))));
  CHECK(m > 0);
}

TEST_CASE("matrix algebra") {
  const auto a = share_matrix(ConstituentGraph::path(3), 5);
  const auto b = share_matrix(ConstituentGraph::complete(3), 5);
  const auto ab = a * b;
  CHECK(ab.doubly_stochastic());
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t v = 0; v < 3; ++v) {
      Rational x = 0;
      for (std::size_t w = 0; w < 3; ++w) x += a.at(u, w) * b.at(w, v);
      CHECK(ab.at(u, v) == x);
    }
}
