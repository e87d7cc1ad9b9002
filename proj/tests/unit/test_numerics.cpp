#include "adcs/codec.hpp"
#include "adcs/expansion.hpp"
#include "adcs/numerics.hpp"

#include <doctest.h>

#include <random>

using namespace adcs;

TEST_CASE("fixed-point parameters") {
  CHECK_THROWS_AS(FixedPointParams(1, 2), Error);
  CHECK_THROWS_AS(FixedPointParams(4, 1), Error);
  CHECK(FixedPointParams(4, 3).denominator() == 64);
}

TEST_CASE("potentials") {
  const FixedPointParams s(2, 2);
  CHECK(Potential::integer(s, 1).numerator() == 4);
  CHECK(Potential::from_rational(s, Rational(3, 4)).numerator() == 3);
  CHECK_THROWS_AS(Potential::from_rational(s, Rational(1, 8)), Error);
  CHECK_THROWS_AS(Potential(s, Int(-1)), Error);
  CHECK(Potential(s, Int(3)).value() == Rational(3, 4));
  CHECK(Potential(s, Int(3)).to_string() == "3/2^2");
  CHECK(potential_string(Int(5), 4, 3) == "5/4^3");
}

TEST_CASE("truncated shares") {
  const FixedPointParams s(2, 2);
  CHECK(truncate_share(Potential::integer(s, 1), s).value() == Rational(1, 2));
  CHECK(truncate_share(Potential::from_rational(s, Rational(3, 4)), s).value() == Rational(1, 4));
  CHECK(truncate_share(Potential::zero(s), s).value() == 0);
  CHECK_THROWS_AS(truncate_share(Potential::zero(FixedPointParams(3, 2)), s), ScaleMismatchError);
}

TEST_CASE("potential update examples") {
  const FixedPointParams s(4, 2);
  const auto one = Potential::integer(s, 1);
  const auto zero = Potential::zero(s);
  CHECK(potential_update(one, {}, s) == one);
  const std::vector<Potential> from0{one}, from1{zero};
  const auto a = potential_update(one, from1, s);
  const auto b = potential_update(zero, from0, s);
  CHECK(a.value() == Rational(3, 4));
  CHECK(b.value() == Rational(1, 4));
  CHECK(a.value() + b.value() == 1);

  // Two neighbors with d = 4 is not below d/2.
  const std::vector<Potential> two{zero, zero};
  CHECK_THROWS_AS(potential_update(one, two, s), DegreeOverflowError);
  CHECK_NOTHROW(potential_update(one, two, s, UpdateMode::lenient));
}

TEST_CASE("random 6-node round conserves the exact sum") {
  const FixedPointParams s(16, 3);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Edge> e;
    for (NodeId u = 0; u < 6; ++u)
      for (NodeId v = u + 1; v < 6; ++v)
        if (rng() % 2) e.emplace_back(u, v);
    const ConstituentGraph g(6, e);
    const auto adj = g.adjacency();
    std::vector<Potential> phi;
    for (int v = 0; v < 6; ++v) phi.emplace_back(s, Int(static_cast<unsigned long>(rng() % 20000)));
    Int before = 0, after = 0;
    for (const auto& p : phi) before += p.numerator();
    for (std::size_t v = 0; v < 6; ++v) {
      std::vector<Potential> in;
      for (NodeId u : adj[v]) in.push_back(phi[u]);
      const auto next = potential_update(phi[v], in, s);
      CHECK(next.numerator() >= 0);
      after += next.numerator();
    }
    CHECK(before == after);
  }
}

TEST_CASE("in-place exchange agrees with the value form") {
  const FixedPointParams s(10, 3);
  const std::vector<Potential> in{Potential(s, Int(777)), Potential(s, Int(12))};
  const Potential phi(s, Int(431));
  Int num = phi.numerator(), scratch;
  const Int share_sum = Int(77) + Int(1);
  apply_truncated_exchange(num, share_sum, in.size(), s.d, scratch);
  CHECK(num == potential_update(phi, in, s).numerator());
}

TEST_CASE("truncation error per node per round is at most |N| / d^c") {
  const std::uint64_t d = 12;
  const FixedPointParams s(d, 3);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Edge> e;
    for (NodeId u = 0; u < 5; ++u)
      for (NodeId v = u + 1; v < 5; ++v)
        if (rng() % 2) e.emplace_back(u, v);
    const ConstituentGraph g(5, e);
    const auto P = share_matrix(g, d);
    std::vector<Potential> phi;
    std::vector<Rational> x;
    for (int v = 0; v < 5; ++v) {
      phi.emplace_back(s, Int(static_cast<unsigned long>(rng() % 5000)));
      x.push_back(phi.back().value());
    }
    const auto ideal = P.apply(x);
    const auto adj = g.adjacency();
    for (std::size_t v = 0; v < 5; ++v) {
      std::vector<Potential> in;
      for (NodeId u : adj[v]) in.push_back(phi[u]);
      const Rational gap = abs(potential_update(phi[v], in, s).value() - ideal[v]);
      CHECK(gap <= Rational(static_cast<long>(adj[v].size())) / Rational(s.denominator()));
    }
  }
}

TEST_CASE("wire codec round-trips and sizes") {
  WireMessage m;
  m.kind = MsgKind::rmc_gossip;
  m.status = Status::high;
  m.potential = Int("123456789012345678901234567890");
  const auto e = encode(m);
  CHECK(decode(e) == m);
  CHECK(e.bits == encoded_bits(m));
  CHECK(e.bits == 4 + 2 + bit_length(m.potential));

  WireMessage st;
  st.kind = MsgKind::rmc_status;
  st.status = Status::done;
  CHECK(encoded_bits(st) == 6);
  CHECK(decode(encode(st)) == st);

  WireMessage f;
  f.kind = MsgKind::flag;
  f.flag = true;
  CHECK(encoded_bits(f) == 5);
  CHECK(decode(encode(f)) == f);

  WireMessage z;
  z.kind = MsgKind::potential;
  CHECK(encoded_bits(z) == 5);
  CHECK(decode(encode(z)) == z);

  CHECK(congestion_bound(1, 8, 10) == 4 + 0 + 30 + 8);
  CHECK(congestion_bound(3, 5, 2) == 4 + 2 + 6 + 8);
}
