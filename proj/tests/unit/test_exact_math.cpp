#include "adcs/exact_math.hpp"

#include <doctest.h>

#include <cmath>

using namespace adcs;

TEST_CASE("rational literals parse exactly") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational(" 1 / 3 ") == Rational(1, 3));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK(to_string(ratio(6, 4)) == "3/2");
  CHECK(to_string(ratio(4, 2)) == "2");
  CHECK(ratio(-2, 6) == Rational(-1, 3));
  CHECK_THROWS_AS(ratio(1, 0), Error);
}

TEST_CASE("integer helpers") {
  CHECK(pow_int(3, 4) == 81);
  CHECK(pow_rat(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(bit_length(Int(0)) == 0);
  CHECK(bit_length(Int(255)) == 8);
  CHECK(bit_length(Int(256)) == 9);
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(8) == 3);
  CHECK(floor_div(Int(-7), Int(2)) == -4);
  CHECK(ceil_div(Int(7), Int(2)) == 4);
  CHECK(floor_of(Rational(-1, 3)) == -1);
  CHECK(ceil_of(Rational(1, 3)) == 1);
}

TEST_CASE("power searches respect strictness") {
  CHECK(smallest_pow_at_least(2, Rational(8)) == 3);
  CHECK(smallest_pow_above(2, Rational(8)) == 4);
  CHECK(smallest_pow_at_least(3, Rational(1, 9)) == -2);
  CHECK(smallest_pow_at_least(10, Rational(5), 0) == 1);
}

TEST_CASE("ln enclosures contain the true value and are narrow") {
  for (auto x : {Rational(2), Rational(1, 3), Rational(10), Rational(7, 5)}) {
    const Interval I = ln_enclosure(x, 64);
    const double v = std::log(x.get_d());
    CHECK(I.lo.get_d() <= v + 1e-12);
    CHECK(I.hi.get_d() >= v - 1e-12);
    CHECK(I.hi - I.lo <= Rational(1, Int(1) << 60));
  }
  CHECK(ln_enclosure(Rational(1), 64).is_exact());
}

TEST_CASE("pow enclosures bracket fractional powers") {
  const Interval I = pow_enclosure(Rational(2), Rational(1, 2), 80);
  CHECK(I.lo * I.lo <= 2);
  CHECK(I.hi * I.hi >= 2);
  const Interval J = pow_enclosure(Rational(4), Rational(3, 2), 80);
  CHECK(J.lo <= 8);
  CHECK(J.hi >= 8);
}

TEST_CASE("certified ceiling resolves exact integers") {
  // ln 8 / ln 2 = 3 exactly; enclosures always straddle 3.
  auto f = [](unsigned bits) { return ln_enclosure(Rational(8), bits) / ln_enclosure(Rational(2), bits); };
  auto exact = [](const Int& N) { return N == 3; };
  CHECK(certified_ceil(f, exact) == 3);
  // ln 10 / ln 2 = 3.32...
  auto g = [](unsigned bits) { return ln_enclosure(Rational(10), bits) / ln_enclosure(Rational(2), bits); };
  CHECK(certified_ceil(g) == 4);
}

TEST_CASE("interval arithmetic") {
  const Interval a{Rational(1), Rational(2)}, b{Rational(-1), Rational(3)};
  CHECK((a + b).lo == 0);
  CHECK((a - b).hi == 3);
  CHECK((a * b).lo == -2);
  CHECK((a * b).hi == 6);
  CHECK_THROWS_AS(a / b, Error);
  CHECK(max(a, b).hi == 3);
}
