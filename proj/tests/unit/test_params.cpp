#include "adcs/params.hpp"

#include <doctest.h>

#include <cmath>

using namespace adcs;

namespace {

double logk(double k, double x) { return std::log(x) / std::log(k); }

// Side conditions checked in floating point with a safety margin, independent
// of the exact derivation.
void check_side_conditions(const RmcParams& P) {
  const double k = static_cast<double>(P.k), d = static_cast<double>(P.d), T = P.T;
  const double eps = P.epsilon.get_d();
  const double a = static_cast<double>(P.alpha), b = static_cast<double>(P.beta);
  const double g = static_cast<double>(P.gamma), dl = static_cast<double>(P.delta);
  CHECK(d >= 2 * std::pow(k, 1 + eps) - 1e-9);
  CHECK(d < 2 * std::pow(k, 1 + eps) + 1);
  CHECK(g > logk(k, d - 1));
  const double kg = std::pow(k, g);
  CHECK(kg + 1 - d > 0);
  CHECK(dl > logk(k, d * kg / (kg + 1 - d)));
  CHECK(a >= std::max(1 + g + logk(k, 3), logk(k, 3 * T)) - 1e-9);
  CHECK(b >= logk(k, std::max(d * (2 * std::pow(k, dl) + 1), 3 * T)) - 1e-9);
  const double y = 5 + a + 2 * eps - 2 * logk(k, std::pow(k, eps) - 1);
  CHECK(P.c >= 2 * T + 4 + std::max(5 * b, y) - 1e-9);
  CHECK(P.r % P.T == 0);
  CHECK(P.r == P.b * P.T);
  CHECK(P.denominator == pow_int(Int(static_cast<unsigned long>(P.d)), P.c));
  CHECK(P.rho_lower < P.rho_upper);
}

}  // namespace

TEST_CASE("rmc parameters at k=2") {
  const auto P = derive_rmc_params(2, 1, 1, 1);
  CHECK(P.d == 8);
  REQUIRE(P.tau);
  CHECK(*P.tau == Rational(3, 4));
  CHECK(P.gamma == 3);
  CHECK(P.delta == 7);
  CHECK(P.alpha == 6);
  CHECK(P.beta == 12);
  CHECK(P.c == 66);
  CHECK(P.epoch_rounds() == Int(static_cast<unsigned long>(P.p)) * Int(static_cast<unsigned long>(P.r)) + 8);
  check_side_conditions(P);
}

TEST_CASE("rmc parameters at k=4") {
  const auto P = derive_rmc_params(4, 1, 1, 1);
  CHECK(P.d == 32);
  CHECK(*P.tau == Rational(15, 16));
  check_side_conditions(P);
}

TEST_CASE("rmc side conditions across k, ell, T, epsilon") {
  for (std::uint64_t k : {2, 3, 4, 5})
    for (std::uint64_t ell : {1, 2})
      for (std::uint32_t T : {1u, 2u})
        for (const Rational& eps : {Rational(1), Rational(1, 2), Rational(3, 2)}) {
          if (ell >= k) continue;
          CAPTURE(k);
          CAPTURE(ell);
          CAPTURE(T);
          const auto P = derive_rmc_params(k, ell, T, eps);
          check_side_conditions(P);
          CHECK(P.tau.has_value() == (eps == 1 || k == 4));
        }
}

TEST_CASE("tau threshold is decided exactly") {
  const auto P = derive_rmc_params(2, 1, 1, 1);
  // tau = 3/4: exceed means strictly greater.
  const Int three_quarters = P.denominator * 3 / 4;
  CHECK_FALSE(P.exceeds_tau(three_quarters));
  CHECK(P.exceeds_tau(three_quarters + 1));
  CHECK(P.exceeds_tau(P.denominator));

  // Irrational threshold 1 - 1/2^(3/2).
  const auto Q = derive_rmc_params(2, 1, 1, Rational(1, 2));
  CHECK_FALSE(Q.tau.has_value());
  const double tau = 1 - 1 / std::pow(2.0, 1.5);
  const Rational below(Int(static_cast<long>((tau - 1e-6) * 1e9)), Int(1000000000));
  const Rational above(Int(static_cast<long>((tau + 1e-6) * 1e9)), Int(1000000000));
  CHECK_FALSE(Q.exceeds_tau(floor_of(below * Q.denominator)));
  CHECK(Q.exceeds_tau(ceil_of(above * Q.denominator)));
}

TEST_CASE("rmc parameter preconditions") {
  CHECK_THROWS_AS(derive_rmc_params(1, 1, 1, 1), InfeasibleParameterError);
  CHECK_THROWS_AS(derive_rmc_params(3, 0, 1, 1), InfeasibleParameterError);
  CHECK_THROWS_AS(derive_rmc_params(3, 1, 1, 0), InfeasibleParameterError);
  CHECK_THROWS_AS(derive_rmc_params(3, 1, 0, 1), InfeasibleParameterError);
}

TEST_CASE("a known isoperimetric bound shortens phases") {
  const auto unknown = derive_rmc_params(4, 1, 1, 1);
  const auto known = derive_rmc_params(4, 1, 1, 1, Rational(1));
  CHECK(known.i_min_known);
  CHECK(unknown.i_min_used == Rational(1, 2));
  CHECK(known.b < unknown.b);
}

TEST_CASE("reduced mode divides p, r and c and is flagged") {
  const auto full = derive_rmc_params(3, 1, 2, 1);
  ReducedMode rm{8, 64, 1};
  const auto red = derive_rmc_params(3, 1, 2, 1, std::nullopt, rm);
  CHECK(red.reduced);
  CHECK_FALSE(full.reduced);
  CHECK(red.p == (full.p + 7) / 8);
  CHECK(red.b == (full.b + 63) / 64);
  CHECK(red.c == full.c);
  CHECK(red.r == red.b * 2);
}

TEST_CASE("k^(1+eps) < n comparisons") {
  CHECK(pow_one_plus_eps_below(2, 1, 5));
  CHECK_FALSE(pow_one_plus_eps_below(2, 1, 4));
  CHECK(pow_one_plus_eps_below(4, Rational(1, 2), 9));
  CHECK_FALSE(pow_one_plus_eps_below(4, Rational(1, 2), 8));
}

TEST_CASE("multiplicity parameters") {
  const auto M = derive_mult_params(2, 1);
  CHECK(M.d == 4);
  CHECK(M.alpha == 3);
  CHECK(M.c == 21);
  CHECK(M.phi_min == Rational(1, 4));
  CHECK(M.b == static_cast<std::uint64_t>(std::ceil(12 * 16 * std::log(2.0))));
  CHECK(M.r == M.b);

  for (std::uint64_t n = 2; n <= 9; ++n)
    for (std::uint32_t T : {1u, 2u, 4u}) {
      const auto P = derive_mult_params(n, T);
      CHECK(P.d >= 2 * n);
      CHECK(static_cast<double>(P.alpha) >= std::max(logk(static_cast<double>(n), 3.0 * T), 3.0) - 1e-9);
      CHECK(P.c >= 5 * P.alpha + 2 * T + 4);
      const double phi = P.phi_min.get_d();
      CHECK(static_cast<double>(P.b) >= 4 * P.alpha * std::log(static_cast<double>(n)) / (phi * phi) - 1e-6);
      CHECK(P.r == T * P.b);
    }
  // n=2, T=2: log_2 6 > 2 but < 3, so alpha stays 3; n=2, T=3: log_2 9 > 3.
  CHECK(derive_mult_params(2, 2).alpha == 3);
  CHECK(derive_mult_params(2, 3).alpha == 4);
  CHECK(derive_mult_params(3, 1, Rational(1)).phi_min == Rational(1, 6));
}

TEST_CASE("broadcast rounds") {
  CHECK(broadcast_rounds(2, 1) == 1);                 // ln 2 / ln 2
  CHECK(broadcast_rounds(4, 1, Rational(1)) == 2);    // ln 4 / ln 2, exact
  CHECK(broadcast_rounds(4, 1) == 4);                 // ln 4 / ln 1.5 = 3.42
  CHECK(broadcast_rounds(4, 2) == 7);                 // 6.84
  CHECK(broadcast_rounds(8, 1, Rational(1)) == 3);
  CHECK(broadcast_rounds(9, 2, Rational(2)) == 4);    // 2 ln 9 / ln 3, exact
  for (std::uint64_t n = 2; n <= 20; ++n) {
    const double v = std::log(static_cast<double>(n)) / std::log(1 + 2.0 / static_cast<double>(n));
    CHECK(broadcast_rounds(n, 1) == static_cast<std::uint64_t>(std::ceil(v - 1e-12)));
  }
  CHECK_THROWS_AS(broadcast_rounds(1, 1), InfeasibleParameterError);
}
