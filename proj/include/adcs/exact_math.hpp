#pragma once

// Exact integer/rational helpers and certified enclosures for the few
// transcendental quantities (natural logs, fractional powers) that enter
// parameter derivation. Nothing here touches floating point.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace adcs {

using Int = mpz_class;
using Rational = mpq_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleParameterError : Error {
  using Error::Error;
};

Int pow_int(const Int& base, std::uint64_t exp);
Rational pow_rat(const Rational& base, std::int64_t exp);
/// a / b in lowest terms; mpq's two-argument constructor does not reduce.
Rational ratio(const Int& a, const Int& b);

// Number of bits in the minimal binary representation (0 for zero).
std::size_t bit_length(const Int& v);
std::uint32_t ceil_log2(std::uint64_t v);

Int floor_div(const Int& a, const Int& b);
Int ceil_div(const Int& a, const Int& b);
Int floor_of(const Rational& q);
Int ceil_of(const Rational& q);

// Parses "3", "-2", "3/4", "0.25" into an exact rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

// Smallest integer e >= lo with base^e >= x (resp. base^e > x), base >= 2.
std::int64_t smallest_pow_at_least(std::uint64_t base, const Rational& x, std::int64_t lo = INT32_MIN);
std::int64_t smallest_pow_above(std::uint64_t base, const Rational& x, std::int64_t lo = INT32_MIN);

// Closed rational interval [lo, hi].
struct Interval {
  Rational lo;
  Rational hi;

  static Interval exact(const Rational& v) { return {v, v}; }
  bool is_exact() const { return lo == hi; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);

// ln(x) for rational x > 0, width at most 2^-bits.
Interval ln_enclosure(const Rational& x, unsigned bits);
// base^q for rational base > 0 and rational exponent q, width about 2^-bits relative.
Interval pow_enclosure(const Rational& base, const Rational& q, unsigned bits);

// Ceiling of a real known only through enclosures at increasing precision.
// Returns the exact ceiling once the enclosure stops straddling an integer;
// if `exact_integer` reports that the value equals some candidate integer,
// that candidate is returned. Falls back to ceil(hi) (a safe upper choice)
// when precision runs out.
Int certified_ceil(const std::function<Interval(unsigned)>& f,
                   const std::function<bool(const Int&)>& exact_integer = {},
                   unsigned start_bits = 96, unsigned max_bits = 4096);

}  // namespace adcs
