#include "adcs/exact_math.hpp"

#include <algorithm>
#include <cctype>

namespace adcs {

Int pow_int(const Int& base, std::uint64_t exp) {
  Int result = 1;
  Int b = base;
  while (exp > 0) {
    if (exp & 1U) result *= b;
    exp >>= 1U;
    if (exp > 0) b *= b;
  }
  return result;
}

Rational ratio(const Int& a, const Int& b) {
  if (b == 0) throw Error("ratio: zero denominator");
  Rational q(a, b);
  q.canonicalize();
  return q;
}

Rational pow_rat(const Rational& base, std::int64_t exp) {
  if (exp >= 0) {
    Rational r(pow_int(base.get_num(), static_cast<std::uint64_t>(exp)),
               pow_int(base.get_den(), static_cast<std::uint64_t>(exp)));
    r.canonicalize();
    return r;
  }
  if (base == 0) throw Error("pow_rat: zero to a negative power");
  Rational r(pow_int(base.get_den(), static_cast<std::uint64_t>(-exp)),
             pow_int(base.get_num(), static_cast<std::uint64_t>(-exp)));
  r.canonicalize();
  return r;
}

std::size_t bit_length(const Int& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

std::uint32_t ceil_log2(std::uint64_t v) {
  std::uint32_t bits = 0;
  std::uint64_t p = 1;
  while (p < v) {
    p <<= 1U;
    ++bits;
  }
  return bits;
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int floor_of(const Rational& q) { return floor_div(q.get_num(), q.get_den()); }
Int ceil_of(const Rational& q) { return ceil_div(q.get_num(), q.get_den()); }

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) text.push_back(ch);
  if (text.empty()) throw Error("empty rational literal");
  auto digits_only = [](const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
  };
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!digits_only(num, true) || !digits_only(den, false)) throw Error("bad rational literal: " + raw);
    if (num[0] == '+') num.erase(0, 1);
    Rational q{Int(num), Int(den)};
    if (q.get_den() == 0) throw Error("zero denominator: " + raw);
    q.canonicalize();
    return q;
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (!digits_only(whole, false) || (!frac.empty() && !digits_only(frac, false)))
      throw Error("bad rational literal: " + raw);
    Int scale = pow_int(10, frac.size());
    Int num = Int(whole) * scale + (frac.empty() ? Int(0) : Int(frac));
    Rational q(negative ? Int(-num) : num, scale);
    q.canonicalize();
    return q;
  }
  if (!digits_only(text, true)) throw Error("bad rational literal: " + raw);
  if (text[0] == '+') text.erase(0, 1);
  return Rational(Int(text));
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

template <class Pred>
std::int64_t smallest_exponent(std::uint64_t base, std::int64_t lo, Pred holds) {
  if (base < 2) throw Error("exponent search needs base >= 2");
  std::int64_t e = 0;
  Rational b(static_cast<unsigned long>(base));
  if (holds(Rational(1))) {
    Rational val = 1;
    while (e > lo) {
      Rational next = val / b;
      if (!holds(next)) break;
      val = next;
      --e;
      if (e < -100000) throw Error("exponent search diverged");
    }
  } else {
    Rational val = 1;
    while (!holds(val)) {
      val *= b;
      ++e;
      if (e > 100000) throw Error("exponent search diverged");
    }
  }
  return std::max(e, lo);
}

}  // namespace

std::int64_t smallest_pow_at_least(std::uint64_t base, const Rational& x, std::int64_t lo) {
  if (x <= 0) return lo;
  return smallest_exponent(base, lo, [&](const Rational& v) { return v >= x; });
}

std::int64_t smallest_pow_above(std::uint64_t base, const Rational& x, std::int64_t lo) {
  if (x < 0) return lo;
  return smallest_exponent(base, lo, [&](const Rational& v) { return v > x; });
}

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0 && b.hi >= 0) throw Error("interval division by an interval containing zero");
  Interval inv{1 / b.hi, 1 / b.lo};
  return a * inv;
}

Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

namespace {

// atanh(z) for 0 <= z <= 1/3, returned as integer bounds at scale 2^w.
std::pair<Int, Int> atanh_scaled(const Rational& z, unsigned w) {
  Int one = Int(1) << w;
  Int zl = floor_div(z.get_num() * one, z.get_den());
  Int zu = ceil_div(z.get_num() * one, z.get_den());
  Int z2l = floor_div(zl * zl, one);
  Int z2u = ceil_div(zu * zu, one);
  Int powl = zl, powu = zu, suml = 0, sumu = 0;
  for (unsigned long j = 0;; ++j) {
    unsigned long odd = 2 * j + 1;
    if (powu <= 1) {
      // tail bound: z^(2j+1) / ((2j+1)(1 - z^2)) <= powu * 9 / 8
      sumu += 2;
      break;
    }
    suml += floor_div(powl, Int(odd));
    sumu += ceil_div(powu, Int(odd));
    powl = floor_div(powl * z2l, one);
    powu = ceil_div(powu * z2u, one);
  }
  return {suml, sumu};
}

}  // namespace

Interval ln_enclosure(const Rational& x, unsigned bits) {
  if (x <= 0) throw Error("ln of a non-positive value");
  if (x == 1) return Interval::exact(0);
  if (x < 1) {
    Interval inv = ln_enclosure(1 / x, bits);
    return {-inv.hi, -inv.lo};
  }
  unsigned w = bits + 24;
  Int whole = floor_of(x);
  std::size_t m = bit_length(whole) - 1;
  Rational y = x / Rational(Int(1) << static_cast<unsigned>(m));
  Rational z = (y - 1) / (y + 1);
  auto [al, au] = atanh_scaled(z, w);
  auto [l2l, l2u] = atanh_scaled(Rational(1, 3), w);
  Int lo = 2 * al + 2 * Int(static_cast<unsigned long>(m)) * l2l;
  Int hi = 2 * au + 2 * Int(static_cast<unsigned long>(m)) * l2u;
  Rational scale(Int(1) << w);
  Rational rlo(lo), rhi(hi);
  return {rlo / scale, rhi / scale};
}

Interval pow_enclosure(const Rational& base, const Rational& q, unsigned bits) {
  if (base <= 0) throw Error("pow_enclosure needs a positive base");
  const Int& a = q.get_num();
  const Int& b = q.get_den();
  if (!a.fits_slong_p() || !b.fits_ulong_p()) throw Error("exponent too large");
  long an = a.get_si();
  unsigned long bn = b.get_ui();
  if (bn == 1) return Interval::exact(pow_rat(base, an));
  Rational x = pow_rat(base, an < 0 ? -an : an);
  unsigned w = bits + static_cast<unsigned>(bit_length(x.get_den()) / bn) + 24;
  Int scaled_num = x.get_num() << static_cast<unsigned>(w * bn);
  Int nlo = floor_div(scaled_num, x.get_den());
  Int nhi = ceil_div(scaled_num, x.get_den());
  Int rlo, rhi;
  mpz_root(rlo.get_mpz_t(), nlo.get_mpz_t(), bn);
  mpz_root(rhi.get_mpz_t(), nhi.get_mpz_t(), bn);
  if (pow_int(rhi, bn) < nhi) rhi += 1;
  Rational scale(Int(1) << w);
  Interval out{Rational(rlo) / scale, Rational(rhi) / scale};
  if (an < 0) {
    if (out.lo == 0) throw Error("pow_enclosure underflow; raise precision");
    out = Interval{1 / out.hi, 1 / out.lo};
  }
  return out;
}

Int certified_ceil(const std::function<Interval(unsigned)>& f,
                   const std::function<bool(const Int&)>& exact_integer,
                   unsigned start_bits, unsigned max_bits) {
  Int fallback;
  for (unsigned bits = start_bits; bits <= max_bits; bits *= 2) {
    Interval iv = f(bits);
    Int cl = ceil_of(iv.lo);
    Int ch = ceil_of(iv.hi);
    if (cl == ch) return cl;
    if (exact_integer && exact_integer(cl)) return cl;
    fallback = ch;
  }
  return fallback;
}

}  // namespace adcs
