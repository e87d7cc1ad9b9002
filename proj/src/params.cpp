#include "adcs/params.hpp"

#include <algorithm>

namespace adcs {

namespace {

Int root_floor(const Int& x, unsigned long b) {
  Int r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), b);
  return r;
}

std::uint64_t to_u64(const Int& v, const char* what) {
  if (v < 0 || !v.fits_ulong_p()) throw InfeasibleParameterError(std::string(what) + " does not fit in 64 bits");
  return v.get_ui();
}

Int ui(std::uint64_t v) { return Int(static_cast<unsigned long>(v)); }

// Bounds of ln over an interval of positive rationals.
Interval ln_of(const Interval& x, unsigned bits) {
  return {ln_enclosure(x.lo, bits).lo, ln_enclosure(x.hi, bits).hi};
}

// 5 + 2 eps - 2 log_k(k^eps - 1). log_k(k^eps - 1) is rational only when
// k^eps = 2 (then it is 0), because k^eps - 1 shares no prime with k.
std::optional<Rational> y_term_exact(std::uint64_t k, const Rational& eps) {
  const unsigned long a = eps.get_num().get_ui();
  const unsigned long b = eps.get_den().get_ui();
  if (pow_int(ui(k), a) == pow_int(Int(2), b)) return Rational(5) + 2 * eps;
  return std::nullopt;
}

Interval y_term(std::uint64_t k, const Rational& eps, unsigned bits) {
  if (auto exact = y_term_exact(k, eps)) return Interval::exact(*exact);
  Interval m = pow_enclosure(Rational(ui(k)), eps, bits) - Interval::exact(1);
  if (m.lo <= 0) throw InfeasibleParameterError("k^eps - 1 not separated from zero at working precision");
  Interval log_m = ln_of(m, bits) / ln_enclosure(Rational(ui(k)), bits);
  return Interval::exact(Rational(5) + 2 * eps) - Interval::exact(2) * log_m;
}

Rational kpow(std::uint64_t k, std::int64_t e) { return pow_rat(Rational(ui(k)), e); }

}  // namespace

bool pow_one_plus_eps_below(std::uint64_t k, const Rational& epsilon, std::uint64_t n) {
  const unsigned long a = epsilon.get_num().get_ui();
  const unsigned long b = epsilon.get_den().get_ui();
  return pow_int(ui(k), a + b) < pow_int(ui(n), b);
}

bool RmcParams::exceeds_tau(const Int& num) const {
  const Int ell_d = ui(ell) * denominator;
  if (num >= ell_d) return true;
  const unsigned long a = epsilon.get_num().get_ui();
  const unsigned long b = epsilon.get_den().get_ui();
  // ell - phi < ell^2 / k^(1+eps)  <=>  (ell D - num)^b k^(a+b) < ell^(2b) D^b
  return pow_int(ell_d - num, b) * pow_int(ui(k), a + b) < pow_int(ui(ell), 2 * b) * pow_int(denominator, b);
}

Int RmcParams::epoch_rounds() const { return ui(p) * ui(r) + ui(d); }

std::string RmcParams::tau_string() const {
  if (tau) return to_string(*tau);
  return std::to_string(ell) + "*(1-" + std::to_string(ell) + "/" + std::to_string(k) + "^(1+" +
         to_string(epsilon) + "))";
}

RmcParams derive_rmc_params(std::uint64_t k, std::uint64_t ell, std::uint32_t T, const Rational& epsilon,
                            const std::optional<Rational>& i_min, const ReducedMode& reduced) {
  if (ell < 1) throw InfeasibleParameterError("ell >= 1 violated");
  if (k < ell + 1) throw InfeasibleParameterError("k >= ell + 1 violated (k=" + std::to_string(k) + ")");
  if (T < 1) throw InfeasibleParameterError("T >= 1 violated");
  if (epsilon <= 0) throw InfeasibleParameterError("epsilon > 0 violated");
  if (i_min && *i_min <= 0) throw InfeasibleParameterError("i_min > 0 violated");
  if (!epsilon.get_num().fits_ulong_p() || !epsilon.get_den().fits_ulong_p() || epsilon.get_num() > 64 ||
      epsilon.get_den() > 64)
    throw InfeasibleParameterError("epsilon numerator and denominator must be at most 64");

  RmcParams P;
  P.k = k;
  P.ell = ell;
  P.T = T;
  P.epsilon = epsilon;
  const unsigned long ea = epsilon.get_num().get_ui();
  const unsigned long eb = epsilon.get_den().get_ui();
  const Int K = ui(k);

  // d = ceil(2 k^(1+eps)): smallest D with D^b >= 2^b k^(a+b).
  {
    const Int target = pow_int(Int(2), eb) * pow_int(K, ea + eb);
    Int D = root_floor(target, eb);
    if (pow_int(D, eb) < target) D += 1;
    P.d = to_u64(D, "d");
  }
  const Int dI = ui(P.d);

  // gamma > log_k(d - 1); delta > log_k(d k^gamma / (k^gamma + 1 - d)).
  P.gamma = smallest_pow_above(k, Rational(dI - 1), 1);
  const Rational kg = kpow(k, P.gamma);
  P.delta = smallest_pow_above(k, Rational(dI) * kg / (kg + 1 - Rational(dI)), 1);
  // alpha >= max{1 + gamma + log_k 3, log_k 3T}; beta >= log_k max{d(2k^delta + 1), 3T}.
  P.alpha = std::max(smallest_pow_at_least(k, 3 * kpow(k, 1 + P.gamma), 2),
                     smallest_pow_at_least(k, Rational(3 * static_cast<long>(T)), 2));
  P.beta = std::max(smallest_pow_at_least(k, Rational(dI) * (2 * kpow(k, P.delta) + 1), 3),
                    smallest_pow_at_least(k, Rational(3 * static_cast<long>(T)), 3));

  // c >= 2T + 4 + max{5 beta, 5 + alpha + 2 eps - 2 log_k(k^eps - 1)}.
  const auto y_exact = y_term_exact(k, epsilon);
  Int alpha_y;
  if (y_exact) {
    alpha_y = ceil_of(Rational(static_cast<long>(P.alpha)) + *y_exact);
  } else {
    alpha_y = certified_ceil(
        [&](unsigned bits) { return Interval::exact(Rational(static_cast<long>(P.alpha))) + y_term(k, epsilon, bits); });
  }
  Int c = Int(2 * static_cast<long>(T) + 4) + std::max(Int(5 * P.beta), alpha_y);
  P.c = static_cast<std::uint32_t>(to_u64(c, "c"));

  // p = ceil((2 ln k / ell) max{gamma / (1/k + 1/k^alpha), delta / (1/d + 1/k^beta)}).
  const Rational m1 = Rational(static_cast<long>(P.gamma)) / (Rational(1, K) + kpow(k, -P.alpha));
  const Rational m2 = Rational(static_cast<long>(P.delta)) / (Rational(1, dI) + kpow(k, -P.beta));
  const Rational pm = 2 * std::max(m1, m2) / Rational(ui(ell));
  P.p = to_u64(certified_ceil([&](unsigned bits) { return ln_enclosure(Rational(K), bits) * Interval::exact(pm); }),
               "p");

  // Block count. i_min known: max{alpha, beta, Y} 2^(2T(2+eps)) k^(2T(1+eps)) / i^2 ln k.
  // Unknown: max{alpha, beta, Y} 2^(2T(2+eps)-2) k^(2+2T(1+eps)) ln k (k stands in for n).
  P.i_min_known = i_min.has_value();
  P.i_min_used = i_min ? *i_min : ratio(2, K);
  const Rational twoT(2 * static_cast<long>(T));
  auto block_count = [&](unsigned bits) {
    Interval y = y_exact ? Interval::exact(*y_exact) : y_term(k, epsilon, bits);
    Interval lead = max(max(Interval::exact(Rational(static_cast<long>(P.alpha))),
                            Interval::exact(Rational(static_cast<long>(P.beta)))),
                        y);
    Interval lnk = ln_enclosure(Rational(K), bits);
    if (i_min) {
      return lead * pow_enclosure(Rational(2), twoT * (2 + epsilon), bits) *
             pow_enclosure(Rational(K), twoT * (1 + epsilon), bits) /
             Interval::exact(*i_min * *i_min) * lnk;
    }
    return lead * pow_enclosure(Rational(2), twoT * (2 + epsilon) - 2, bits) *
           pow_enclosure(Rational(K), 2 + twoT * (1 + epsilon), bits) * lnk;
  };
  P.b = to_u64(certified_ceil(block_count), "b");

  if (reduced.active()) {
    P.reduced = true;
    P.p = std::max<std::uint64_t>(1, (P.p + reduced.p_divisor - 1) / reduced.p_divisor);
    P.b = std::max<std::uint64_t>(1, (P.b + reduced.r_divisor - 1) / reduced.r_divisor);
    P.c = std::max<std::uint32_t>(2, (P.c + reduced.c_divisor - 1) / reduced.c_divisor);
  }
  P.r = to_u64(ui(P.b) * T, "r");
  to_u64(P.epoch_rounds(), "p*r+d");

  P.rho_lower = Rational(ui(k - ell)) * (1 - kpow(k, -P.gamma));
  P.rho_upper = Rational(ui(k - ell)) * (1 + kpow(k, -P.gamma));
  {
    const Int x = pow_int(K, ea + eb);
    const Int r = root_floor(x, eb);
    if (pow_int(r, eb) == x) P.tau = Rational(ui(ell)) * (1 - Rational(ui(ell)) / Rational(r));
  }
  P.denominator = pow_int(dI, P.c);
  return P;
}

MultParams derive_mult_params(std::uint64_t n, std::uint32_t T, const std::optional<Rational>& i_min,
                              const ReducedMode& reduced) {
  if (n < 2) throw InfeasibleParameterError("n >= 2 violated");
  if (T < 1) throw InfeasibleParameterError("T >= 1 violated");
  if (i_min && *i_min <= 0) throw InfeasibleParameterError("i_min > 0 violated");
  MultParams M;
  M.n = n;
  M.T = T;
  M.d = 2 * n;
  M.alpha = std::max<std::int64_t>(3, smallest_pow_at_least(n, Rational(3 * static_cast<long>(T)), 0));
  M.c = static_cast<std::uint32_t>(5 * M.alpha + 2 * T + 4);
  const Rational dT = Rational(pow_int(ui(M.d), T));
  M.i_min_known = i_min.has_value();
  M.phi_min = i_min ? Rational(*i_min / dT) : Rational(Rational(2) / (Rational(ui(n)) * dT));
  const Rational scale = Rational(4 * M.alpha) / (M.phi_min * M.phi_min);
  M.b = to_u64(certified_ceil([&](unsigned bits) { return ln_enclosure(Rational(ui(n)), bits) * Interval::exact(scale); }),
               "b");
  if (reduced.active()) {
    M.reduced = true;
    M.b = std::max<std::uint64_t>(1, (M.b + reduced.r_divisor - 1) / reduced.r_divisor);
    M.c = std::max<std::uint32_t>(2, (M.c + reduced.c_divisor - 1) / reduced.c_divisor);
  }
  M.r = to_u64(ui(M.b) * T, "r''");
  M.denominator = pow_int(ui(M.d), M.c);
  return M;
}

std::uint64_t broadcast_rounds(std::uint64_t n, std::uint32_t T, const std::optional<Rational>& i_min) {
  if (n < 2) throw InfeasibleParameterError("n >= 2 violated");
  if (i_min && *i_min <= 0) throw InfeasibleParameterError("i_min > 0 violated");
  const Rational i = i_min ? *i_min : ratio(2, ui(n));
  const Rational base = 1 + i;
  auto value = [&](unsigned bits) {
    return Interval::exact(Rational(static_cast<long>(T))) * ln_enclosure(Rational(ui(n)), bits) /
           ln_enclosure(base, bits);
  };
  // T ln n / ln(1+i) = N exactly iff n^T = (1+i)^N.
  auto exact = [&](const Int& N) {
    if (N < 0 || !N.fits_ulong_p()) return false;
    return pow_rat(base, static_cast<std::int64_t>(N.get_ui())) == Rational(pow_int(ui(n), T));
  };
  return to_u64(certified_ceil(value, exact), "r'");
}

}  // namespace adcs
