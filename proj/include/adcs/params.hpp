#pragma once

#include "adcs/exact_math.hpp"

#include <optional>
#include <string>

namespace adcs {

/// Divisors applied to p, r and c for exploratory runs. Every artifact
/// produced under a non-trivial ReducedMode is flagged as reduced.
struct ReducedMode {
  std::uint64_t p_divisor = 1;
  std::uint64_t r_divisor = 1;
  std::uint32_t c_divisor = 1;

  bool active() const { return p_divisor > 1 || r_divisor > 1 || c_divisor > 1; }
};

/// Parameter bundle for one RMC epoch with estimate k.
struct RmcParams {
  std::uint64_t k = 0;
  std::uint64_t ell = 0;
  std::uint32_t T = 1;
  Rational epsilon;

  std::uint64_t d = 0;  // ceil(2 k^(1+eps))
  std::uint64_t p = 0;  // phases per epoch
  std::uint64_t b = 0;  // blocks per phase
  std::uint64_t r = 0;  // rounds per phase, T * b
  std::uint32_t c = 0;  // truncation exponent
  std::int64_t alpha = 0, beta = 0, gamma = 0, delta = 0;

  bool i_min_known = false;
  Rational i_min_used;  // the hint, or 2/k
  Rational rho_lower;   // (k - ell)(1 - k^-gamma)
  Rational rho_upper;   // (k - ell)(1 + k^-gamma)
  std::optional<Rational> tau;  // exact when k^(1+eps) is rational
  Int denominator;              // d^c
  bool reduced = false;

  /// True iff num / d^c > ell (1 - ell / k^(1+eps)), decided exactly.
  bool exceeds_tau(const Int& num) const;
  /// p * r + d.
  Int epoch_rounds() const;
  std::string tau_string() const;
};

RmcParams derive_rmc_params(std::uint64_t k, std::uint64_t ell, std::uint32_t T, const Rational& epsilon,
                            const std::optional<Rational>& i_min = std::nullopt, const ReducedMode& reduced = {});

/// k^(1+eps) < n, decided exactly.
bool pow_one_plus_eps_below(std::uint64_t k, const Rational& epsilon, std::uint64_t n);

struct MultParams {
  std::uint64_t n = 0;
  std::uint32_t T = 1;
  std::uint64_t d = 0;
  std::uint32_t c = 0;
  std::int64_t alpha = 0;
  Rational phi_min;
  bool i_min_known = false;
  std::uint64_t b = 0;
  std::uint64_t r = 0;  // T * b
  Int denominator;      // d^c
  bool reduced = false;
};

MultParams derive_mult_params(std::uint64_t n, std::uint32_t T, const std::optional<Rational>& i_min = std::nullopt,
                              const ReducedMode& reduced = {});

/// ceil(T ln n / ln(1 + i)), with i the hint or 2/n.
std::uint64_t broadcast_rounds(std::uint64_t n, std::uint32_t T, const std::optional<Rational>& i_min = std::nullopt);

}  // namespace adcs
