#pragma once

#include "adcs/exact_math.hpp"

#include <span>
#include <string>

namespace adcs {

struct ScaleMismatchError : Error {
  using Error::Error;
};

/// Fixed-point scale: potentials are integer multiples of d^-c.
struct FixedPointParams {
  std::uint64_t d = 2;
  std::uint32_t c = 2;

  FixedPointParams() = default;
  FixedPointParams(std::uint64_t d_, std::uint32_t c_);

  Int denominator() const { return pow_int(Int(static_cast<unsigned long>(d)), c); }
  friend bool operator==(const FixedPointParams&, const FixedPointParams&) = default;
};

class Potential {
 public:
  Potential(FixedPointParams scale, Int numerator);

  static Potential zero(FixedPointParams scale) { return {scale, Int(0)}; }
  static Potential integer(FixedPointParams scale, std::uint64_t value);
  /// Throws unless `value` is an exact multiple of d^-c.
  static Potential from_rational(FixedPointParams scale, const Rational& value);

  const Int& numerator() const { return num_; }
  const FixedPointParams& scale() const { return scale_; }
  Rational value() const;
  /// "numerator/d^c" with decimal integers.
  std::string to_string() const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  FixedPointParams scale_;
  Int num_;
};

/// floor(d^(c-1) * phi) / d^c, i.e. numerator floor(num / d).
Potential truncate_share(const Potential& phi, const FixedPointParams& params);

enum class UpdateMode { strict, lenient };

/// phi + sum_v truncate(phi_v) - |received| * truncate(phi).
Potential potential_update(const Potential& phi, std::span<const Potential> received,
                           const FixedPointParams& params, UpdateMode mode = UpdateMode::strict);

/// In-place form of the update on raw numerators; `share_sum` is the sum of
/// floor(num_v / d) over the received copies.
inline void apply_truncated_exchange(Int& num, const Int& share_sum, std::size_t degree, std::uint64_t d,
                                     Int& scratch) {
  mpz_fdiv_q_ui(scratch.get_mpz_t(), num.get_mpz_t(), d);
  mpz_submul_ui(num.get_mpz_t(), scratch.get_mpz_t(), degree);
  num += share_sum;
}

/// "numerator/d^c" rendering shared by traces and summaries.
std::string potential_string(const Int& numerator, std::uint64_t d, std::uint32_t c);

}  // namespace adcs
