#include "adcs/numerics.hpp"

#include "adcs/expansion.hpp"

namespace adcs {

FixedPointParams::FixedPointParams(std::uint64_t d_, std::uint32_t c_) : d(d_), c(c_) {
  if (d < 2) throw Error("fixed-point scale needs d >= 2");
  if (c < 2) throw Error("fixed-point scale needs c >= 2");
}

Potential::Potential(FixedPointParams scale, Int numerator) : scale_(scale), num_(std::move(numerator)) {
  if (num_ < 0) throw Error("potential must be non-negative");
}

Potential Potential::integer(FixedPointParams scale, std::uint64_t value) {
  return {scale, Int(static_cast<unsigned long>(value)) * scale.denominator()};
}

Potential Potential::from_rational(FixedPointParams scale, const Rational& value) {
  Rational scaled = value * Rational(scale.denominator());
  if (scaled.get_den() != 1) throw Error("value is not a multiple of d^-c: " + adcs::to_string(value));
  return {scale, scaled.get_num()};
}

Rational Potential::value() const {
  Rational q(num_, scale_.denominator());
  q.canonicalize();
  return q;
}

std::string potential_string(const Int& numerator, std::uint64_t d, std::uint32_t c) {
  return numerator.get_str() + "/" + std::to_string(d) + "^" + std::to_string(c);
}

std::string Potential::to_string() const { return potential_string(num_, scale_.d, scale_.c); }

Potential truncate_share(const Potential& phi, const FixedPointParams& params) {
  if (!(phi.scale() == params)) throw ScaleMismatchError("truncate_share: potential scale differs from params");
  Int q;
  mpz_fdiv_q_ui(q.get_mpz_t(), phi.numerator().get_mpz_t(), params.d);
  return {params, q};
}

Potential potential_update(const Potential& phi, std::span<const Potential> received,
                           const FixedPointParams& params, UpdateMode mode) {
  if (!(phi.scale() == params)) throw ScaleMismatchError("potential_update: potential scale differs from params");
  if (mode == UpdateMode::strict && 2 * received.size() >= params.d)
    throw DegreeOverflowError("potential_update: " + std::to_string(received.size()) +
                              " neighbors but d/2 = " + std::to_string(params.d / 2));
  Int sum = 0;
  for (const auto& r : received) sum += truncate_share(r, params).numerator();
  Int num = phi.numerator();
  Int scratch;
  apply_truncated_exchange(num, sum, received.size(), params.d, scratch);
  if (num < 0) throw Error("potential_update: result negative (degree exceeds d)");
  return {params, num};
}

}  // namespace adcs
