#pragma once

#include "adcs/graph.hpp"

namespace adcs {

struct DegreeOverflowError : Error {
  using Error::Error;
};

/// Exact n x n matrix stored as integer numerators over one common scale.
class ShareMatrix {
 public:
  ShareMatrix(std::size_t n, Int scale);
  static ShareMatrix identity(std::size_t n);

  std::size_t n() const { return n_; }
  const Int& scale() const { return scale_; }
  const Int& numerator(std::size_t u, std::size_t v) const { return num_[u * n_ + v]; }
  Int& numerator(std::size_t u, std::size_t v) { return num_[u * n_ + v]; }
  Rational at(std::size_t u, std::size_t v) const;

  bool doubly_stochastic() const;
  /// Row-vector convention: (x * this)[v] = sum_u x[u] * p_uv.
  std::vector<Rational> apply(const std::vector<Rational>& x) const;

  friend ShareMatrix operator*(const ShareMatrix& a, const ShareMatrix& b);
  /// Equality of the represented rationals.
  friend bool operator==(const ShareMatrix& a, const ShareMatrix& b);

 private:
  std::size_t n_;
  Int scale_;
  std::vector<Int> num_;
};

struct EnumerationCaps {
  std::size_t isoperimetric = 20;
  std::size_t conductance = 16;
};

/// 1/d per edge, 1 - deg/d on the diagonal. Requires d > 2 * max degree.
ShareMatrix share_matrix(const ConstituentGraph& g, std::uint64_t d);

/// P^(start) * ... * P^(start+T-1), applied in round order.
ShareMatrix window_product(const EvolvingSchedule& s, std::uint64_t start, std::uint32_t T, std::uint64_t d);

/// min over nonempty X, |X| <= n/2, of |boundary(X)| / |X|.
Rational isoperimetric_number(const ConstituentGraph& g, const EnumerationCaps& caps = {});

/// min over nonempty S, |S| <= n/2, of (1/|S|) * sum_{u in S, h not in S} p_uh.
Rational conductance(const ShareMatrix& p, const EnumerationCaps& caps = {});

struct GraphStats {
  Rational isoperimetric;
  Rational conductance;
  std::uint64_t window_index = 0;
};

/// Statistics of aligned window j: i of the union graph over rounds
/// jT..jT+T-1 and phi of the window product.
GraphStats window_stats(const EvolvingSchedule& s, std::uint64_t j, std::uint64_t d, const EnumerationCaps& caps = {});

/// Minimum isoperimetric number of the union graph over every window of T
/// consecutive rounds starting in [0, horizon).
Rational min_window_isoperimetric(const EvolvingSchedule& s, std::uint64_t horizon,
                                  const EnumerationCaps& caps = {});

}  // namespace adcs
