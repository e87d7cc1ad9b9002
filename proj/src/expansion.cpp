#include "adcs/expansion.hpp"

#include <bit>
#include <map>

namespace adcs {

ShareMatrix::ShareMatrix(std::size_t n, Int scale) : n_(n), scale_(std::move(scale)), num_(n * n, Int(0)) {
  if (scale_ <= 0) throw Error("share matrix scale must be positive");
}

ShareMatrix ShareMatrix::identity(std::size_t n) {
  ShareMatrix m(n, 1);
  for (std::size_t v = 0; v < n; ++v) m.numerator(v, v) = 1;
  return m;
}

Rational ShareMatrix::at(std::size_t u, std::size_t v) const {
  Rational q(numerator(u, v), scale_);
  q.canonicalize();
  return q;
}

bool ShareMatrix::doubly_stochastic() const {
  for (std::size_t u = 0; u < n_; ++u) {
    Int row = 0, col = 0;
    for (std::size_t v = 0; v < n_; ++v) {
      if (numerator(u, v) < 0) return false;
      row += numerator(u, v);
      col += numerator(v, u);
    }
    if (row != scale_ || col != scale_) return false;
  }
  return true;
}

std::vector<Rational> ShareMatrix::apply(const std::vector<Rational>& x) const {
  if (x.size() != n_) throw Error("vector size mismatch");
  std::vector<Rational> out(n_, Rational(0));
  for (std::size_t u = 0; u < n_; ++u) {
    if (x[u] == 0) continue;
    for (std::size_t v = 0; v < n_; ++v)
      if (numerator(u, v) != 0) out[v] += x[u] * Rational(numerator(u, v));
  }
  Rational s(scale_);
  for (auto& q : out) q /= s;
  return out;
}

ShareMatrix operator*(const ShareMatrix& a, const ShareMatrix& b) {
  if (a.n_ != b.n_) throw Error("matrix size mismatch");
  const std::size_t n = a.n_;
  ShareMatrix m(n, a.scale_ * b.scale_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Int& aik = a.numerator(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < n; ++j) m.numerator(i, j) += aik * b.numerator(k, j);
    }
  return m;
}

bool operator==(const ShareMatrix& a, const ShareMatrix& b) {
  if (a.n_ != b.n_) return false;
  for (std::size_t i = 0; i < a.num_.size(); ++i)
    if (a.num_[i] * b.scale_ != b.num_[i] * a.scale_) return false;
  return true;
}

ShareMatrix share_matrix(const ConstituentGraph& g, std::uint64_t d) {
  const std::size_t maxdeg = g.max_degree();
  if (d <= 2 * maxdeg)
    throw DegreeOverflowError("share_matrix: d = " + std::to_string(d) + " must exceed twice the max degree " +
                              std::to_string(maxdeg));
  ShareMatrix m(g.n(), Int(static_cast<unsigned long>(d)));
  auto deg = g.degrees();
  for (std::size_t v = 0; v < g.n(); ++v) m.numerator(v, v) = static_cast<unsigned long>(d - deg[v]);
  for (auto [u, v] : g.edges()) {
    m.numerator(u, v) = 1;
    m.numerator(v, u) = 1;
  }
  return m;
}

ShareMatrix window_product(const EvolvingSchedule& s, std::uint64_t start, std::uint32_t T, std::uint64_t d) {
  if (T < 1) throw Error("window_product: T must be >= 1");
  ShareMatrix p = share_matrix(s.graph_at(start), d);
  for (std::uint64_t t = start + 1; t < start + T; ++t) p = p * share_matrix(s.graph_at(t), d);
  return p;
}

Rational isoperimetric_number(const ConstituentGraph& g, const EnumerationCaps& caps) {
  const std::size_t n = g.n();
  if (n < 2) throw Error("isoperimetric_number needs n >= 2");
  if (n > caps.isoperimetric || n > 62)
    throw SizeGuardError("isoperimetric_number: n = " + std::to_string(n) + " exceeds enumeration cap " +
                         std::to_string(caps.isoperimetric));
  std::vector<std::uint64_t> adj(n, 0);
  for (auto [u, v] : g.edges()) {
    adj[u] |= 1ULL << v;
    adj[v] |= 1ULL << u;
  }
  const std::size_t half = n / 2;
  std::uint64_t set = 0, size = 0;
  std::int64_t boundary = 0;
  std::uint64_t best_b = 0, best_s = 0;
  const std::uint64_t total = 1ULL << n;
  // Gray-code walk: one vertex toggles per step, boundary updates in O(1).
  for (std::uint64_t i = 1; i < total; ++i) {
    const unsigned v = static_cast<unsigned>(std::countr_zero(i));
    const std::uint64_t bit = 1ULL << v;
    const auto deg = static_cast<std::int64_t>(std::popcount(adj[v]));
    if (set & bit) {
      set &= ~bit;
      --size;
      boundary -= deg - 2 * static_cast<std::int64_t>(std::popcount(adj[v] & set));
    } else {
      boundary += deg - 2 * static_cast<std::int64_t>(std::popcount(adj[v] & set));
      set |= bit;
      ++size;
    }
    if (size == 0 || size > half) continue;
    const auto b = static_cast<std::uint64_t>(boundary);
    if (best_s == 0 || b * best_s < best_b * size) {
      best_b = b;
      best_s = size;
    }
  }
  Rational q(static_cast<unsigned long>(best_b), static_cast<unsigned long>(best_s));
  q.canonicalize();
  return q;
}

Rational conductance(const ShareMatrix& p, const EnumerationCaps& caps) {
  const std::size_t n = p.n();
  if (n < 2) throw Error("conductance needs n >= 2");
  if (n > caps.conductance || n > 62)
    throw SizeGuardError("conductance: n = " + std::to_string(n) + " exceeds enumeration cap " +
                         std::to_string(caps.conductance));
  const std::size_t half = n / 2;
  std::uint64_t set = 0, size = 0;
  Int cut = 0, best_cut = 0;
  std::uint64_t best_s = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const unsigned v = static_cast<unsigned>(std::countr_zero(i));
    const std::uint64_t bit = 1ULL << v;
    const bool adding = (set & bit) == 0;
    if (adding) {
      for (std::size_t u = 0; u < n; ++u)
        if (set & (1ULL << u)) cut -= p.numerator(u, v);
      set |= bit;
      ++size;
      for (std::size_t h = 0; h < n; ++h)
        if (!(set & (1ULL << h))) cut += p.numerator(v, h);
    } else {
      for (std::size_t h = 0; h < n; ++h)
        if (!(set & (1ULL << h))) cut -= p.numerator(v, h);
      set &= ~bit;
      --size;
      for (std::size_t u = 0; u < n; ++u)
        if (set & (1ULL << u)) cut += p.numerator(u, v);
    }
    if (size == 0 || size > half) continue;
    if (best_s == 0 || cut * static_cast<unsigned long>(best_s) < best_cut * static_cast<unsigned long>(size)) {
      best_cut = cut;
      best_s = size;
    }
  }
  Rational q(best_cut, p.scale() * static_cast<unsigned long>(best_s));
  q.canonicalize();
  return q;
}

GraphStats window_stats(const EvolvingSchedule& s, std::uint64_t j, std::uint64_t d, const EnumerationCaps& caps) {
  const std::uint64_t start = j * s.T();
  GraphStats st;
  st.window_index = j;
  st.isoperimetric = isoperimetric_number(union_graph(s, start, s.T()), caps);
  st.conductance = conductance(window_product(s, start, s.T(), d), caps);
  return st;
}

Rational min_window_isoperimetric(const EvolvingSchedule& s, std::uint64_t horizon, const EnumerationCaps& caps) {
  std::map<std::vector<Edge>, Rational> seen;
  std::optional<Rational> best;
  for (std::uint64_t start = 0; start < horizon; ++start) {
    auto u = union_graph(s, start, s.T());
    auto it = seen.find(u.edges());
    if (it == seen.end()) it = seen.emplace(u.edges(), isoperimetric_number(u, caps)).first;
    if (!best || it->second < *best) best = it->second;
  }
  if (!best) throw Error("min_window_isoperimetric: empty horizon");
  return *best;
}

}  // namespace adcs
