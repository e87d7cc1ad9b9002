#include "adcs/gossip_kernel.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace adcs {

namespace {

using limb = mp_limb_t;
static_assert(sizeof(limb) == 8, "64-bit limbs expected");
using u128 = unsigned __int128;

// Division by a fixed one-limb divisor with a precomputed reciprocal
// (Moller and Granlund, "Improved division by invariant integers").
class Divider {
 public:
  explicit Divider(std::uint64_t d) : shift_(std::countl_zero(d)), dn_(d << shift_) {
    v_ = static_cast<limb>(~u128{0} / dn_ - (u128{1} << 64));
  }

  // q = floor(a / d) over `len` limbs.
  void divide(const limb* a, limb* q, std::size_t len) const {
    limb r = shift_ ? a[len - 1] >> (64 - shift_) : 0;
    for (std::size_t i = len; i-- > 0;) {
      limb u0 = a[i] << shift_;
      if (shift_ && i > 0) u0 |= a[i - 1] >> (64 - shift_);
      q[i] = step(r, u0);
    }
  }

 private:
  limb step(limb& r, limb u0) const {
    u128 p = static_cast<u128>(v_) * r + ((static_cast<u128>(r) << 64) | u0);
    limb q1 = static_cast<limb>(p >> 64) + 1;
    const limb q0 = static_cast<limb>(p);
    limb rr = u0 - q1 * dn_;
    if (rr > q0) {
      --q1;
      rr += dn_;
    }
    if (rr >= dn_) {
      ++q1;
      rr -= dn_;
    }
    r = rr;
    return q1;
  }

  int shift_;
  limb dn_;
  limb v_ = 0;
};

std::size_t limbs_of(const Int& x) { return std::max<std::size_t>(1, mpz_size(x.get_mpz_t())); }

void export_limbs(const Int& x, limb* out, std::size_t len) {
  const std::size_t s = mpz_size(x.get_mpz_t());
  for (std::size_t i = 0; i < len; ++i) out[i] = i < s ? mpz_getlimbn(x.get_mpz_t(), i) : 0;
}

Int import_limbs(const limb* in, std::size_t len) {
  Int x;
  mpz_import(x.get_mpz_t(), len, -1, sizeof(limb), 0, 0, in);
  return x;
}

std::size_t limb_bits(const limb* a, std::size_t len) {
  for (std::size_t i = len; i-- > 0;)
    if (a[i]) return 64 * i + (64 - std::countl_zero(a[i]));
  return 0;
}

bool all_zero(const limb* a, std::size_t len) {
  return std::all_of(a, a + len, [](limb x) { return x == 0; });
}

// phi_v = K*d + R_v. Residuals are stored with a common stride of L limbs,
// where L fits the conserved residual sum, so no intermediate value of the
// update overflows.
class ResidualState {
 public:
  ResidualState(const std::vector<Int>& phi, std::uint64_t d) : n_(phi.size()), d_(d), div_(d) {
    Int q, mq;
    for (std::size_t v = 0; v < n_; ++v) {
      mpz_fdiv_q_ui(q.get_mpz_t(), phi[v].get_mpz_t(), d_);
      if (v == 0 || q < mq) mq = q;
    }
    K_ = mq;
    const Int kd = K_ * Int(static_cast<unsigned long>(d_));
    sum_ = 0;
    std::vector<Int> res(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      res[v] = phi[v] - kd;
      sum_ += res[v];
    }
    L_ = limbs_of(sum_);
    R_.assign(n_ * L_, 0);
    Q_.assign(n_ * L_, 0);
    for (std::size_t v = 0; v < n_; ++v) export_limbs(res[v], r(v), L_);
    refresh_offset();
  }

  std::size_t n() const { return n_; }
  std::size_t L() const { return L_; }
  limb* r(std::size_t v) { return R_.data() + v * L_; }
  const limb* r(std::size_t v) const { return R_.data() + v * L_; }
  limb* q(std::size_t v) { return Q_.data() + v * L_; }

  // Shares for the coming round; returns true when all shares are equal.
  bool compute_shares() {
    for (std::size_t v = 0; v < n_; ++v) div_.divide(r(v), q(v), L_);
    for (std::size_t v = 1; v < n_; ++v)
      if (mpn_cmp(q(v), q(0), L_) != 0) return false;
    return true;
  }

  void apply(const AdjacencyList& adj) {
    for (std::size_t v = 0; v < n_; ++v) {
      const auto& nb = adj[v];
      if (nb.empty()) continue;
      mpn_submul_1(r(v), q(v), L_, nb.size());
      for (NodeId u : nb) mpn_add_n(r(v), r(v), q(u), L_);
    }
  }

  // Moves the smallest share into K, using the shares of the coming round,
  // and narrows the limb stride when the residual sum allows it.
  void canonicalize() {
    std::size_t m = 0;
    for (std::size_t v = 1; v < n_; ++v)
      if (mpn_cmp(q(v), q(m), L_) < 0) m = v;
    if (all_zero(q(m), L_)) return;
    std::vector<limb> mq(q(m), q(m) + L_);
    for (std::size_t v = 0; v < n_; ++v) {
      mpn_submul_1(r(v), mq.data(), L_, d_);
      mpn_sub_n(q(v), q(v), mq.data(), L_);
    }
    const Int mqi = import_limbs(mq.data(), L_);
    K_ += mqi;
    sum_ -= mqi * Int(static_cast<unsigned long>(d_)) * Int(static_cast<unsigned long>(n_));
    const std::size_t L = limbs_of(sum_);
    if (L < L_) {
      for (std::size_t v = 0; v < n_; ++v) {
        std::copy_n(R_.data() + v * L_, L, R_.data() + v * L);
        std::copy_n(Q_.data() + v * L_, L, Q_.data() + v * L);
      }
      L_ = L;
      R_.resize(n_ * L_);
      Q_.resize(n_ * L_);
    }
    refresh_offset();
  }

  // Bit length of the largest phi_v.
  std::size_t max_bits() {
    std::size_t m = 0;
    for (std::size_t v = 1; v < n_; ++v)
      if (mpn_cmp(r(v), r(m), L_) > 0) m = v;
    if (kd_zero_) return limb_bits(r(m), L_);
    scratch_.resize(L_);
    const limb carry = mpn_add_n(scratch_.data(), kd_low_.data(), r(m), L_);
    if (carry) return top_plus_one_bits_;
    if (top_bits_) return top_bits_;
    return limb_bits(scratch_.data(), L_);
  }

  bool same_as(const ResidualState& o) const { return K_ == o.K_ && L_ == o.L_ && R_ == o.R_; }

  void store(std::vector<Int>& phi) const {
    const Int kd = K_ * Int(static_cast<unsigned long>(d_));
    for (std::size_t v = 0; v < n_; ++v) phi[v] = kd + import_limbs(r(v), L_);
  }

 private:
  void refresh_offset() {
    const Int kd = K_ * Int(static_cast<unsigned long>(d_));
    kd_zero_ = kd == 0;
    kd_low_.assign(L_, 0);
    export_limbs(kd, kd_low_.data(), std::min(L_, limbs_of(kd)));
    Int top = kd >> static_cast<mp_bitcnt_t>(64 * L_);
    top_bits_ = top == 0 ? 0 : bit_length(top) + 64 * L_;
    top_plus_one_bits_ = bit_length(Int(top + 1)) + 64 * L_;
  }

  std::size_t n_;
  std::uint64_t d_;
  Divider div_;
  Int K_, sum_;
  std::size_t L_ = 1;
  std::vector<limb> R_, Q_;
  bool kd_zero_ = true;
  std::vector<limb> kd_low_, scratch_;
  std::size_t top_bits_ = 0, top_plus_one_bits_ = 0;
};

}  // namespace

GossipBatchResult run_truncated_gossip(std::vector<Int>& phi, const GossipBatch& b) {
  GossipBatchResult out;
  const std::size_t n = phi.size();
  if (n == 0 || b.max_rounds == 0 || b.d < 2) return out;

  ResidualState st(phi, b.d);
  const bool never_alarm = 2 * (n - 1) < b.d;
  std::optional<ResidualState> snapshot;
  std::uint64_t snap_round = 0, snap_window = 0;
  std::size_t batch_max_bits = 0;
  std::uint64_t max_round = 0;

  std::uint64_t t = b.start_round;
  const std::uint64_t end = b.start_round + b.max_rounds;
  const bool cycles = b.period > 0 && b.period <= (1U << 16);
  const std::uint64_t grid = cycles ? std::lcm<std::uint64_t>(b.period, 64) : 64;
  while (t < end) {
    const AdjacencyList& adj = b.adjacency(t);
    bool alarm = false;
    for (const auto& nb : adj) alarm = alarm || 2 * nb.size() >= b.d;
    if (alarm) break;
    const std::size_t bits = b.header_bits + std::max<std::size_t>(1, st.max_bits());
    if (bits > b.bound) break;
    if (bits > batch_max_bits) {
      batch_max_bits = bits;
      max_round = t;
    }

    const bool uniform = st.compute_shares();
    if (uniform && never_alarm) {
      out.skipped += end - t;
      ++out.frozen_jumps;
      t = end;
      break;
    }

    // Canonical form is needed for snapshot comparison; doing it on a coarse
    // grid keeps its cost negligible. Snapshot and comparison rounds are both
    // grid points, so any cycle length is eventually matched.
    if (t % grid == 0) {
      st.canonicalize();
      if (snapshot && st.same_as(*snapshot)) {
        const std::uint64_t cycle = t - snap_round;
        const std::uint64_t m = ((end - t) / cycle) * cycle;
        if (m > 0) {
          ++out.cycle_jumps;
          out.skipped += m;
          t += m;
          snapshot.reset();
          continue;
        }
      }
      if (cycles && (!snapshot || t - snap_round >= snap_window)) {
        snap_window = snapshot ? 2 * snap_window : b.cycle_history * grid;
        snapshot = st;
        snap_round = t;
      }
    }

    st.apply(adj);
    ++t;
    ++out.stepped;
  }
  out.rounds = t - b.start_round;
  if (out.rounds > 0) {
    st.store(phi);
    if (b.auditor) {
      b.auditor->observe(max_round, 0, b.audit_key, batch_max_bits, b.bound);
      b.auditor->observe_repeat(b.audit_key, out.rounds * n - 1);
    }
  }
  return out;
}

}  // namespace adcs
