#include "adcs/codec.hpp"

namespace adcs {

const char* to_string(Status s) {
  switch (s) {
    case Status::probing: return "probing";
    case Status::low: return "low";
    case Status::high: return "high";
    case Status::done: return "done";
  }
  return "?";
}

namespace {

class BitWriter {
 public:
  void put(std::uint64_t value, std::size_t width) {
    for (std::size_t i = width; i-- > 0;) push((value >> i) & 1U);
  }
  void put_int(const Int& v) {
    std::size_t width = std::max<std::size_t>(1, bit_length(v));
    for (std::size_t i = width; i-- > 0;) push(mpz_tstbit(v.get_mpz_t(), i));
  }
  EncodedMessage finish() { return {std::move(bytes_), bits_}; }

 private:
  void push(unsigned bit) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ % 8));
    ++bits_;
  }
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const EncodedMessage& e) : e_(e) {}
  std::uint64_t get(std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 1U) | next();
    return v;
  }
  Int rest() {
    if (pos_ >= e_.bits) throw Error("decode: missing potential field");
    Int v = 0;
    while (pos_ < e_.bits) {
      v <<= 1;
      v += next();
    }
    return v;
  }
  bool exhausted() const { return pos_ == e_.bits; }

 private:
  unsigned next() {
    if (pos_ >= e_.bits) throw Error("decode: truncated frame");
    unsigned bit = (e_.bytes[pos_ / 8] >> (7 - pos_ % 8)) & 1U;
    ++pos_;
    return bit;
  }
  const EncodedMessage& e_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodedMessage::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4U]);
    s.push_back(digits[b & 15U]);
  }
  return s;
}

EncodedMessage encode(const WireMessage& m) {
  BitWriter w;
  w.put(static_cast<std::uint64_t>(m.kind), 4);
  switch (m.kind) {
    case MsgKind::rmc_gossip:
      w.put(static_cast<std::uint64_t>(m.status), 2);
      w.put_int(m.potential);
      break;
    case MsgKind::rmc_status:
      w.put(static_cast<std::uint64_t>(m.status), 2);
      break;
    case MsgKind::flag:
      w.put(m.flag ? 1 : 0, 1);
      break;
    case MsgKind::potential:
      w.put_int(m.potential);
      break;
  }
  return w.finish();
}

WireMessage decode(const EncodedMessage& e) {
  BitReader r(e);
  WireMessage m;
  auto tag = r.get(4);
  if (tag < 1 || tag > 4) throw Error("decode: unknown message tag " + std::to_string(tag));
  m.kind = static_cast<MsgKind>(tag);
  switch (m.kind) {
    case MsgKind::rmc_gossip:
      m.status = static_cast<Status>(r.get(2));
      m.potential = r.rest();
      break;
    case MsgKind::rmc_status:
      m.status = static_cast<Status>(r.get(2));
      break;
    case MsgKind::flag:
      m.flag = r.get(1) != 0;
      break;
    case MsgKind::potential:
      m.potential = r.rest();
      break;
  }
  if (!r.exhausted()) throw Error("decode: trailing bits");
  return m;
}

std::size_t encoded_bits(const WireMessage& m) {
  const std::size_t pot = std::max<std::size_t>(1, bit_length(m.potential));
  switch (m.kind) {
    case MsgKind::rmc_gossip: return 4 + 2 + pot;
    case MsgKind::rmc_status: return 4 + 2;
    case MsgKind::flag: return 4 + 1;
    case MsgKind::potential: return 4 + pot;
  }
  return 4;
}

std::size_t congestion_bound(std::uint64_t ell, std::uint64_t d, std::uint32_t c) {
  return 4 + ceil_log2(ell) + static_cast<std::size_t>(c) * ceil_log2(d) + 8;
}

}  // namespace adcs
