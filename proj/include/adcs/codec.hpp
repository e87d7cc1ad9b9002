#pragma once

#include "adcs/exact_math.hpp"

#include <string>
#include <vector>

namespace adcs {

enum class Status : std::uint8_t { probing = 0, low = 1, high = 2, done = 3 };

const char* to_string(Status s);

enum class MsgKind : std::uint8_t {
  rmc_gossip = 1,  // status + potential
  rmc_status = 2,  // status only (dissemination)
  flag = 3,        // one boolean (OR-broadcast)
  potential = 4,   // potential only (multiplicity)
};

/// The single over-the-wire message shape shared by every protocol. Which
/// fields are meaningful depends on `kind`.
struct WireMessage {
  MsgKind kind = MsgKind::flag;
  Status status = Status::probing;
  bool flag = false;
  Int potential;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Bit-packed frame, most significant bit first. Layout: 4-bit kind tag,
/// then status (2 bits) and/or flag (1 bit), then the potential numerator in
/// its minimal big-endian binary form (at least one bit), which runs to the
/// end of the frame.
struct EncodedMessage {
  std::vector<std::uint8_t> bytes;
  std::size_t bits = 0;

  std::string hex() const;
};

EncodedMessage encode(const WireMessage& m);
WireMessage decode(const EncodedMessage& e);
/// Same as encode(m).bits without building the frame.
std::size_t encoded_bits(const WireMessage& m);

/// 4 + ceil(log2 ell) + c * ceil(log2 d) + 8.
std::size_t congestion_bound(std::uint64_t ell, std::uint64_t d, std::uint32_t c);

}  // namespace adcs
