#pragma once

#include "adcs/exact_math.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace adcs {

/// One row per (round, node).
struct TraceRecord {
  std::uint64_t round = 0;
  std::uint32_t node = 0;
  std::string stage;
  std::uint64_t epoch = 0;
  std::uint64_t phase = 0;
  std::uint64_t block = 0;
  std::uint64_t round_in_phase = 0;
  std::string sent_hex;
  std::size_t sent_bits = 0;
  std::size_t bit_bound = 0;
  std::uint64_t audit_key = 0;
  std::size_t received_count = 0;
  std::string phi;
  std::string status;

  std::string to_json_line() const;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceRecord& r) = 0;
};

class MemoryTrace : public TraceSink {
 public:
  void record(const TraceRecord& r) override { rows.push_back(r); }
  std::vector<TraceRecord> rows;
};

class JsonlTraceWriter : public TraceSink {
 public:
  explicit JsonlTraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceRecord& r) override;
  std::uint64_t written() const { return written_; }

 private:
  std::ostream& out_;
  std::uint64_t written_ = 0;
};

struct CongestionViolation {
  std::uint64_t round = 0;
  std::uint32_t node = 0;
  std::uint64_t audit_key = 0;
  std::size_t bits = 0;
  std::size_t bound = 0;
};

struct EpochAudit {
  std::uint64_t audit_key = 0;
  std::size_t bound = 0;
  std::size_t max_bits = 0;
  std::uint64_t messages = 0;
};

struct CongestionReport {
  std::vector<EpochAudit> epochs;
  std::vector<CongestionViolation> violations;  // first kMaxListed only
  std::uint64_t violation_count = 0;
  std::size_t max_bits = 0;

  static constexpr std::size_t kMaxListed = 64;
  bool clean() const { return violation_count == 0; }
};

struct CongestionError : Error {
  explicit CongestionError(const CongestionViolation& v);
  CongestionViolation violation;
};

/// Online per-epoch bit-width bookkeeping.
class CongestionAuditor {
 public:
  void observe(std::uint64_t round, std::uint32_t node, std::uint64_t audit_key, std::size_t bits,
               std::size_t bound, bool strict = false);
  /// Messages repeated `copies` more times without change (skipped rounds).
  void observe_repeat(std::uint64_t audit_key, std::uint64_t copies);
  CongestionReport report() const;

 private:
  std::map<std::uint64_t, EpochAudit> epochs_;
  std::vector<CongestionViolation> violations_;
  std::uint64_t violation_count_ = 0;
  std::size_t max_bits_ = 0;
};

/// Offline audit over a recorded trace.
CongestionReport audit_congestion(std::span<const TraceRecord> trace);

}  // namespace adcs
