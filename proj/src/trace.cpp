#include "adcs/trace.hpp"

#include <json.hpp>

#include <ostream>

namespace adcs {

std::string TraceRecord::to_json_line() const {
  nlohmann::ordered_json j;
  j["round"] = round;
  j["node"] = node;
  j["stage"] = stage;
  j["epoch"] = epoch;
  j["phase"] = phase;
  j["block"] = block;
  j["round_in_phase"] = round_in_phase;
  j["sent"] = sent_hex;
  j["sent_bits"] = sent_bits;
  j["bit_bound"] = bit_bound;
  j["audit_key"] = audit_key;
  j["received_count"] = received_count;
  j["phi"] = phi;
  j["status"] = status;
  return j.dump();
}

void JsonlTraceWriter::record(const TraceRecord& r) {
  out_ << r.to_json_line() << '\n';
  ++written_;
}

CongestionError::CongestionError(const CongestionViolation& v)
    : Error("congestion violation: node " + std::to_string(v.node) + " round " + std::to_string(v.round) +
            " sent " + std::to_string(v.bits) + " bits, bound " + std::to_string(v.bound)),
      violation(v) {}

void CongestionAuditor::observe(std::uint64_t round, std::uint32_t node, std::uint64_t audit_key, std::size_t bits,
                                std::size_t bound, bool strict) {
  auto& e = epochs_[audit_key];
  e.audit_key = audit_key;
  e.bound = std::max(e.bound, bound);
  e.max_bits = std::max(e.max_bits, bits);
  ++e.messages;
  max_bits_ = std::max(max_bits_, bits);
  if (bits > bound) {
    CongestionViolation v{round, node, audit_key, bits, bound};
    ++violation_count_;
    if (violations_.size() < CongestionReport::kMaxListed) violations_.push_back(v);
    if (strict) throw CongestionError(v);
  }
}

void CongestionAuditor::observe_repeat(std::uint64_t audit_key, std::uint64_t copies) {
  auto it = epochs_.find(audit_key);
  if (it != epochs_.end()) it->second.messages += copies;
}

CongestionReport CongestionAuditor::report() const {
  CongestionReport r;
  for (const auto& [key, e] : epochs_) r.epochs.push_back(e);
  r.violations = violations_;
  r.violation_count = violation_count_;
  r.max_bits = max_bits_;
  return r;
}

CongestionReport audit_congestion(std::span<const TraceRecord> trace) {
  CongestionAuditor a;
  for (const auto& row : trace) a.observe(row.round, row.node, row.audit_key, row.sent_bits, row.bit_bound);
  return a.report();
}

}  // namespace adcs
