#pragma once

// Experiment configuration, single runs and parameter sweeps. Every run
// produces one JSON summary that embeds the configuration it came from, so
// feeding the embedded config back reproduces the summary exactly.

#include "adcs/all_to_all.hpp"

#include <json.hpp>

namespace adcs {

using Json = nlohmann::ordered_json;

enum class ProtocolKind { rmc, multiplicity, all2all, broadcast, analyze };

const char* to_string(ProtocolKind p);
ProtocolKind parse_protocol(const std::string& s);

struct ConfigError : Error {
  using Error::Error;
};

struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::rmc;
  std::uint64_t n = 3;
  std::uint64_t ell = 1;
  std::uint32_t T = 1;
  std::string schedule = "static-clique";
  std::string schedule_file;  // overrides `schedule`, n and T when set
  std::uint64_t seed = 0;
  Rational epsilon = 1;
  std::optional<Rational> i_min_hint;
  std::uint64_t round_cap = std::uint64_t{1} << 62;
  bool reduced = false;
  ReducedMode reduced_divisors{8, 64, 1};
  bool strict_congestion = false;

  // all2all and message-level multiplicity
  std::vector<std::string> messages;
  MessageEncoding encoding = MessageEncoding::automatic;
  // multiplicity: either `target` among `messages`, or the first `delta` labels hold
  std::string target;
  std::uint64_t delta = 1;
  // broadcast: initial flags (default: only label 0) and rounds (0 = r')
  std::vector<bool> bits;
  std::uint64_t rounds = 0;
  // analyze
  std::uint64_t windows = 8;
  std::uint64_t d = 0;  // 0 = 2 n^2

  std::string trace_path;
  std::string out_path;
};

/// Unknown keys and malformed values raise ConfigError.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
Json config_to_json(const ExperimentConfig& c);

EvolvingSchedule build_schedule(const ExperimentConfig& c);

enum class ExitCode : int {
  ok = 0,
  protocol_failure = 1,
  config_error = 2,
  infeasible = 3,
  round_cap = 4,
  congestion = 5,
};

struct RunOutcome {
  Json summary;
  ExitCode code = ExitCode::ok;
  std::string diagnostic;
};

/// Validates the configuration, runs it and never throws for run-level
/// failures; they become the outcome's code and diagnostic.
RunOutcome run_experiment(const ExperimentConfig& config);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::uint64_t> n, ell;
  std::vector<std::uint32_t> T;
  std::vector<std::string> schedule;
  std::vector<std::uint64_t> seed;
  std::vector<bool> reduced;
  unsigned workers = 1;
  /// A sweep without axes, or with an empty axis, has no cells.
  bool has_axes = false;
  bool empty_axis = false;
};

SweepSpec sweep_from_json(const Json& j);

struct SweepOutcome {
  Json report;
  ExitCode code = ExitCode::ok;
  std::vector<std::string> warnings;
};

/// Cells with ell >= n are skipped for protocols that need supervisors.
/// Failures in reduced-mode cells only produce warnings.
SweepOutcome run_sweep(const SweepSpec& spec);

}  // namespace adcs
