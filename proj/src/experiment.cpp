#include "adcs/experiment.hpp"

#include "adcs/broadcast.hpp"
#include "adcs/expansion.hpp"

#include <atomic>
#include <fstream>
#include <thread>

namespace adcs {

namespace {

const std::pair<ProtocolKind, const char*> kProtocolNames[] = {
    {ProtocolKind::rmc, "rmc"},
    {ProtocolKind::multiplicity, "multiplicity"},
    {ProtocolKind::all2all, "all2all"},
    {ProtocolKind::broadcast, "broadcast"},
    {ProtocolKind::analyze, "analyze"},
};

const char* encoding_name(MessageEncoding e) {
  switch (e) {
    case MessageEncoding::fixed_width:
      return "fixed";
    case MessageEncoding::length_prefixed:
      return "prefixed";
    case MessageEncoding::automatic:
      return "auto";
  }
  return "auto";
}

MessageEncoding parse_encoding(const std::string& s) {
  if (s == "fixed") return MessageEncoding::fixed_width;
  if (s == "prefixed") return MessageEncoding::length_prefixed;
  if (s == "auto") return MessageEncoding::automatic;
  throw ConfigError("unknown message encoding '" + s + "' (fixed, prefixed, auto)");
}

Rational rational_field(const Json& v, const char* key) {
  try {
    if (v.is_number_integer()) return Rational(Int(v.dump()));
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return parse_rational(v.dump());
  } catch (const Error& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
  throw ConfigError(std::string(key) + ": expected a number or rational string");
}

template <class U>
U unsigned_field(const Json& v, const char* key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(std::string(key) + ": expected a non-negative integer");
  const auto x = v.get<std::uint64_t>();
  if (x > std::numeric_limits<U>::max()) throw ConfigError(std::string(key) + ": value out of range");
  return static_cast<U>(x);
}

std::string string_field(const Json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

bool bool_field(const Json& v, const char* key) {
  if (!v.is_boolean()) throw ConfigError(std::string(key) + ": expected true or false");
  return v.get<bool>();
}

Json congestion_json(const CongestionReport& r) {
  Json j;
  j["clean"] = r.clean();
  j["violation_count"] = r.violation_count;
  j["max_bits"] = r.max_bits;
  Json epochs = Json::array();
  for (const auto& e : r.epochs)
    epochs.push_back({{"audit_key", e.audit_key}, {"bound", e.bound}, {"max_bits", e.max_bits},
                      {"messages", e.messages}});
  j["epochs"] = std::move(epochs);
  Json viol = Json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"round", v.round}, {"node", v.node}, {"audit_key", v.audit_key}, {"bits", v.bits},
                    {"bound", v.bound}});
  j["violations"] = std::move(viol);
  return j;
}

Json stats_json(const SimStats& s) {
  return {{"rounds", s.rounds},
          {"stepped_rounds", s.stepped_rounds},
          {"skipped_rounds", s.skipped_rounds},
          {"cycle_jumps", s.cycle_jumps},
          {"frozen_jumps", s.frozen_jumps}};
}

Json schedule_json(const EvolvingSchedule& s) {
  Json j;
  j["label"] = s.label();
  j["seed"] = s.seed();
  j["n"] = s.n();
  j["T"] = s.T();
  if (auto p = s.period())
    j["period"] = *p;
  else
    j["period"] = nullptr;
  return j;
}

SimOptions sim_options(const ExperimentConfig& c, TraceSink* trace) {
  SimOptions o;
  o.round_cap = c.round_cap;
  o.strict_congestion = c.strict_congestion;
  o.trace = trace;
  return o;
}

ReducedMode reduced_of(const ExperimentConfig& c) { return c.reduced ? c.reduced_divisors : ReducedMode{}; }

void require_t_connected(const EvolvingSchedule& s) {
  const std::uint64_t horizon = s.period().value_or(4096);
  if (auto bad = first_disconnected_window(s, horizon))
    throw ConfigError("schedule is not " + std::to_string(s.T()) + "-connected: window starting at round " +
                      std::to_string(*bad) + " has a disconnected union graph");
}

bool needs_supervisors(ProtocolKind p) { return p == ProtocolKind::rmc || p == ProtocolKind::all2all; }

void run_rmc(const ExperimentConfig& c, const EvolvingSchedule& s, TraceSink* trace, RunOutcome& out) {
  RmcRunOptions opt;
  opt.epsilon = c.epsilon;
  opt.reduced = reduced_of(c);
  opt.sim = sim_options(c, trace);
  const auto r = rmc_run(SystemConfig{c.n, c.ell, c.T, c.i_min_hint}, s, opt);
  Json& j = out.summary;
  bool correct = true;
  for (auto v : r.outputs) correct = correct && v == c.n;
  j["correct"] = correct;
  j["expected"] = c.n;
  j["outputs"] = r.outputs;
  j["rounds"] = r.rounds;
  j["round_bound"] = r.round_bound.get_str();
  j["within_round_bound"] = Int(static_cast<unsigned long>(r.rounds)) <= r.round_bound;
  Json path = Json::array();
  for (const auto& e : r.estimate_path)
    path.push_back({{"epoch", e.epoch},
                    {"k", e.k},
                    {"outcome", to_string(e.outcome)},
                    {"p", e.p},
                    {"r", e.r},
                    {"d", e.d},
                    {"c", e.c},
                    {"epoch_rounds", e.epoch_rounds.get_str()}});
  j["estimate_path"] = std::move(path);
  j["max_message_bits"] = r.congestion.max_bits;
  j["stats"] = stats_json(r.stats);
  j["congestion"] = congestion_json(r.congestion);
  if (!correct) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = "some node did not output n = " + std::to_string(c.n);
  }
  if (!r.congestion.clean()) {
    out.code = ExitCode::congestion;
    out.diagnostic = std::to_string(r.congestion.violation_count) + " messages exceeded the congestion bound";
  }
}

void run_multiplicity(const ExperimentConfig& c, const EvolvingSchedule& s, TraceSink* trace, RunOutcome& out) {
  MultRunOptions opt;
  opt.i_min = c.i_min_hint;
  opt.reduced = reduced_of(c);
  opt.sim = sim_options(c, trace);
  MultiplicityResult r;
  std::uint64_t delta = 0;
  if (!c.messages.empty()) {
    if (c.messages.size() != c.n) throw ConfigError("messages: expected " + std::to_string(c.n) + " entries");
    for (const auto& m : c.messages) delta += m == c.target;
    if (delta < 1) throw ConfigError("multiplicity: target '" + c.target + "' is held by no node");
    r = multiplicity_run(c.messages, c.target, c.n, s, opt);
  } else {
    if (c.delta < 1 || c.delta > c.n) throw ConfigError("multiplicity: 1 <= delta <= n violated");
    delta = c.delta;
    std::vector<bool> holders(c.n, false);
    for (std::uint64_t v = 0; v < delta; ++v) holders[v] = true;
    r = multiplicity_run(holders, c.n, s, opt);
  }
  Json& j = out.summary;
  bool correct = true;
  for (auto v : r.outputs) correct = correct && v == delta;
  j["correct"] = correct;
  j["expected"] = delta;
  j["outputs"] = r.outputs;
  j["rounds"] = r.rounds;
  j["params"] = {{"d", r.params.d},
                 {"c", r.params.c},
                 {"alpha", r.params.alpha},
                 {"phi_min", to_string(r.params.phi_min)},
                 {"b", r.params.b},
                 {"r", r.params.r}};
  j["max_message_bits"] = r.congestion.max_bits;
  j["stats"] = stats_json(r.stats);
  j["congestion"] = congestion_json(r.congestion);
  if (!correct) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = "some node did not return delta = " + std::to_string(delta);
  }
  if (!r.congestion.clean()) {
    out.code = ExitCode::congestion;
    out.diagnostic = std::to_string(r.congestion.violation_count) + " messages exceeded the congestion bound";
  }
}

void run_all2all(const ExperimentConfig& c, const EvolvingSchedule& s, TraceSink* trace, RunOutcome& out) {
  if (c.messages.size() != c.n) throw ConfigError("messages: expected " + std::to_string(c.n) + " entries");
  A2ARunOptions opt;
  opt.epsilon = c.epsilon;
  opt.reduced = reduced_of(c);
  opt.sim = sim_options(c, trace);
  opt.encoding = c.encoding;
  const auto r = all_to_all(c.messages, SystemConfig{c.n, c.ell, c.T, c.i_min_hint}, s, opt);
  std::map<std::string, std::uint64_t> truth;
  for (const auto& m : c.messages) ++truth[m];
  Json& j = out.summary;
  bool correct = true;
  Json outputs = Json::array();
  for (const auto& m : r.outputs) {
    correct = correct && m == truth;
    Json node = Json::object();
    for (const auto& [msg, cnt] : m) node[msg] = cnt;
    outputs.push_back(std::move(node));
  }
  Json expected = Json::object();
  for (const auto& [msg, cnt] : truth) expected[msg] = cnt;
  j["correct"] = correct;
  j["expected"] = std::move(expected);
  j["outputs"] = std::move(outputs);
  j["counted_n"] = r.counted_n;
  j["encoding"] = encoding_name(r.encoding);
  j["rounds"] = r.rounds;
  j["max_message_bits"] = r.congestion.max_bits;
  j["stats"] = stats_json(r.stats);
  j["congestion"] = congestion_json(r.congestion);
  if (!correct) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = "some node's output differs from the input histogram";
  }
  if (!r.congestion.clean()) {
    out.code = ExitCode::congestion;
    out.diagnostic = std::to_string(r.congestion.violation_count) + " messages exceeded the congestion bound";
  }
}

void run_broadcast(const ExperimentConfig& c, const EvolvingSchedule& s, TraceSink* trace, RunOutcome& out) {
  std::vector<bool> bits = c.bits;
  if (bits.empty()) {
    bits.assign(c.n, false);
    bits[0] = true;
  }
  if (bits.size() != c.n) throw ConfigError("bits: expected " + std::to_string(c.n) + " entries");
  const std::uint64_t rounds = c.rounds ? c.rounds : broadcast_rounds(c.n, c.T, c.i_min_hint);
  const auto r = broadcast_or(bits, s, 0, rounds, sim_options(c, trace));
  bool any = false;
  for (bool b : bits) any = any || b;
  bool correct = true;
  for (bool b : r.outputs) correct = correct && b == any;
  Json& j = out.summary;
  j["correct"] = correct;
  j["expected"] = any;
  std::vector<int> outs(r.outputs.begin(), r.outputs.end());
  j["outputs"] = outs;
  j["rounds"] = r.rounds;
  j["max_message_bits"] = r.congestion.max_bits;
  j["congestion"] = congestion_json(r.congestion);
  if (!correct) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = "flooding did not reach every node within " + std::to_string(rounds) + " rounds";
  }
  if (!r.congestion.clean()) {
    out.code = ExitCode::congestion;
    out.diagnostic = std::to_string(r.congestion.violation_count) + " messages exceeded the congestion bound";
  }
}

void run_analyze(const ExperimentConfig& c, const EvolvingSchedule& s, RunOutcome& out) {
  const std::uint64_t d = c.d ? c.d : 2 * c.n * c.n;
  const Int dT = pow_int(Int(static_cast<unsigned long>(d)), c.T);
  Json rows = Json::array();
  bool all_hold = true;
  for (std::uint64_t w = 0; w < c.windows; ++w) {
    const auto g = union_graph(s, w * c.T, c.T);
    const GraphStats st = window_stats(s, w, d);
    const Rational lower = st.isoperimetric / Rational(dT);
    const bool holds = st.conductance >= lower;
    all_hold = all_hold && holds;
    rows.push_back({{"window", w},
                    {"start", w * c.T},
                    {"union_connected", g.connected()},
                    {"isoperimetric", to_string(st.isoperimetric)},
                    {"conductance", to_string(st.conductance)},
                    {"lower_bound", to_string(lower)},
                    {"holds", holds}});
  }
  out.summary["d"] = d;
  out.summary["windows"] = std::move(rows);
  out.summary["correct"] = all_hold;
  if (!all_hold) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = "some window has conductance below i / d^T";
  }
}

}  // namespace

const char* to_string(ProtocolKind p) {
  for (const auto& [k, name] : kProtocolNames)
    if (k == p) return name;
  return "rmc";
}

ProtocolKind parse_protocol(const std::string& s) {
  for (const auto& [k, name] : kProtocolNames)
    if (s == name) return k;
  throw ConfigError("unknown protocol '" + s + "' (rmc, multiplicity, all2all, broadcast, analyze)");
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "protocol") {
      c.protocol = parse_protocol(string_field(v, k));
    } else if (key == "n") {
      c.n = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "ell") {
      c.ell = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "T") {
      c.T = unsigned_field<std::uint32_t>(v, k);
    } else if (key == "schedule") {
      c.schedule = string_field(v, k);
    } else if (key == "schedule_file") {
      c.schedule_file = string_field(v, k);
    } else if (key == "seed") {
      c.seed = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "epsilon") {
      c.epsilon = rational_field(v, k);
    } else if (key == "i_min_hint") {
      if (v.is_null())
        c.i_min_hint.reset();
      else
        c.i_min_hint = rational_field(v, k);
    } else if (key == "round_cap") {
      c.round_cap = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "mode") {
      const auto m = string_field(v, k);
      if (m != "full" && m != "reduced") throw ConfigError("mode: expected full or reduced");
      c.reduced = m == "reduced";
    } else if (key == "reduced_divisors") {
      if (!v.is_object()) throw ConfigError("reduced_divisors: expected an object");
      for (const auto& [dk, dv] : v.items()) {
        if (dk == "p")
          c.reduced_divisors.p_divisor = unsigned_field<std::uint64_t>(dv, "reduced_divisors.p");
        else if (dk == "r")
          c.reduced_divisors.r_divisor = unsigned_field<std::uint64_t>(dv, "reduced_divisors.r");
        else if (dk == "c")
          c.reduced_divisors.c_divisor = unsigned_field<std::uint32_t>(dv, "reduced_divisors.c");
        else
          throw ConfigError("reduced_divisors: unknown key '" + dk + "'");
      }
    } else if (key == "strict_congestion") {
      c.strict_congestion = bool_field(v, k);
    } else if (key == "messages") {
      if (!v.is_array()) throw ConfigError("messages: expected an array of bit strings");
      c.messages.clear();
      for (const auto& m : v) c.messages.push_back(string_field(m, k));
    } else if (key == "encoding") {
      c.encoding = parse_encoding(string_field(v, k));
    } else if (key == "target") {
      c.target = string_field(v, k);
    } else if (key == "delta") {
      c.delta = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "bits") {
      if (!v.is_array()) throw ConfigError("bits: expected an array");
      c.bits.clear();
      for (const auto& b : v) {
        if (b.is_boolean())
          c.bits.push_back(b.get<bool>());
        else
          c.bits.push_back(unsigned_field<std::uint64_t>(b, k) != 0);
      }
    } else if (key == "rounds") {
      c.rounds = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "windows") {
      c.windows = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "d") {
      c.d = unsigned_field<std::uint64_t>(v, k);
    } else if (key == "trace") {
      c.trace_path = string_field(v, k);
    } else if (key == "out") {
      c.out_path = string_field(v, k);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["protocol"] = to_string(c.protocol);
  j["n"] = c.n;
  j["ell"] = c.ell;
  j["T"] = c.T;
  j["schedule"] = c.schedule;
  j["schedule_file"] = c.schedule_file;
  j["seed"] = c.seed;
  j["epsilon"] = to_string(c.epsilon);
  if (c.i_min_hint)
    j["i_min_hint"] = to_string(*c.i_min_hint);
  else
    j["i_min_hint"] = nullptr;
  j["round_cap"] = c.round_cap;
  j["mode"] = c.reduced ? "reduced" : "full";
  j["reduced_divisors"] = {{"p", c.reduced_divisors.p_divisor},
                           {"r", c.reduced_divisors.r_divisor},
                           {"c", c.reduced_divisors.c_divisor}};
  j["strict_congestion"] = c.strict_congestion;
  j["messages"] = c.messages;
  j["encoding"] = encoding_name(c.encoding);
  j["target"] = c.target;
  j["delta"] = c.delta;
  Json bits = Json::array();
  for (bool b : c.bits) bits.push_back(b);
  j["bits"] = std::move(bits);
  j["rounds"] = c.rounds;
  j["windows"] = c.windows;
  j["d"] = c.d;
  return j;
}

EvolvingSchedule build_schedule(const ExperimentConfig& c) {
  if (!c.schedule_file.empty()) {
    try {
      return load_schedule_file(c.schedule_file);
    } catch (const Error& e) {
      throw ConfigError(std::string("schedule file: ") + e.what());
    }
  }
  try {
    return EvolvingSchedule::named(c.schedule, c.n, c.T, c.seed);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  RunOutcome out;
  ExperimentConfig c = config;
  Json& j = out.summary;
  j["protocol"] = to_string(c.protocol);
  j["mode"] = c.reduced ? "reduced" : "full";
  j["reduced"] = c.reduced;
  j["config"] = config_to_json(config);
  try {
    const EvolvingSchedule s = build_schedule(c);
    c.n = s.n();
    c.T = s.T();
    j["schedule"] = schedule_json(s);
    if (c.T < 1) throw ConfigError("T >= 1 violated");
    if (c.round_cap < 1) throw ConfigError("round_cap >= 1 violated");
    if (c.epsilon <= 0) throw InfeasibleParameterError("epsilon > 0 violated");
    if (c.i_min_hint && *c.i_min_hint <= 0) throw InfeasibleParameterError("i_min > 0 violated");
    if (needs_supervisors(c.protocol)) SystemConfig{c.n, c.ell, c.T, c.i_min_hint}.validate();
    if (c.protocol != ProtocolKind::analyze) require_t_connected(s);

    std::ofstream trace_file;
    std::optional<JsonlTraceWriter> writer;
    if (!c.trace_path.empty()) {
      if (c.protocol == ProtocolKind::analyze) throw ConfigError("analyze does not produce a trace");
      trace_file.open(c.trace_path);
      if (!trace_file) throw ConfigError("cannot open trace file " + c.trace_path);
      writer.emplace(trace_file);
    }
    TraceSink* trace = writer ? &*writer : nullptr;
    switch (c.protocol) {
      case ProtocolKind::rmc:
        run_rmc(c, s, trace, out);
        break;
      case ProtocolKind::multiplicity:
        run_multiplicity(c, s, trace, out);
        break;
      case ProtocolKind::all2all:
        run_all2all(c, s, trace, out);
        break;
      case ProtocolKind::broadcast:
        run_broadcast(c, s, trace, out);
        break;
      case ProtocolKind::analyze:
        run_analyze(c, s, out);
        break;
    }
    if (writer) j["trace_records"] = writer->written();
  } catch (const ConfigError& e) {
    out.code = ExitCode::config_error;
    out.diagnostic = e.what();
  } catch (const InfeasibleParameterError& e) {
    out.code = ExitCode::infeasible;
    out.diagnostic = std::string("infeasible parameters: ") + e.what();
  } catch (const RoundCapExceeded& e) {
    out.code = ExitCode::round_cap;
    out.diagnostic = e.what();
  } catch (const CongestionError& e) {
    out.code = ExitCode::congestion;
    out.diagnostic = e.what();
  } catch (const SizeGuardError& e) {
    out.code = ExitCode::config_error;
    out.diagnostic = e.what();
  } catch (const Error& e) {
    out.code = ExitCode::protocol_failure;
    out.diagnostic = e.what();
  }
  j["exit_code"] = static_cast<int>(out.code);
  if (out.code != ExitCode::ok) j["error"] = out.diagnostic;
  return out;
}

SweepSpec sweep_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  SweepSpec s;
  for (const auto& [key, v] : j.items()) {
    if (key == "base") {
      s.base = config_from_json(v);
    } else if (key == "workers") {
      s.workers = std::max(1U, unsigned_field<unsigned>(v, "workers"));
    } else if (key == "grid") {
      if (!v.is_object()) throw ConfigError("grid: expected an object of arrays");
      for (const auto& [gk, gv] : v.items()) {
        if (!gv.is_array()) throw ConfigError("grid." + gk + ": expected an array");
        for (const auto& x : gv) {
          const std::string name = "grid." + gk;
          if (gk == "n")
            s.n.push_back(unsigned_field<std::uint64_t>(x, name.c_str()));
          else if (gk == "ell")
            s.ell.push_back(unsigned_field<std::uint64_t>(x, name.c_str()));
          else if (gk == "T")
            s.T.push_back(unsigned_field<std::uint32_t>(x, name.c_str()));
          else if (gk == "schedule")
            s.schedule.push_back(string_field(x, name.c_str()));
          else if (gk == "seed")
            s.seed.push_back(unsigned_field<std::uint64_t>(x, name.c_str()));
          else if (gk == "mode") {
            const auto m = string_field(x, name.c_str());
            if (m != "full" && m != "reduced") throw ConfigError(name + ": expected full or reduced");
            s.reduced.push_back(m == "reduced");
          } else
            throw ConfigError("grid: unknown axis '" + gk + "'");
        }
        if (gv.empty()) s.empty_axis = true;
        s.has_axes = true;
      }
    } else {
      throw ConfigError("unknown sweep key '" + key + "'");
    }
  }
  return s;
}

SweepOutcome run_sweep(const SweepSpec& spec) {
  auto axis = [](const auto& values, auto base) {
    using V = std::decay_t<decltype(base)>;
    return values.empty() ? std::vector<V>{base} : std::vector<V>(values.begin(), values.end());
  };
  std::vector<ExperimentConfig> cells;
  if (spec.has_axes && !spec.empty_axis) {
    for (auto n : axis(spec.n, spec.base.n))
      for (auto ell : axis(spec.ell, spec.base.ell))
        for (auto T : axis(spec.T, spec.base.T))
          for (const auto& sch : axis(spec.schedule, spec.base.schedule))
            for (auto seed : axis(spec.seed, spec.base.seed))
              for (bool red : axis(spec.reduced, spec.base.reduced)) {
                if (needs_supervisors(spec.base.protocol) && ell >= n) continue;
                ExperimentConfig c = spec.base;
                c.n = n;
                c.ell = ell;
                c.T = T;
                c.schedule = sch;
                c.seed = seed;
                c.reduced = red;
                c.trace_path.clear();
                c.out_path.clear();
                cells.push_back(std::move(c));
              }
  }

  std::vector<RunOutcome> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_experiment(cells[i]);
  };
  {
    std::vector<std::jthread> pool;
    const unsigned w = std::max(1U, std::min<unsigned>(spec.workers, static_cast<unsigned>(cells.size())));
    for (unsigned i = 1; i < w; ++i) pool.emplace_back(worker);
    worker();
  }

  SweepOutcome out;
  Json matrix = Json::array();
  Json table = Json::array();
  Json runs = Json::array();
  std::size_t passed = 0, failed = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    const bool ok = r.code == ExitCode::ok;
    ok ? ++passed : ++failed;
    Json cell{{"n", c.n}, {"ell", c.ell},   {"T", c.T},
              {"schedule", c.schedule}, {"seed", c.seed}, {"mode", c.reduced ? "reduced" : "full"}};
    Json m = cell;
    m["pass"] = ok;
    if (!ok) m["error"] = r.diagnostic;
    matrix.push_back(std::move(m));
    Json row = cell;
    row["rounds"] = r.summary.contains("rounds") ? r.summary["rounds"] : Json(nullptr);
    row["round_bound"] = r.summary.contains("round_bound") ? r.summary["round_bound"] : Json(nullptr);
    table.push_back(std::move(row));
    runs.push_back(r.summary);
    if (!ok) {
      const std::string where = "n=" + std::to_string(c.n) + " ell=" + std::to_string(c.ell) +
                                " T=" + std::to_string(c.T) + " " + c.schedule + " seed=" + std::to_string(c.seed);
      if (c.reduced)
        out.warnings.push_back("reduced-mode cell failed: " + where + ": " + r.diagnostic);
      else if (out.code == ExitCode::ok)
        out.code = r.code;
    }
  }
  out.report["protocol"] = to_string(spec.base.protocol);
  out.report["cells"] = cells.size();
  out.report["passed"] = passed;
  out.report["failed"] = failed;
  out.report["matrix"] = std::move(matrix);
  out.report["rounds_table"] = std::move(table);
  out.report["warnings"] = out.warnings;
  out.report["runs"] = std::move(runs);
  return out;
}

}  // namespace adcs
