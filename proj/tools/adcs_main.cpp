#include "adcs/experiment.hpp"
#include "adcs/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using adcs::ExitCode;
using adcs::ExperimentConfig;
using adcs::Json;

struct RunFlags {
  std::string config_file;
  std::string protocol, schedule, schedule_file, epsilon, i_min, mode, trace, out, target, encoding, format;
  std::uint64_t n = 0, ell = 0, seed = 0, cap = 0, delta = 0, rounds = 0, windows = 0, d = 0;
  std::uint32_t T = 0;
  std::vector<std::string> messages;
  std::vector<int> bits;
  bool strict = false;
};

// Registers the experiment flags; `analyze_only` hides the protocol-specific ones.
std::map<std::string, CLI::Option*> add_run_flags(CLI::App* app, RunFlags& f, bool analyze_only) {
  std::map<std::string, CLI::Option*> o;
  o["config"] = app->add_option("--config", f.config_file, "JSON config file; flags override its values");
  if (!analyze_only)
    o["protocol"] = app->add_option("--protocol", f.protocol, "rmc | multiplicity | all2all | broadcast | analyze");
  o["n"] = app->add_option("--n", f.n, "number of nodes");
  o["T"] = app->add_option("--T", f.T, "connectivity window");
  o["schedule"] = app->add_option("--schedule", f.schedule,
                                  "static-clique | static-path | static-cycle | static-star | "
                                  "matching-alternation | random-t-connected");
  o["schedule_file"] = app->add_option("--schedule-file", f.schedule_file, "schedule text file");
  o["seed"] = app->add_option("--seed", f.seed, "schedule seed");
  o["out"] = app->add_option("--out", f.out, "write the summary here instead of stdout");
  if (analyze_only) {
    o["windows"] = app->add_option("--windows", f.windows, "number of aligned windows");
    o["d"] = app->add_option("--d", f.d, "share denominator (default 2 n^2)");
    o["format"] = app->add_option("--format", f.format, "json | table")->check(CLI::IsMember({"json", "table"}));
    return o;
  }
  o["ell"] = app->add_option("--ell", f.ell, "number of supervisors");
  o["epsilon"] = app->add_option("--epsilon", f.epsilon, "epsilon as an integer, decimal or p/q");
  o["i_min"] = app->add_option("--i-min", f.i_min, "known lower bound on the isoperimetric number");
  o["cap"] = app->add_option("--cap", f.cap, "round cap");
  o["mode"] = app->add_option("--mode", f.mode, "full | reduced")->check(CLI::IsMember({"full", "reduced"}));
  o["trace"] = app->add_option("--trace", f.trace, "JSON Lines trace output (disables fast-forward)");
  o["messages"] = app->add_option("--messages", f.messages, "per-node bit strings")->delimiter(',');
  o["encoding"] = app->add_option("--encoding", f.encoding, "fixed | prefixed | auto");
  o["target"] = app->add_option("--target", f.target, "multiplicity target message");
  o["delta"] = app->add_option("--delta", f.delta, "multiplicity: the first delta labels hold the message");
  o["bits"] = app->add_option("--bits", f.bits, "broadcast initial flags, e.g. 1,0,0")->delimiter(',');
  o["rounds"] = app->add_option("--rounds", f.rounds, "broadcast rounds (default r')");
  o["strict"] = app->add_flag("--strict-congestion", f.strict, "abort on the first oversized message");
  return o;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw adcs::ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw adcs::ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig build_config(const RunFlags& f, const std::map<std::string, CLI::Option*>& o,
                              std::optional<adcs::ProtocolKind> forced) {
  ExperimentConfig c;
  if (!f.config_file.empty()) c = adcs::config_from_json(read_json_file(f.config_file));
  Json j = Json::object();
  auto given = [&](const char* key) {
    auto it = o.find(key);
    return it != o.end() && it->second->count() > 0;
  };
  if (given("protocol")) j["protocol"] = f.protocol;
  if (given("n")) j["n"] = f.n;
  if (given("ell")) j["ell"] = f.ell;
  if (given("T")) j["T"] = f.T;
  if (given("schedule")) j["schedule"] = f.schedule;
  if (given("schedule_file")) j["schedule_file"] = f.schedule_file;
  if (given("seed")) j["seed"] = f.seed;
  if (given("epsilon")) j["epsilon"] = f.epsilon;
  if (given("i_min")) j["i_min_hint"] = f.i_min;
  if (given("cap")) j["round_cap"] = f.cap;
  if (given("mode")) j["mode"] = f.mode;
  if (given("messages")) j["messages"] = f.messages;
  if (given("encoding")) j["encoding"] = f.encoding;
  if (given("target")) j["target"] = f.target;
  if (given("delta")) j["delta"] = f.delta;
  if (given("bits")) {
    Json b = Json::array();
    for (int x : f.bits) b.push_back(x != 0);
    j["bits"] = std::move(b);
  }
  if (given("rounds")) j["rounds"] = f.rounds;
  if (given("windows")) j["windows"] = f.windows;
  if (given("d")) j["d"] = f.d;
  if (given("trace")) j["trace"] = f.trace;
  if (given("out")) j["out"] = f.out;
  if (given("strict")) j["strict_congestion"] = f.strict;
  c = adcs::config_from_json(j, c);
  if (forced) c.protocol = *forced;
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw adcs::ConfigError("cannot write " + path);
  out << text << "\n";
}

void print_table(const Json& summary) {
  std::cout << std::left << std::setw(8) << "window" << std::setw(8) << "start" << std::setw(11) << "connected"
            << std::setw(16) << "i(G_union)" << std::setw(24) << "phi(P)" << std::setw(24) << "i / d^T"
            << "holds\n";
  for (const auto& row : summary["windows"])
    std::cout << std::left << std::setw(8) << row["window"].get<std::uint64_t>() << std::setw(8)
              << row["start"].get<std::uint64_t>() << std::setw(11)
              << (row["union_connected"].get<bool>() ? "yes" : "no") << std::setw(16)
              << row["isoperimetric"].get<std::string>() << std::setw(24) << row["conductance"].get<std::string>()
              << std::setw(24) << row["lower_bound"].get<std::string>() << (row["holds"].get<bool>() ? "yes" : "no")
              << "\n";
}

int finish_run(const adcs::RunOutcome& r, const ExperimentConfig& c, const std::string& format) {
  if (format == "table" && r.summary.contains("windows"))
    print_table(r.summary);
  else
    emit(c.out_path, r.summary.dump(2));
  if (r.code != ExitCode::ok) std::cerr << "adcs: " << r.diagnostic << "\n";
  return static_cast<int>(r.code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting and all-to-all exchange in anonymous dynamic networks"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run one experiment and print its JSON summary");
  auto run_opts = add_run_flags(run, run_flags, false);

  RunFlags analyze_flags;
  auto* analyze = app.add_subcommand("analyze", "per-window isoperimetric number and conductance of a schedule");
  auto analyze_opts = add_run_flags(analyze, analyze_flags, true);

  std::string sweep_file, sweep_out;
  unsigned sweep_workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a grid of experiments");
  sweep->add_option("--config", sweep_file, "sweep spec: {\"base\": {...}, \"grid\": {...}, \"workers\": k}")
      ->required();
  sweep->add_option("--workers", sweep_workers, "worker threads (overrides the spec)");
  sweep->add_option("--out", sweep_out, "write the report here instead of stdout");

  unsigned verify_workers = 0;
  std::vector<int> verify_only;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--workers", verify_workers, "worker threads (default: all cores)");
  verify->add_option("--only", verify_only, "criterion numbers to run")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto c = build_config(run_flags, run_opts, std::nullopt);
      return finish_run(adcs::run_experiment(c), c, "json");
    }
    if (*analyze) {
      const auto c = build_config(analyze_flags, analyze_opts, adcs::ProtocolKind::analyze);
      return finish_run(adcs::run_experiment(c), c, analyze_flags.format);
    }
    if (*sweep) {
      auto spec = adcs::sweep_from_json(read_json_file(sweep_file));
      if (sweep_workers) spec.workers = sweep_workers;
      const auto r = adcs::run_sweep(spec);
      emit(sweep_out, r.report.dump(2));
      for (const auto& w : r.warnings) std::cerr << "adcs: warning: " << w << "\n";
      return static_cast<int>(r.code);
    }
    if (*verify) {
      adcs::AcceptanceOptions opt;
      opt.workers = verify_workers;
      opt.only = verify_only;
      opt.progress = [](const std::string& m) { std::cerr << "... " << m << "\n"; };
      bool all = true;
      adcs::run_acceptance(opt, [&](const adcs::CriterionResult& r) {
        all = all && r.pass;
        std::cout << adcs::format_result(r) << std::endl;
      });
      return all ? 0 : 1;
    }
  } catch (const adcs::ConfigError& e) {
    std::cerr << "adcs: config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const adcs::InfeasibleParameterError& e) {
    std::cerr << "adcs: infeasible parameters: " << e.what() << "\n";
    return static_cast<int>(ExitCode::infeasible);
  } catch (const std::exception& e) {
    std::cerr << "adcs: " << e.what() << "\n";
    return static_cast<int>(ExitCode::protocol_failure);
  }
  return 0;
}
