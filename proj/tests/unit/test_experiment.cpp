#include "adcs/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace adcs;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("adcs_test_" + name);
}

}  // namespace

TEST_CASE("protocol names") {
  for (auto p : {ProtocolKind::rmc, ProtocolKind::multiplicity, ProtocolKind::all2all, ProtocolKind::broadcast,
                 ProtocolKind::analyze})
    CHECK(parse_protocol(to_string(p)) == p);
  CHECK_THROWS_AS(parse_protocol("gossip"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto c = config_from_json(Json::parse(
      R"({"protocol":"all2all","n":4,"ell":1,"T":2,"schedule":"static-path","epsilon":"1/2",
          "messages":["00","01","00","11"],"encoding":"fixed","mode":"reduced"})"));
  CHECK(c.protocol == ProtocolKind::all2all);
  CHECK(c.n == 4);
  CHECK(c.T == 2);
  CHECK(c.epsilon == Rational(1, 2));
  CHECK(c.messages.size() == 4);
  CHECK(c.encoding == MessageEncoding::fixed_width);
  CHECK(c.reduced);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"nodes":3})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"n":"three"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"mode":"fast"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"([1,2])")), ConfigError);

  // A base config is overridden key by key.
  ExperimentConfig base;
  base.n = 7;
  base.seed = 5;
  const auto d = config_from_json(Json::parse(R"({"seed":9})"), base);
  CHECK(d.n == 7);
  CHECK(d.seed == 9);
}

TEST_CASE("config serialization round-trips") {
  ExperimentConfig c;
  c.protocol = ProtocolKind::multiplicity;
  c.n = 5;
  c.T = 2;
  c.schedule = "random-t-connected";
  c.seed = 12;
  c.epsilon = Rational(3, 2);
  c.i_min_hint = Rational(1, 3);
  c.delta = 2;
  c.reduced = true;
  const Json j = config_to_json(c);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.i_min_hint == std::optional<Rational>(Rational(1, 3)));
}

TEST_CASE("rmc summary") {
  ExperimentConfig c;
  c.n = 3;
  const auto r = run_experiment(c);
  CHECK(r.code == ExitCode::ok);
  const auto& s = r.summary;
  CHECK(s["protocol"] == "rmc");
  CHECK(s["correct"] == true);
  CHECK(s["expected"] == 3);
  CHECK(s["outputs"] == Json::array({3, 3, 3}));
  CHECK(s["within_round_bound"] == true);
  CHECK(s["estimate_path"].size() == 3);
  CHECK(s["congestion"]["clean"] == true);
  CHECK(s["exit_code"] == 0);
  // The embedded config reproduces the summary.
  const auto again = run_experiment(config_from_json(s["config"]));
  CHECK(again.summary.dump() == s.dump());
}

TEST_CASE("trace length is rounds times n") {
  const auto path = temp_file("trace.jsonl");
  ExperimentConfig c;
  c.protocol = ProtocolKind::multiplicity;
  c.n = 3;
  c.schedule = "static-clique";
  c.trace_path = path.string();
  const auto r = run_experiment(c);
  CHECK(r.code == ExitCode::ok);
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == r.summary["rounds"].get<std::size_t>() * 3);
  CHECK(r.summary["trace_records"] == lines);
  CHECK(r.summary["correct"] == true);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  ExperimentConfig infeasible;
  infeasible.n = 3;
  infeasible.ell = 3;
  CHECK(run_experiment(infeasible).code == ExitCode::infeasible);

  ExperimentConfig capped;
  capped.n = 3;
  capped.round_cap = 10;
  const auto cap = run_experiment(capped);
  CHECK(cap.code == ExitCode::round_cap);
  CHECK(cap.summary["exit_code"] == 4);
  CHECK(cap.summary.contains("error"));

  ExperimentConfig short_flood;
  short_flood.protocol = ProtocolKind::broadcast;
  short_flood.n = 4;
  short_flood.schedule = "static-path";
  short_flood.rounds = 1;
  CHECK(run_experiment(short_flood).code == ExitCode::protocol_failure);

  ExperimentConfig bad_schedule;
  bad_schedule.schedule = "hypercube";
  CHECK(run_experiment(bad_schedule).code == ExitCode::config_error);

  ExperimentConfig missing_file;
  missing_file.schedule_file = "/nonexistent/schedule.txt";
  CHECK(run_experiment(missing_file).code == ExitCode::config_error);
}

TEST_CASE("schedule files override n and T") {
  const auto path = temp_file("schedule.txt");
  {
    std::ofstream out(path);
    out << "n=4 T=2\nt=0: 0-1,2-3\nt=1: 1-2,0-3\n";
  }
  ExperimentConfig c;
  c.protocol = ProtocolKind::broadcast;
  c.n = 9;
  c.schedule_file = path.string();
  const auto r = run_experiment(c);
  CHECK(r.code == ExitCode::ok);
  CHECK(r.summary["schedule"]["n"] == 4);
  CHECK(r.summary["schedule"]["T"] == 2);
  CHECK(r.summary["outputs"].size() == 4);
  std::filesystem::remove(path);
}

TEST_CASE("a schedule that is not T-connected is rejected") {
  const auto path = temp_file("disconnected.txt");
  {
    std::ofstream out(path);
    out << "n=4 T=1\nt=0: 0-1,2-3\n";
  }
  ExperimentConfig c;
  c.schedule_file = path.string();
  CHECK(run_experiment(c).code == ExitCode::config_error);
  std::filesystem::remove(path);
}

TEST_CASE("analyze rows") {
  ExperimentConfig c;
  c.protocol = ProtocolKind::analyze;
  c.n = 4;
  c.T = 2;
  c.schedule = "matching-alternation";
  c.windows = 3;
  const auto r = run_experiment(c);
  CHECK(r.code == ExitCode::ok);
  REQUIRE(r.summary["windows"].size() == 3);
  for (const auto& row : r.summary["windows"]) {
    CHECK(row["union_connected"] == true);
    CHECK(row["holds"] == true);
  }
  CHECK(r.summary["d"] == 32);
}

TEST_CASE("empty sweep grids give an empty report") {
  const auto none = run_sweep(sweep_from_json(Json::parse(R"({"base":{"n":3}})")));
  CHECK(none.report["cells"] == 0);
  CHECK(none.code == ExitCode::ok);
  const auto empty_axis = run_sweep(sweep_from_json(Json::parse(R"({"grid":{"n":[3,4],"seed":[]}})")));
  CHECK(empty_axis.report["cells"] == 0);
  CHECK(empty_axis.report["matrix"].empty());
  CHECK_THROWS_AS(sweep_from_json(Json::parse(R"({"grid":{"colour":[1]}})")), ConfigError);
  CHECK_THROWS_AS(sweep_from_json(Json::parse(R"({"size":3})")), ConfigError);
}

TEST_CASE("sweeps") {
  const auto spec = sweep_from_json(Json::parse(
      R"({"base":{"protocol":"rmc"},"grid":{"n":[2,3],"ell":[1,2],"schedule":["static-clique","static-path"]},
          "workers":3})"));
  const auto r = run_sweep(spec);
  // ell=2 with n=2 is skipped.
  CHECK(r.report["cells"] == 6);
  CHECK(r.report["passed"] == 6);
  CHECK(r.code == ExitCode::ok);
  CHECK(r.report["rounds_table"].size() == 6);
  CHECK(r.warnings.empty());
}

TEST_CASE("reduced-cell failures only warn") {
  const auto spec = sweep_from_json(Json::parse(
      R"({"base":{"protocol":"broadcast","schedule":"static-path","rounds":1},"grid":{"n":[4],"mode":["reduced"]}})"));
  const auto r = run_sweep(spec);
  CHECK(r.report["failed"] == 1);
  CHECK(r.code == ExitCode::ok);
  CHECK(r.warnings.size() == 1);

  const auto full = run_sweep(sweep_from_json(Json::parse(
      R"({"base":{"protocol":"broadcast","schedule":"static-path","rounds":1},"grid":{"n":[4],"mode":["full"]}})")));
  CHECK(full.code == ExitCode::protocol_failure);
}
