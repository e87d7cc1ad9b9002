#include "adcs/verify.hpp"

#include "adcs/all_to_all.hpp"
#include "adcs/experiment.hpp"
#include "adcs/oracle.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace adcs {

namespace {

using Clock = std::chrono::steady_clock;

struct SuiteSchedule {
  const char* name;
  std::uint64_t seed;
};

constexpr SuiteSchedule kSuite[] = {
    {"static-clique", 0},      {"static-path", 0},        {"matching-alternation", 0},
    {"random-t-connected", 1}, {"random-t-connected", 2}, {"random-t-connected", 3},
};
constexpr std::uint32_t kSuiteT[] = {1, 2};

constexpr std::uint64_t kRmcMaxN = 6;
constexpr std::uint64_t kMultMaxN = 8;
constexpr std::uint64_t kA2AMaxN = 5;
constexpr std::uint64_t kA2AMaxEll = 2;
constexpr int kConservationTrajectories = 100;
constexpr int kConservationRoundsEach = 100;
constexpr int kContractionPairs = 100;
constexpr int kEq1RandomSamples = 200;
constexpr std::uint64_t kOracleSeed = 20240611;

std::string suite_label(const SuiteSchedule& s) {
  return s.seed ? std::string(s.name) + "#" + std::to_string(s.seed) : std::string(s.name);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(1);
  o << s << " s";
  return o.str();
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) f(i);
  };
  std::vector<std::jthread> pool;
  const unsigned w = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  for (unsigned i = 1; i < w; ++i) pool.emplace_back(run);
  run();
}

// Deterministic index draw; the standard distributions are not portable.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

std::vector<NodeId> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<NodeId> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<NodeId>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[draw(rng, i)]);
  return p;
}

ConstituentGraph random_graph(std::size_t n, std::mt19937_64& rng, std::uint64_t num = 1, std::uint64_t den = 2) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (draw(rng, den) < num) edges.emplace_back(u, v);
  return ConstituentGraph(n, std::move(edges));
}

std::string bits_of(std::uint64_t v, std::size_t w) {
  std::string s;
  for (std::size_t i = w; i-- > 0;) s.push_back((v >> i) & 1 ? '1' : '0');
  return s;
}

struct Tally {
  std::uint64_t runs = 0;
  std::uint64_t violations = 0;
  std::uint64_t audited_epochs = 0;
  std::size_t max_bits = 0;

  void add(const CongestionReport& r) {
    ++runs;
    violations += r.violation_count;
    audited_epochs += r.epochs.size();
    max_bits = std::max(max_bits, r.max_bits);
  }
};

struct RmcCell {
  std::uint64_t n = 0, ell = 0;
  std::uint32_t T = 1;
  SuiteSchedule schedule{};
  std::optional<RmcRunResult> result;
  std::string error;
  double seconds = 0;
};

struct Context {
  AcceptanceOptions opt;
  unsigned workers = 1;

  bool rmc_ready = false;
  std::vector<RmcCell> rmc;
  double rmc_seconds = 0;

  bool mult_ready = false;
  Tally mult_tally;
  std::uint64_t mult_runs = 0, mult_failures = 0;
  std::string mult_first_failure;
  double mult_seconds = 0;

  bool a2a_ready = false;
  Tally a2a_tally;
  std::uint64_t a2a_runs = 0, a2a_failures = 0;
  std::string a2a_first_failure;
  double a2a_seconds = 0;

  void progress(const std::string& msg) const {
    if (opt.progress) opt.progress(msg);
  }
};

std::string cell_name(std::uint64_t n, std::uint64_t ell, std::uint32_t T, const SuiteSchedule& s) {
  return "n=" + std::to_string(n) + " ell=" + std::to_string(ell) + " T=" + std::to_string(T) + " " +
         suite_label(s);
}

void ensure_rmc(Context& ctx) {
  if (ctx.rmc_ready) return;
  for (std::uint64_t n = 2; n <= kRmcMaxN; ++n)
    for (std::uint64_t ell = 1; ell < n; ++ell)
      for (std::uint32_t T : kSuiteT)
        for (const auto& s : kSuite) ctx.rmc.push_back({n, ell, T, s, std::nullopt, {}, 0});
  ctx.progress("RMC grid: " + std::to_string(ctx.rmc.size()) + " runs");
  const auto t0 = Clock::now();
  parallel_for(ctx.rmc.size(), ctx.workers, [&](std::size_t i) {
    auto& c = ctx.rmc[i];
    const auto c0 = Clock::now();
    try {
      const auto sched = EvolvingSchedule::named(c.schedule.name, c.n, c.T, c.schedule.seed);
      c.result = rmc_run(SystemConfig{c.n, c.ell, c.T, std::nullopt}, sched);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    c.seconds = since(c0);
  });
  ctx.rmc_seconds = since(t0);
  ctx.rmc_ready = true;
}

void ensure_multiplicity(Context& ctx) {
  if (ctx.mult_ready) return;
  struct Cell {
    std::uint64_t n, delta;
    std::uint32_t T;
    SuiteSchedule s;
  };
  std::vector<Cell> cells;
  for (std::uint64_t n = 2; n <= kMultMaxN; ++n)
    for (std::uint64_t delta = 1; delta <= n; ++delta)
      for (std::uint32_t T : kSuiteT)
        for (const auto& s : kSuite) cells.push_back({n, delta, T, s});
  ctx.progress("multiplicity grid: " + std::to_string(cells.size()) + " runs");
  std::vector<std::optional<MultiplicityResult>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  const auto t0 = Clock::now();
  parallel_for(cells.size(), ctx.workers, [&](std::size_t i) {
    const auto& c = cells[i];
    try {
      std::mt19937_64 rng(kOracleSeed + 1000 * c.n + c.delta);
      const auto perm = random_permutation(c.n, rng);
      std::vector<bool> holders(c.n, false);
      for (std::uint64_t j = 0; j < c.delta; ++j) holders[perm[j]] = true;
      results[i] = multiplicity_run(holders, c.n, EvolvingSchedule::named(c.s.name, c.n, c.T, c.s.seed));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ctx.mult_seconds = since(t0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    ++ctx.mult_runs;
    bool ok = errors[i].empty();
    if (ok) {
      ctx.mult_tally.add(results[i]->congestion);
      for (auto v : results[i]->outputs) ok = ok && v == c.delta;
    }
    if (!ok) {
      ++ctx.mult_failures;
      if (ctx.mult_first_failure.empty())
        ctx.mult_first_failure = "n=" + std::to_string(c.n) + " delta=" + std::to_string(c.delta) +
                                 " T=" + std::to_string(c.T) + " " + suite_label(c.s) +
                                 (errors[i].empty() ? "" : ": " + errors[i]);
    }
  }
  ctx.mult_ready = true;
}

/// Message profiles for n nodes: all distinct, all equal, and a mixed
/// profile with one message held by up to three nodes and the rest unique.
std::vector<std::pair<std::string, std::vector<std::string>>> a2a_profiles(std::uint64_t n) {
  const std::size_t w = std::max<std::size_t>(1, ceil_log2(n));
  std::vector<std::string> distinct;
  for (std::uint64_t v = 0; v < n; ++v) distinct.push_back(bits_of(v, w));
  std::vector<std::string> equal(n, "1");
  std::vector<std::string> mixed;
  // (3,1,1) at n = 5, (2,1,1) at n = 4, (2,1) at n = 3, (1,1) at n = 2.
  const std::uint64_t heavy = n == 2 ? 1 : n == 3 ? 2 : std::min<std::uint64_t>(3, n - 2);
  for (std::uint64_t v = 0; v < n; ++v) mixed.push_back(v < heavy ? distinct[n - 1] : distinct[v - heavy]);
  return {{"all-distinct", distinct}, {"all-equal", equal}, {"mixed", mixed}};
}

void ensure_a2a(Context& ctx) {
  if (ctx.a2a_ready) return;
  struct Cell {
    std::uint64_t n, ell;
    std::uint32_t T;
    SuiteSchedule s;
    std::string profile;
    std::vector<std::string> messages;
  };
  std::vector<Cell> cells;
  for (std::uint64_t n = 2; n <= kA2AMaxN; ++n)
    for (std::uint64_t ell = 1; ell <= kA2AMaxEll && ell < n; ++ell)
      for (std::uint32_t T : kSuiteT)
        for (const auto& s : kSuite)
          for (auto& [name, msgs] : a2a_profiles(n)) {
            // Spread the profile over labels so holders are not always the supervisors.
            std::mt19937_64 rng(kOracleSeed + 77 * n + ell);
            const auto perm = random_permutation(n, rng);
            std::vector<std::string> placed(n);
            for (std::uint64_t v = 0; v < n; ++v) placed[perm[v]] = msgs[v];
            cells.push_back({n, ell, T, s, name, std::move(placed)});
          }
  ctx.progress("all-to-all grid: " + std::to_string(cells.size()) + " runs");
  std::vector<std::optional<A2ARunResult>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  const auto t0 = Clock::now();
  parallel_for(cells.size(), ctx.workers, [&](std::size_t i) {
    const auto& c = cells[i];
    try {
      results[i] = all_to_all(c.messages, SystemConfig{c.n, c.ell, c.T, std::nullopt},
                              EvolvingSchedule::named(c.s.name, c.n, c.T, c.s.seed));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ctx.a2a_seconds = since(t0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    ++ctx.a2a_runs;
    bool ok = errors[i].empty();
    if (ok) {
      ctx.a2a_tally.add(results[i]->congestion);
      std::map<std::string, std::uint64_t> truth;
      for (const auto& m : c.messages) ++truth[m];
      for (const auto& out : results[i]->outputs) {
        std::uint64_t total = 0;
        for (const auto& [m, k] : out) total += k;
        ok = ok && out == truth && total == c.n;
      }
    }
    if (!ok) {
      ++ctx.a2a_failures;
      if (ctx.a2a_first_failure.empty())
        ctx.a2a_first_failure = cell_name(c.n, c.ell, c.T, c.s) + " " + c.profile +
                                (errors[i].empty() ? "" : ": " + errors[i]);
    }
  }
  ctx.a2a_ready = true;
}

CriterionResult criterion_rmc_exact(Context& ctx) {
  ensure_rmc(ctx);
  std::uint64_t wrong = 0;
  std::string first;
  for (const auto& c : ctx.rmc) {
    bool ok = c.result.has_value();
    if (ok)
      for (auto v : c.result->outputs) ok = ok && v == c.n;
    if (!ok) {
      ++wrong;
      if (first.empty()) first = cell_name(c.n, c.ell, c.T, c.schedule) + (c.error.empty() ? "" : ": " + c.error);
    }
  }
  CriterionResult r{1, "RMC outputs n exactly", false, {}, ctx.rmc_seconds};
  const bool in_budget = ctx.rmc_seconds <= kRmcBudgetSeconds;
  r.pass = wrong == 0 && in_budget;
  r.detail = std::to_string(ctx.rmc.size()) + " runs, " + std::to_string(wrong) + " wrong, " +
             fmt_seconds(ctx.rmc_seconds) + " (budget " + fmt_seconds(kRmcBudgetSeconds) + ")";
  if (!first.empty()) r.detail += "; first failure " + first;
  return r;
}

CriterionResult criterion_rmc_rounds(Context& ctx) {
  ensure_rmc(ctx);
  const auto t0 = Clock::now();
  std::uint64_t over = 0, checked = 0;
  Rational worst_ratio = 0;
  std::string first;
  for (const auto& c : ctx.rmc) {
    if (!c.result) continue;
    ++checked;
    const Int used(std::to_string(c.result->rounds));
    Int bound = 0;
    for (const auto& e : c.result->estimate_path) bound += e.epoch_rounds;
    if (bound != c.result->round_bound || used > bound) {
      ++over;
      if (first.empty()) first = cell_name(c.n, c.ell, c.T, c.schedule);
    }
    if (bound > 0) worst_ratio = std::max(worst_ratio, ratio(used, bound));
  }
  CriterionResult r{2, "RMC rounds within the epoch-sum bound", false, {}, since(t0)};
  r.pass = over == 0 && checked == ctx.rmc.size();
  r.detail = std::to_string(checked) + " runs checked, " + std::to_string(over) + " over bound, max used/bound " +
             std::to_string(worst_ratio.get_d());
  if (checked != ctx.rmc.size()) r.detail += ", " + std::to_string(ctx.rmc.size() - checked) + " runs missing";
  if (!first.empty()) r.detail += "; first " + first;
  return r;
}

CriterionResult criterion_multiplicity(Context& ctx) {
  ensure_multiplicity(ctx);
  CriterionResult r{3, "multiplicity returns delta exactly", false, {}, ctx.mult_seconds};
  r.pass = ctx.mult_failures == 0 && ctx.mult_seconds <= kMultiplicityBudgetSeconds;
  r.detail = std::to_string(ctx.mult_runs) + " runs, " + std::to_string(ctx.mult_failures) + " wrong, " +
             fmt_seconds(ctx.mult_seconds) + " (budget " + fmt_seconds(kMultiplicityBudgetSeconds) + ")";
  if (!ctx.mult_first_failure.empty()) r.detail += "; first failure " + ctx.mult_first_failure;
  return r;
}

CriterionResult criterion_all_to_all(Context& ctx) {
  ensure_a2a(ctx);
  CriterionResult r{4, "all-to-all histograms exact", false, {}, ctx.a2a_seconds};
  r.pass = ctx.a2a_failures == 0;
  r.detail = std::to_string(ctx.a2a_runs) + " runs, " + std::to_string(ctx.a2a_failures) + " wrong, " +
             fmt_seconds(ctx.a2a_seconds);
  if (!ctx.a2a_first_failure.empty()) r.detail += "; first failure " + ctx.a2a_first_failure;
  return r;
}

CriterionResult criterion_conservation(Context&) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kOracleSeed + 5);
  std::uint64_t rounds = 0, sum_breaks = 0, negatives = 0;
  for (int traj = 0; traj < kConservationTrajectories; ++traj) {
    const std::size_t n = 2 + draw(rng, 9);
    const std::uint64_t d = 4 + draw(rng, 2 * n + 4);
    const std::uint32_t c = 2 + static_cast<std::uint32_t>(draw(rng, 3));
    const FixedPointParams fp(d, c);
    const Int scale = fp.denominator();
    std::vector<Potential> phi;
    for (std::size_t v = 0; v < n; ++v)
      phi.emplace_back(fp, Int(static_cast<unsigned long>(draw(rng, 1 + 4 * scale.get_ui()))));
    Rational initial = 0;
    for (const auto& p : phi) initial += p.value();
    for (int round = 0; round < kConservationRoundsEach; ++round, ++rounds) {
      // Random graph with every degree below d/2.
      std::vector<std::vector<NodeId>> adj(n);
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
          if (draw(rng, 2) && 2 * (adj[u].size() + 1) < d && 2 * (adj[v].size() + 1) < d) {
            adj[u].push_back(v);
            adj[v].push_back(u);
          }
      std::vector<Potential> next;
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<Potential> received;
        for (NodeId u : adj[v]) received.push_back(phi[u]);
        next.push_back(potential_update(phi[v], received, fp));
      }
      phi = std::move(next);
      Rational total = 0;
      for (const auto& p : phi) {
        total += p.value();
        negatives += p.numerator() < 0;
      }
      sum_breaks += total != initial;
    }
  }
  CriterionResult r{5, "potential updates conserve mass and stay non-negative", false, {}, since(t0)};
  r.pass = sum_breaks == 0 && negatives == 0 && rounds >= 10000;
  r.detail = std::to_string(rounds) + " rounds, " + std::to_string(sum_breaks) + " sum changes, " +
             std::to_string(negatives) + " negative potentials";
  return r;
}

CriterionResult criterion_contraction(Context&) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kOracleSeed + 6);
  int failures = 0, trivial = 0;
  std::string first;
  for (int pair = 0; pair < kContractionPairs; ++pair) {
    const std::size_t n = 2 + draw(rng, 5);
    const auto T = static_cast<std::uint32_t>(1 + draw(rng, 2));
    std::vector<ConstituentGraph> rounds;
    do {
      rounds.clear();
      for (std::uint32_t j = 0; j < T; ++j) rounds.push_back(random_graph(n, rng, 1, 2));
    } while (!union_graph(EvolvingSchedule::cycling(rounds, T), 0, T).connected());
    std::size_t maxdeg = 0;
    for (const auto& g : rounds) maxdeg = std::max(maxdeg, g.max_degree());
    const std::uint64_t d = 2 * maxdeg + 1 + draw(rng, 2 * n);
    DistributionVector x(n);
    for (auto& v : x) v = Rational(static_cast<long>(draw(rng, 20)));
    if (l1_mass(x) == 0) x[draw(rng, n)] = 1;
    const auto c = contraction_check(EvolvingSchedule::cycling(rounds, T), d, T, 0, x);
    trivial += c.before == 0;
    if (!c.holds) {
      ++failures;
      if (first.empty())
        first = "n=" + std::to_string(n) + " T=" + std::to_string(T) + " d=" + std::to_string(d) + " before " +
                to_string(c.before) + " after " + to_string(c.after) + " phi " + to_string(c.conductance);
    }
  }
  CriterionResult r{6, "one-block contraction by (1 - phi^2)", false, {}, since(t0)};
  r.pass = failures == 0;
  r.detail = std::to_string(kContractionPairs) + " pairs, " + std::to_string(failures) + " failures, " +
             std::to_string(trivial) + " already uniform";
  if (!first.empty()) r.detail += "; first " + first;
  return r;
}

CriterionResult criterion_eq1(Context&) {
  const auto t0 = Clock::now();
  std::uint64_t checked = 0, failures = 0;
  std::string first;
  auto check = [&](const ConstituentGraph& g) {
    const std::uint64_t d = 2 * g.n() * g.n();
    const Rational phi = conductance(share_matrix(g, d));
    const Rational i = isoperimetric_number(g);
    ++checked;
    if (phi < i / Rational(static_cast<long>(d))) {
      ++failures;
      if (first.empty()) first = "n=" + std::to_string(g.n()) + " edges=" + std::to_string(g.edges().size());
    }
  };
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<Edge> all;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) all.emplace_back(u, v);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
      std::vector<Edge> e;
      for (std::size_t b = 0; b < all.size(); ++b)
        if (mask >> b & 1) e.push_back(all[b]);
      ConstituentGraph g(n, e);
      if (g.connected()) check(g);
    }
  }
  std::mt19937_64 rng(kOracleSeed + 7);
  for (std::size_t n : {5, 6})
    for (int s = 0; s < kEq1RandomSamples;) {
      auto g = random_graph(n, rng, 1, 2);
      if (!g.connected()) continue;
      check(g);
      ++s;
    }
  CriterionResult r{7, "conductance at least i(G)/d", false, {}, since(t0)};
  r.pass = failures == 0;
  r.detail = std::to_string(checked) + " connected graphs, " + std::to_string(failures) + " failures";
  if (!first.empty()) r.detail += "; first " + first;
  return r;
}

CriterionResult criterion_broadcast(Context&) {
  const auto t0 = Clock::now();
  std::uint64_t checked = 0, failures = 0, slack_min = UINT64_MAX;
  std::string first;
  for (std::uint64_t n = 2; n <= kMultMaxN; ++n)
    for (std::uint32_t T : kSuiteT)
      for (const auto& ss : kSuite) {
        const auto s = EvolvingSchedule::named(ss.name, n, T, ss.seed);
        const std::uint64_t horizon = s.period().value_or(16 * T);
        const Rational i_min = min_window_isoperimetric(s, horizon);
        const std::uint64_t bound = broadcast_rounds(n, T, i_min);
        std::uint64_t worst = 0;
        bool ok = true;
        try {
          worst = worst_broadcast_time(s, horizon, bound);
        } catch (const Error&) {
          ok = false;
        }
        ok = ok && worst <= bound;
        ++checked;
        if (ok) slack_min = std::min(slack_min, bound - worst);
        if (!ok) {
          ++failures;
          if (first.empty())
            first = "n=" + std::to_string(n) + " T=" + std::to_string(T) + " " + suite_label(ss) + " bound " +
                    std::to_string(bound);
        }
      }
  CriterionResult r{8, "flooding completes within the r' bound", false, {}, since(t0)};
  r.pass = failures == 0;
  r.detail = std::to_string(checked) + " schedules, " + std::to_string(failures) + " failures, min slack " +
             (slack_min == UINT64_MAX ? std::string("n/a") : std::to_string(slack_min)) + " rounds";
  if (!first.empty()) r.detail += "; first " + first;
  return r;
}

CriterionResult criterion_alarms(Context& ctx) {
  ensure_rmc(ctx);
  const auto t0 = Clock::now();
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>, RmcParams> params;
  auto P = [&](std::uint64_t k, std::uint64_t ell, std::uint32_t T) -> const RmcParams& {
    auto key = std::make_tuple(k, ell, T);
    auto it = params.find(key);
    if (it == params.end()) it = params.emplace(key, derive_rmc_params(k, ell, T, Rational(1))).first;
    return it->second;
  };
  std::uint64_t epochs = 0, l5 = 0, l6 = 0, l7 = 0, l5_cases = 0, l6_cases = 0, l7_cases = 0;
  std::string first;
  for (const auto& c : ctx.rmc) {
    if (!c.result) continue;
    const auto& res = *c.result;
    for (std::size_t v = 0; v < res.histories.size(); ++v) {
      for (const auto& rec : res.histories[v]) {
        ++epochs;
        if (rec.k >= c.n) {
          ++l5_cases;
          if (rec.phase1_over_tau) {
            ++l5;
            if (first.empty()) first = "Lemma 5 at " + cell_name(c.n, c.ell, c.T, c.schedule);
          }
        }
        if (pow_one_plus_eps_below(rec.k, Rational(1), c.n)) {
          ++l6_cases;
          if (rec.status_after_phase2 != Status::low) {
            ++l6;
            if (first.empty()) first = "Lemma 6 at " + cell_name(c.n, c.ell, c.T, c.schedule);
          }
        }
        if (rec.k > c.n && res.roles[v] == Role::supervisor) {
          ++l7_cases;
          const auto& p = P(rec.k, c.ell, c.T);
          bool ok = false;
          if (rec.rho) {
            Rational rho(*rec.rho, p.denominator);
            rho.canonicalize();
            ok = rho < p.rho_lower;
          }
          if (!ok) {
            ++l7;
            if (first.empty()) first = "Lemma 7 at " + cell_name(c.n, c.ell, c.T, c.schedule);
          }
        }
      }
    }
  }
  CriterionResult r{9, "alarm lemmas hold in every epoch", false, {}, since(t0)};
  r.pass = l5 + l6 + l7 == 0;
  r.detail = std::to_string(epochs) + " node-epochs; violations L5 " + std::to_string(l5) + "/" +
             std::to_string(l5_cases) + ", L6 " + std::to_string(l6) + "/" + std::to_string(l6_cases) + ", L7 " +
             std::to_string(l7) + "/" + std::to_string(l7_cases);
  if (!first.empty()) r.detail += "; first " + first;
  return r;
}

CriterionResult criterion_congestion(Context& ctx) {
  ensure_rmc(ctx);
  ensure_multiplicity(ctx);
  ensure_a2a(ctx);
  const auto t0 = Clock::now();
  Tally rmc;
  for (const auto& c : ctx.rmc)
    if (c.result) rmc.add(c.result->congestion);
  const std::uint64_t runs = rmc.runs + ctx.mult_tally.runs + ctx.a2a_tally.runs;
  const std::uint64_t violations = rmc.violations + ctx.mult_tally.violations + ctx.a2a_tally.violations;
  const std::uint64_t expected = ctx.rmc.size() + ctx.mult_runs + ctx.a2a_runs;
  const bool audited = rmc.audited_epochs > 0 && ctx.mult_tally.audited_epochs > 0 && ctx.a2a_tally.audited_epochs > 0;
  CriterionResult r{10, "no message exceeds the congestion bound", false, {}, since(t0)};
  r.pass = violations == 0 && runs == expected && audited;
  r.detail = std::to_string(runs) + " runs audited, " + std::to_string(violations) + " oversized messages, max " +
             std::to_string(std::max({rmc.max_bits, ctx.mult_tally.max_bits, ctx.a2a_tally.max_bits})) + " bits";
  if (runs != expected) r.detail += ", " + std::to_string(expected - runs) + " runs missing";
  return r;
}

std::string jsonl(const std::vector<TraceRecord>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.to_json_line() + "\n";
  return out;
}

CriterionResult criterion_determinism(Context&) {
  const auto t0 = Clock::now();
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  // Repeated summaries, full parameters.
  for (auto protocol : {ProtocolKind::rmc, ProtocolKind::multiplicity, ProtocolKind::all2all}) {
    ExperimentConfig c;
    c.protocol = protocol;
    c.n = 4;
    c.ell = 1;
    c.T = 2;
    c.schedule = "random-t-connected";
    c.seed = 2;
    c.delta = 3;
    c.messages = {"10", "01", "10", "11"};
    const auto a = run_experiment(c).summary.dump();
    const auto b = run_experiment(c).summary.dump();
    expect(a == b, std::string("repeated ") + to_string(protocol) + " summary differs");
    // The embedded config reproduces the summary.
    const auto again = run_experiment(config_from_json(Json::parse(a)["config"])).summary.dump();
    expect(a == again, std::string("embedded config of ") + to_string(protocol) + " does not reproduce it");
  }

  // Repeated traces, stepped round by round.
  {
    const auto s = EvolvingSchedule::named("random-t-connected", 3, 2, 9);
    std::string first_trace;
    for (int rep = 0; rep < 2; ++rep) {
      MemoryTrace mem;
      MultRunOptions o;
      o.sim.trace = &mem;
      multiplicity_run(std::vector<bool>{true, false, true}, 3, s, o);
      const auto text = jsonl(mem.rows);
      if (rep == 0)
        first_trace = text;
      else
        expect(text == first_trace && !text.empty(), "repeated multiplicity trace differs");
    }
    // Traced runs are stepped, so the reduced RMC trace stays at T = 1.
    const auto s1 = EvolvingSchedule::named("random-t-connected", 3, 1, 9);
    std::string rmc_trace;
    for (int rep = 0; rep < 2; ++rep) {
      MemoryTrace mem;
      RmcRunOptions o;
      o.reduced = ReducedMode{16, 256, 1};
      o.sim.trace = &mem;
      rmc_run(SystemConfig{3, 1, 1, std::nullopt}, s1, o);
      const auto text = jsonl(mem.rows);
      if (rep == 0)
        rmc_trace = text;
      else
        expect(text == rmc_trace && !text.empty(), "repeated reduced RMC trace differs");
    }
  }

  // Label permutations and inbox orderings.
  std::mt19937_64 rng(kOracleSeed + 11);
  for (int trial = 0; trial < 3; ++trial) {
    const std::uint64_t n = 4 + trial % 2;
    const std::uint32_t T = 1 + trial % 2;
    const auto s = EvolvingSchedule::named("random-t-connected", n, T, 40 + trial);
    const auto perm = random_permutation(n, rng);
    const auto ps = s.relabeled(perm);

    RmcRunOptions base;
    base.roles = default_roles(n, 2);
    RmcRunOptions moved = base;
    for (std::size_t v = 0; v < n; ++v) moved.roles[perm[v]] = base.roles[v];
    moved.sim.shuffle_seed = 1000 + trial;
    const auto a = rmc_run(SystemConfig{n, 2, T, std::nullopt}, s, base);
    const auto b = rmc_run(SystemConfig{n, 2, T, std::nullopt}, ps, moved);
    bool same = a.rounds == b.rounds;
    for (std::size_t v = 0; v < n; ++v) same = same && a.outputs[v] == b.outputs[perm[v]];
    expect(same, "RMC outputs change under relabeling (trial " + std::to_string(trial) + ")");

    std::vector<bool> holders(n, false);
    holders[0] = holders[n - 1] = true;
    std::vector<bool> moved_holders(n);
    for (std::size_t v = 0; v < n; ++v) moved_holders[perm[v]] = holders[v];
    MultRunOptions mo;
    mo.sim.shuffle_seed = 2000 + trial;
    const auto ma = multiplicity_run(holders, n, s);
    const auto mb = multiplicity_run(moved_holders, n, ps, mo);
    same = ma.rounds == mb.rounds;
    for (std::size_t v = 0; v < n; ++v) same = same && ma.outputs[v] == mb.outputs[perm[v]];
    expect(same, "multiplicity outputs change under relabeling (trial " + std::to_string(trial) + ")");

    std::vector<std::string> msgs(n);
    for (std::size_t v = 0; v < n; ++v) msgs[v] = bits_of(v % 3, ceil_log2(n));
    std::vector<std::string> moved_msgs(n);
    for (std::size_t v = 0; v < n; ++v) moved_msgs[perm[v]] = msgs[v];
    A2ARunOptions ao;
    ao.roles = default_roles(n, 1);
    A2ARunOptions bo = ao;
    for (std::size_t v = 0; v < n; ++v) bo.roles[perm[v]] = ao.roles[v];
    bo.sim.shuffle_seed = 3000 + trial;
    const auto xa = all_to_all(msgs, SystemConfig{n, 1, T, std::nullopt}, s, ao);
    const auto xb = all_to_all(moved_msgs, SystemConfig{n, 1, T, std::nullopt}, ps, bo);
    same = xa.rounds == xb.rounds;
    for (std::size_t v = 0; v < n; ++v) same = same && xa.outputs[v] == xb.outputs[perm[v]];
    expect(same, "all-to-all outputs change under relabeling (trial " + std::to_string(trial) + ")");
  }

  CriterionResult r{11, "determinism and label-permutation invariance", false, {}, since(t0)};
  r.pass = problems.empty();
  r.detail = problems.empty() ? "summaries, traces and permuted runs identical" : problems.front();
  if (problems.size() > 1) r.detail += " (+" + std::to_string(problems.size() - 1) + " more)";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Context ctx;
  ctx.opt = options;
  ctx.workers = options.workers ? options.workers : std::max(1U, std::thread::hardware_concurrency());
  using Fn = CriterionResult (*)(Context&);
  const Fn criteria[kCriterionCount] = {
      criterion_rmc_exact,  criterion_rmc_rounds, criterion_multiplicity, criterion_all_to_all,
      criterion_conservation, criterion_contraction, criterion_eq1,       criterion_broadcast,
      criterion_alarms,     criterion_congestion, criterion_determinism,
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    CriterionResult r;
    try {
      r = criteria[id - 1](ctx);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("aborted: ") + e.what(), 0};
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + ": " + r.title + " (" +
         r.detail + ")";
}

}  // namespace adcs
