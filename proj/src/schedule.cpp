#include "adcs/graph.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace adcs {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32U),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

// Rejection sampling keeps the draw identical on every standard library,
// unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<Edge> path_over(const std::vector<NodeId>& order) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) e.emplace_back(order[i], order[i + 1]);
  return e;
}

}  // namespace

EvolvingSchedule EvolvingSchedule::static_graph(ConstituentGraph g, std::uint32_t T, std::string label) {
  if (T < 1) throw Error("T must be >= 1");
  EvolvingSchedule s;
  s.kind_ = ScheduleKind::static_graph;
  s.n_ = g.n();
  s.T_ = T;
  s.label_ = std::move(label);
  s.pattern_.push_back(std::move(g));
  return s;
}

EvolvingSchedule EvolvingSchedule::cycling(std::vector<ConstituentGraph> rounds, std::uint32_t T,
                                           std::string label) {
  if (rounds.empty()) throw Error("cycling schedule needs at least one round");
  if (T < 1) throw Error("T must be >= 1");
  for (const auto& g : rounds)
    if (g.n() != rounds.front().n()) throw Error("cycling schedule rounds disagree on n");
  EvolvingSchedule s;
  s.kind_ = ScheduleKind::cycling;
  s.n_ = rounds.front().n();
  s.T_ = T;
  s.label_ = std::move(label);
  s.pattern_ = std::move(rounds);
  return s;
}

EvolvingSchedule EvolvingSchedule::matching_alternation(std::size_t n, std::uint32_t T) {
  if (n < 2) throw Error("matching-alternation needs n >= 2");
  if (T < 1) throw Error("T must be >= 1");
  std::vector<NodeId> all(n);
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  std::vector<Edge> a, b;
  if (T == 1) {
    // Each round must be connected on its own: alternate two spanning paths.
    a = path_over(all);
    std::vector<NodeId> order;
    for (NodeId v = 0; v < n; v += 2) order.push_back(v);
    for (NodeId v = static_cast<NodeId>(n - 1 - (n % 2 == 0 ? 0 : 1)); v < n; v -= 2) order.push_back(v);
    b = path_over(order);
  } else if (n >= 4) {
    // Both rounds disconnected: halves versus parity classes. Every half
    // meets both parity classes, so any two consecutive rounds connect.
    const std::size_t h = n / 2;
    std::vector<NodeId> lo(all.begin(), all.begin() + static_cast<long>(h));
    std::vector<NodeId> hi(all.begin() + static_cast<long>(h), all.end());
    a = path_over(lo);
    auto a2 = path_over(hi);
    a.insert(a.end(), a2.begin(), a2.end());
    std::vector<NodeId> even, odd;
    for (NodeId v = 0; v < n; ++v) (v % 2 == 0 ? even : odd).push_back(v);
    b = path_over(even);
    auto b2 = path_over(odd);
    b.insert(b.end(), b2.begin(), b2.end());
  } else {
    // Too few nodes for two disconnected rounds: a spanning path alternating
    // with a sparse matching.
    a = path_over(all);
    if (n == 3) b = {{0, 2}};
  }
  EvolvingSchedule s;
  s.kind_ = ScheduleKind::matching_alternation;
  s.n_ = n;
  s.T_ = T;
  s.label_ = "matching-alternation";
  s.pattern_ = {ConstituentGraph(n, a), ConstituentGraph(n, b)};
  return s;
}

EvolvingSchedule EvolvingSchedule::random_t_connected(std::size_t n, std::uint32_t T, std::uint64_t seed,
                                                      std::uint64_t period_windows) {
  if (n < 2) throw Error("random-t-connected needs n >= 2");
  if (T < 1) throw Error("T must be >= 1");
  EvolvingSchedule s;
  s.kind_ = ScheduleKind::random_t_connected;
  s.n_ = n;
  s.T_ = T;
  s.seed_ = seed;
  s.period_windows_ = period_windows;
  s.label_ = "random-t-connected";
  auto rng = seeded_engine(seed, 0xA5A5A5A5ULL, n, T);
  s.tree_offset_ = uniform_below(rng, T);
  return s;
}

EvolvingSchedule EvolvingSchedule::named(const std::string& name, std::size_t n, std::uint32_t T,
                                         std::uint64_t seed) {
  if (n < 2) throw Error("schedules need n >= 2");
  if (name == "static-clique") return static_graph(ConstituentGraph::complete(n), T, name);
  if (name == "static-path") return static_graph(ConstituentGraph::path(n), T, name);
  if (name == "static-cycle") return static_graph(ConstituentGraph::cycle(n), T, name);
  if (name == "static-star") return static_graph(ConstituentGraph::star(n), T, name);
  if (name == "matching-alternation") return matching_alternation(n, T);
  if (name == "random-t-connected") return random_t_connected(n, T, seed);
  throw Error("unknown schedule family: " + name);
}

std::optional<std::uint64_t> EvolvingSchedule::period() const {
  switch (kind_) {
    case ScheduleKind::static_graph:
    case ScheduleKind::cycling:
    case ScheduleKind::matching_alternation:
      return pattern_.size();
    case ScheduleKind::random_t_connected:
      if (period_windows_ == 0) return std::nullopt;
      return period_windows_ * T_;
  }
  return std::nullopt;
}

ConstituentGraph EvolvingSchedule::raw_graph_at(std::uint64_t t) const {
  if (kind_ != ScheduleKind::random_t_connected) return pattern_[t % pattern_.size()];
  if (period_windows_ > 0) t %= period_windows_ * T_;
  auto rng = seeded_engine(seed_, t, n_, T_);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v = u + 1; v < n_; ++v)
      if (uniform_below(rng, n_) == 0) edges.emplace_back(u, v);
  if (t % T_ == tree_offset_) {
    std::vector<NodeId> order(n_);
    for (NodeId v = 0; v < n_; ++v) order[v] = v;
    for (std::size_t i = n_ - 1; i > 0; --i) std::swap(order[i], order[uniform_below(rng, i + 1)]);
    for (std::size_t i = 1; i < n_; ++i) edges.emplace_back(order[i], order[uniform_below(rng, i)]);
  }
  return ConstituentGraph(n_, std::move(edges));
}

ConstituentGraph EvolvingSchedule::graph_at(std::uint64_t t) const {
  if (relabel_.empty()) return raw_graph_at(t);
  return raw_graph_at(t).relabeled(relabel_);
}

EvolvingSchedule EvolvingSchedule::relabeled(const std::vector<NodeId>& perm) const {
  if (perm.size() != n_) throw Error("permutation size mismatch");
  EvolvingSchedule s = *this;
  if (relabel_.empty()) {
    s.relabel_ = perm;
  } else {
    for (std::size_t v = 0; v < n_; ++v) s.relabel_[v] = perm[relabel_[v]];
  }
  return s;
}

EvolvingSchedule read_schedule(std::istream& in) {
  std::string line;
  std::optional<std::size_t> n;
  std::uint32_t T = 0;
  std::map<std::uint64_t, std::vector<Edge>> rounds;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw Error("schedule file line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!n) {
      std::size_t nv = 0;
      unsigned long tv = 0;
      if (std::sscanf(line.c_str(), "n=%zu T=%lu", &nv, &tv) != 2) fail("expected header 'n=<int> T=<int>'");
      if (nv < 2 || tv < 1) fail("header needs n >= 2 and T >= 1");
      n = nv;
      T = static_cast<std::uint32_t>(tv);
      continue;
    }
    if (line.rfind("t=", 0) != 0) fail("expected 't=<int>: ...'");
    auto colon = line.find(':');
    if (colon == std::string::npos) fail("missing ':'");
    std::uint64_t t = 0;
    try {
      t = std::stoull(line.substr(2, colon - 2));
    } catch (const std::exception&) {
      fail("bad round index");
    }
    if (rounds.count(t)) fail("duplicate round " + std::to_string(t));
    std::vector<Edge> edges;
    std::stringstream rest(line.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      auto a = item.find_first_not_of(' ');
      if (a == std::string::npos) continue;
      item = item.substr(a);
      while (!item.empty() && item.back() == ' ') item.pop_back();
      unsigned long u = 0, v = 0;
      char dash = 0;
      std::stringstream es(item);
      if (!(es >> u >> dash >> v) || dash != '-' || !es.eof()) fail("bad edge '" + item + "'");
      if (u >= *n || v >= *n || u == v) fail("edge '" + item + "' out of range or a self-loop");
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    rounds[t] = std::move(edges);
  }
  if (!n) throw Error("schedule file: missing header");
  if (rounds.empty()) throw Error("schedule file: no rounds");
  std::vector<ConstituentGraph> graphs;
  std::uint64_t expect = rounds.begin()->first;
  if (expect != 0) throw Error("schedule file: rounds must start at t=0");
  for (auto& [t, edges] : rounds) {
    if (t != expect) throw Error("schedule file: rounds must be contiguous");
    graphs.emplace_back(*n, std::move(edges));
    ++expect;
  }
  return EvolvingSchedule::cycling(std::move(graphs), T, "file");
}

EvolvingSchedule load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schedule file: " + path);
  return read_schedule(in);
}

void write_schedule(std::ostream& out, const EvolvingSchedule& s, std::uint64_t rounds) {
  out << "n=" << s.n() << " T=" << s.T() << "\n";
  for (std::uint64_t t = 0; t < rounds; ++t) {
    out << "t=" << t << ":";
    const auto g = s.graph_at(t);
    for (std::size_t i = 0; i < g.edges().size(); ++i)
      out << (i ? "," : " ") << g.edges()[i].first << "-" << g.edges()[i].second;
    out << "\n";
  }
}

}  // namespace adcs
