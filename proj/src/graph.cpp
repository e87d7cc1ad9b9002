#include "adcs/graph.hpp"

#include <algorithm>
#include <numeric>

namespace adcs {

ConstituentGraph::ConstituentGraph(std::size_t n, std::vector<Edge> edges) : n_(n) {
  for (auto& [u, v] : edges) {
    if (u >= n || v >= n) throw Error("edge endpoint out of range");
    if (u == v) throw Error("self-loop in constituent graph");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

ConstituentGraph ConstituentGraph::complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return ConstituentGraph(n, std::move(e));
}

ConstituentGraph ConstituentGraph::path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return ConstituentGraph(n, std::move(e));
}

ConstituentGraph ConstituentGraph::cycle(std::size_t n) {
  auto g = path(n);
  if (n < 3) return g;
  auto e = g.edges();
  e.emplace_back(0, static_cast<NodeId>(n - 1));
  return ConstituentGraph(n, std::move(e));
}

ConstituentGraph ConstituentGraph::star(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(0, v);
  return ConstituentGraph(n, std::move(e));
}

bool ConstituentGraph::has_edge(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

std::vector<std::vector<NodeId>> ConstituentGraph::adjacency() const {
  std::vector<std::vector<NodeId>> adj(n_);
  for (auto [u, v] : edges_) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

std::vector<std::size_t> ConstituentGraph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (auto [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

std::size_t ConstituentGraph::max_degree() const {
  auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

std::vector<NodeId> ConstituentGraph::components() const {
  std::vector<NodeId> parent(n_);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto [u, v] : edges_) {
    NodeId a = find(u), b = find(v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<NodeId> label(n_);
  for (NodeId v = 0; v < n_; ++v) label[v] = find(v);
  return label;
}

bool ConstituentGraph::connected() const {
  if (n_ <= 1) return true;
  auto label = components();
  return std::all_of(label.begin(), label.end(), [](NodeId l) { return l == 0; });
}

ConstituentGraph ConstituentGraph::relabeled(const std::vector<NodeId>& perm) const {
  if (perm.size() != n_) throw Error("permutation size mismatch");
  std::vector<Edge> e;
  e.reserve(edges_.size());
  for (auto [u, v] : edges_) e.emplace_back(perm[u], perm[v]);
  return ConstituentGraph(n_, std::move(e));
}

ConstituentGraph union_graph(const EvolvingSchedule& s, std::uint64_t start, std::uint64_t window) {
  if (window < 1) throw Error("union_graph: window must be >= 1");
  std::vector<Edge> all;
  for (std::uint64_t t = start; t < start + window; ++t) {
    const auto g = s.graph_at(t);
    all.insert(all.end(), g.edges().begin(), g.edges().end());
  }
  return ConstituentGraph(s.n(), std::move(all));
}

std::vector<bool> temporal_reach(const EvolvingSchedule& s, const std::vector<bool>& sources,
                                 std::uint64_t start, std::uint64_t rounds) {
  std::vector<bool> reached = sources;
  std::vector<bool> hit(s.n());
  for (std::uint64_t t = start; t < start + rounds; ++t) {
    const auto label = s.graph_at(t).components();
    std::fill(hit.begin(), hit.end(), false);
    for (std::size_t v = 0; v < s.n(); ++v)
      if (reached[v]) hit[label[v]] = true;
    for (std::size_t v = 0; v < s.n(); ++v) reached[v] = hit[label[v]];
  }
  return reached;
}

bool is_t_connected(const EvolvingSchedule& s, std::uint64_t start, std::uint32_t T) {
  if (T < 1) throw Error("is_t_connected: T must be >= 1");
  const std::size_t n = s.n();
  std::vector<std::vector<NodeId>> labels;
  labels.reserve(T);
  for (std::uint64_t t = start; t < start + T; ++t) labels.push_back(s.graph_at(t).components());
  std::vector<bool> reached(n), hit(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::fill(reached.begin(), reached.end(), false);
    reached[u] = true;
    for (const auto& label : labels) {
      std::fill(hit.begin(), hit.end(), false);
      for (std::size_t v = 0; v < n; ++v)
        if (reached[v]) hit[label[v]] = true;
      for (std::size_t v = 0; v < n; ++v) reached[v] = hit[label[v]];
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end()) return false;
  }
  return true;
}

std::optional<std::uint64_t> first_disconnected_window(const EvolvingSchedule& s, std::uint64_t horizon,
                                                       WindowMode mode) {
  const std::uint64_t step = mode == WindowMode::aligned ? s.T() : 1;
  for (std::uint64_t start = 0; start < horizon; start += step)
    if (!is_t_connected(s, start, s.T())) return start;
  return std::nullopt;
}

}  // namespace adcs
