#include "topocons/spectral.hpp"

#include <algorithm>
#include <queue>

namespace topocons {

Supergraph::Supergraph(int n_vertices, std::vector<Edge> edges) : n_(n_vertices), edges_(std::move(edges)) {
  if (n_ < 0) throw std::invalid_argument("Supergraph: negative vertex count");
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
      throw std::invalid_argument("Supergraph: edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("Supergraph: self-loop");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("Supergraph: duplicate edge");
  }
}

Supergraph Supergraph::complete(int n_vertices) {
  std::vector<Edge> edges;
  for (int u = 0; u < n_vertices; ++u) {
    for (int v = u + 1; v < n_vertices; ++v) edges.push_back({u, v});
  }
  return {n_vertices, std::move(edges)};
}

Supergraph Supergraph::path(int n_vertices) {
  std::vector<Edge> edges;
  for (int u = 0; u + 1 < n_vertices; ++u) edges.push_back({u, u + 1});
  return {n_vertices, std::move(edges)};
}

std::optional<std::size_t> Supergraph::find(Edge e) const {
  if (e.u > e.v) std::swap(e.u, e.v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::vector<int> Supergraph::degrees() const {
  std::vector<int> d(n_, 0);
  for (const auto& e : edges_) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

int Supergraph::max_degree() const {
  const auto d = degrees();
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::vector<std::vector<int>> Supergraph::neighbors() const {
  std::vector<std::vector<int>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

Supergraph Supergraph::subgraph(std::span<const char> keep) const {
  if (keep.size() != edges_.size()) throw std::invalid_argument("Supergraph::subgraph: mask size mismatch");
  Supergraph out;
  out.n_ = n_;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (keep[k]) out.edges_.push_back(edges_[k]);
  }
  return out;
}

std::vector<int> connected_components(const Supergraph& g) {
  const auto adj = g.neighbors();
  std::vector<int> label(g.num_vertices(), -1);
  int next = 0;
  for (int s = 0; s < g.num_vertices(); ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (label[v] < 0) {
          label[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(const Supergraph& g) {
  const auto label = connected_components(g);
  return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

}  // namespace topocons
