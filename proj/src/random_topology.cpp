#include "topocons/random_topology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace topocons {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stream_id) ^ index);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(derive_seed(seed, stream_id, ~0ULL)) {}

SeededRng SeededRng::substream(std::uint64_t index) const {
  return SeededRng(derive_seed(seed_, stream_id_, index), index);
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below: zero bound");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

EdgeProbabilityMatrix::EdgeProbabilityMatrix(Supergraph graph, Eigen::VectorXd probs)
    : graph_(std::move(graph)), probs_(std::move(probs)) {
  if (static_cast<std::size_t>(probs_.size()) != graph_.num_edges()) {
    throw std::invalid_argument("EdgeProbabilityMatrix: one probability per realizable edge required");
  }
  for (Eigen::Index k = 0; k < probs_.size(); ++k) {
    if (!(probs_(k) >= 0.0 && probs_(k) <= 1.0)) {
      throw std::invalid_argument("EdgeProbabilityMatrix: probability outside [0, 1]");
    }
  }
}

EdgeProbabilityMatrix EdgeProbabilityMatrix::constant(Supergraph graph, double p) {
  const auto m = static_cast<Eigen::Index>(graph.num_edges());
  return {std::move(graph), Eigen::VectorXd::Constant(m, p)};
}

EdgeProbabilityMatrix EdgeProbabilityMatrix::from_triples(int n, const std::vector<WeightedEdged>& triples) {
  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& t : triples) edges.push_back({t.u, t.v});
  Supergraph g(n, edges);
  Eigen::VectorXd probs(static_cast<Eigen::Index>(g.num_edges()));
  for (const auto& t : triples) probs(static_cast<Eigen::Index>(*g.find({t.u, t.v}))) = t.weight;
  return {std::move(g), std::move(probs)};
}

double EdgeProbabilityMatrix::probability(int u, int v) const {
  if (u == v) return 0.0;
  const auto k = graph_.find({u, v});
  return k ? probs_(static_cast<Eigen::Index>(*k)) : 0.0;
}

Eigen::MatrixXd EdgeProbabilityMatrix::dense() const {
  const int n = graph_.num_vertices();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < graph_.num_edges(); ++k) {
    const auto& e = graph_.edge(k);
    m(e.u, e.v) = m(e.v, e.u) = probs_(static_cast<Eigen::Index>(k));
  }
  return m;
}

Supergraph EdgeProbabilityMatrix::support() const {
  std::vector<char> keep(graph_.num_edges());
  for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = probs_(static_cast<Eigen::Index>(k)) > 0.0;
  return graph_.subgraph(keep);
}

std::vector<char> sample_edge_mask(const EdgeProbabilityMatrix& p, SeededRng& rng) {
  std::vector<char> mask(p.num_edges());
  const auto& probs = p.probs();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    mask[k] = rng.uniform() < probs(static_cast<Eigen::Index>(k));
  }
  return mask;
}

TopologySample sample_topology(const EdgeProbabilityMatrix& p, SeededRng& rng) {
  const auto mask = sample_edge_mask(p, rng);
  TopologySample out;
  std::vector<WeightedEdged> weighted;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    out.active_edges.push_back(p.graph().edge(k));
    weighted.push_back({p.graph().edge(k).u, p.graph().edge(k).v, 1.0});
  }
  out.laplacian = build_laplacian(p.num_vertices(), weighted);
  return out;
}

Laplaciand mean_laplacian(const EdgeProbabilityMatrix& p) { return build_laplacian(p.graph(), p.probs()); }

Laplaciand empirical_mean_laplacian(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng) {
  if (n_samples < 1) throw std::invalid_argument("empirical_mean_laplacian: n_samples must be >= 1");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.num_edges()));
  for (int s = 0; s < n_samples; ++s) {
    auto sub = rng.substream(static_cast<std::uint64_t>(s));
    const auto mask = sample_edge_mask(p, sub);
    for (std::size_t k = 0; k < mask.size(); ++k) counts(static_cast<Eigen::Index>(k)) += mask[k];
  }
  return build_laplacian(p.graph(), Eigen::VectorXd(counts / n_samples));
}

bool mean_graph_connected(const EdgeProbabilityMatrix& p, double threshold) {
  return algebraic_connectivity(mean_laplacian(p)) > threshold;
}

}  // namespace topocons
