#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "topocons/spectral.hpp"

namespace topocons {

/// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for (seed, stream_id, index): mix64 chained over the three words.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index);

/// Reproducible 64-bit generator identified by (seed, stream_id). Independent
/// children are obtained with substream(k), whose state depends only on
/// (seed, stream_id, k); Monte Carlo loops give sample k its own substream so
/// results do not depend on scheduling or thread count.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  SeededRng substream(std::uint64_t index) const;

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller on uniform()).
  double normal();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Link formation probabilities P over the realizable edges of a supergraph,
/// laid out in Supergraph edge order. Support is contained in the supergraph
/// by construction; zero entries are allowed.
class EdgeProbabilityMatrix {
 public:
  EdgeProbabilityMatrix() = default;
  EdgeProbabilityMatrix(Supergraph graph, Eigen::VectorXd probs);

  static EdgeProbabilityMatrix constant(Supergraph graph, double p);
  /// Builds from (u, v, p) triples; the supergraph is the set of listed pairs.
  static EdgeProbabilityMatrix from_triples(int n, const std::vector<WeightedEdged>& triples);

  const Supergraph& graph() const { return graph_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  int num_vertices() const { return graph_.num_vertices(); }
  std::size_t num_edges() const { return graph_.num_edges(); }

  /// P_nl for any pair; 0 off the supergraph.
  double probability(int u, int v) const;
  /// Dense N x N view with zero diagonal.
  Eigen::MatrixXd dense() const;
  /// Edges with P_nl > 0.
  Supergraph support() const;

 private:
  Supergraph graph_;
  Eigen::VectorXd probs_;
};

/// One realization of the random topology.
struct TopologySample {
  std::vector<Edge> active_edges;
  Laplaciand laplacian;  // unit weights on active_edges
};

/// Draws the active-edge mask: edge k (lexicographic order) is included iff
/// a fresh uniform draw falls below P_k.
std::vector<char> sample_edge_mask(const EdgeProbabilityMatrix& p, SeededRng& rng);

TopologySample sample_topology(const EdgeProbabilityMatrix& p, SeededRng& rng);

/// E[L] = Laplacian with weight P_nl on each realizable edge.
Laplaciand mean_laplacian(const EdgeProbabilityMatrix& p);

/// Entrywise average of n_samples sampled Laplacians; sample k is drawn from
/// rng.substream(k).
Laplaciand empirical_mean_laplacian(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng);

/// Whether lambda_2 of the mean Laplacian exceeds `threshold`.
bool mean_graph_connected(const EdgeProbabilityMatrix& p, double threshold = kConnectivityThreshold);

}  // namespace topocons
