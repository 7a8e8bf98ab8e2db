#include "topocons/consensus.hpp"

#include <cmath>
#include <stdexcept>

namespace topocons {

SymmetricMatrixd weight_matrix(const Laplaciand& l, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("weight_matrix: alpha must be finite");
  const auto n = l.order();
  return SymmetricMatrixd(Eigen::MatrixXd::Identity(n, n) - alpha * l.matrix());
}

ConsensusTarget consensus_target(const StateVector& x0) {
  ConsensusTarget t;
  t.average = x0.size() ? x0.mean() : 0.0;
  t.vector = StateVector::Constant(x0.size(), t.average);
  return t;
}

void consensus_step(const Supergraph& g, const std::vector<char>& active, double alpha, StateVector& x) {
  StateVector next = x;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (!active[k]) continue;
    const auto& e = g.edge(k);
    const double flow = alpha * (x(e.u) - x(e.v));
    next(e.u) -= flow;
    next(e.v) += flow;
  }
  x.swap(next);
}

Trajectory run_consensus(const StateVector& x0, const EdgeProbabilityMatrix& p, double alpha, int iters,
                         SeededRng& rng, const RunOptions& options) {
  if (iters < 0) throw std::invalid_argument("run_consensus: iters must be >= 0");
  if (x0.size() != p.num_vertices()) throw std::invalid_argument("run_consensus: state size mismatch");
  if (!x0.allFinite()) throw std::invalid_argument("run_consensus: non-finite initial state");

  const auto target = consensus_target(x0);
  const double x0_norm = x0.norm() > 0.0 ? x0.norm() : 1.0;

  Trajectory t;
  t.initial_sum = x0.sum();
  t.error_norms.reserve(static_cast<std::size_t>(iters) + 1);
  if (options.store_states) t.states.push_back(x0);
  t.error_norms.push_back((x0 - target.vector).norm());

  StateVector x = x0;
  for (int i = 0; i < iters; ++i) {
    const auto mask = sample_edge_mask(p, rng);
    consensus_step(p.graph(), mask, alpha, x);
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm > options.divergence_ratio * x0_norm) {
      t.diverged = true;
      t.diverged_at = i + 1;
      break;
    }
    if (options.store_states) t.states.push_back(x);
    t.error_norms.push_back((x - target.vector).norm());
  }
  return t;
}

StateVector mean_trajectory_prediction(const StateVector& x0, const SymmetricMatrixd& mean_w, int i) {
  if (i < 0) throw std::invalid_argument("mean_trajectory_prediction: negative step");
  if (x0.size() != mean_w.order()) throw std::invalid_argument("mean_trajectory_prediction: size mismatch");
  const auto n = x0.size();
  const auto target = consensus_target(x0);
  const Eigen::MatrixXd deflated = mean_w.matrix() - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  StateVector e = x0 - target.vector;
  for (int k = 0; k < i; ++k) e = deflated * e;
  return target.vector + e;
}

MeanOptimalAlpha optimal_alpha_mean(const Laplaciand& mean_l, double threshold) {
  const auto vals = symmetric_eigenvalues(mean_l.symmetric());
  if (vals.size() < 2 || vals(1) <= threshold) {
    throw NoConvergenceError("optimal_alpha_mean: mean graph is disconnected (lambda_2 <= threshold)");
  }
  const double l2 = vals(1);
  const double ln = vals(vals.size() - 1);
  const double ratio = l2 / ln;
  return {2.0 / (l2 + ln), (1.0 - ratio) / (1.0 + ratio)};
}

double alpha_mss(const Supergraph& g) {
  const int dmax = g.max_degree();
  if (dmax == 0) throw std::invalid_argument("alpha_mss: graph has no edges");
  return 1.0 / (2.0 * dmax);
}

bool mean_convergence_condition(const SymmetricMatrixd& mean_w) { return deflated_spectral_radius(mean_w) < 1.0; }

}  // namespace topocons
