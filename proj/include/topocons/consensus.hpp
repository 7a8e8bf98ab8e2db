#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "topocons/random_topology.hpp"
#include "topocons/spectral.hpp"

namespace topocons {

using StateVector = Eigen::VectorXd;

/// The average-consensus target: r = mean(x0) and x_avg = r 1.
struct ConsensusTarget {
  double average = 0.0;
  StateVector vector;
};

struct Trajectory {
  std::vector<StateVector> states;  // empty unless requested
  std::vector<double> error_norms;  // ||x(i) - x_avg||_2 for i = 0..iterations
  double initial_sum = 0.0;
  bool diverged = false;
  std::optional<int> diverged_at;
};

struct RunOptions {
  bool store_states = false;
  /// Divergence is flagged when ||x(i)|| exceeds this multiple of ||x(0)||.
  double divergence_ratio = 1e12;
};

/// W = I - alpha L.
SymmetricMatrixd weight_matrix(const Laplaciand& l, double alpha);

ConsensusTarget consensus_target(const StateVector& x0);

/// One iteration x <- x - alpha L(i) x over the active edges of a sample,
/// without forming W.
void consensus_step(const Supergraph& g, const std::vector<char>& active, double alpha, StateVector& x);

/// Runs `iters` steps of x(i+1) = W(i) x(i) with W(i) = I - alpha L(i) and
/// L(i) drawn i.i.d. from `p` using `rng` sequentially.
Trajectory run_consensus(const StateVector& x0, const EdgeProbabilityMatrix& p, double alpha, int iters,
                         SeededRng& rng, const RunOptions& options = {});

/// x_avg + (W_mean - J/N)^i (x0 - x_avg).
StateVector mean_trajectory_prediction(const StateVector& x0, const SymmetricMatrixd& mean_w, int i);

struct MeanOptimalAlpha {
  double alpha_star = 0.0;
  double rho_min = 0.0;
};

/// alpha* = 2 / (lambda_2 + lambda_N) and the resulting
/// rho_min = (1 - lambda_2/lambda_N) / (1 + lambda_2/lambda_N). Throws
/// NoConvergenceError when lambda_2 <= threshold.
MeanOptimalAlpha optimal_alpha_mean(const Laplaciand& mean_l, double threshold = kConnectivityThreshold);

/// 1 / (2 d_max).
double alpha_mss(const Supergraph& g);

/// rho(W_mean - J/N) < 1.
bool mean_convergence_condition(const SymmetricMatrixd& mean_w);

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace topocons
