#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "topocons/random_topology.hpp"
#include "topocons/spectral.hpp"

namespace topocons {

/// Per-link communication cost. Finite exactly on the realizable edges of
/// the supergraph; every other pair costs +infinity.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(Supergraph graph, Eigen::VectorXd costs);

  static CostMatrix uniform(Supergraph graph, double cost);
  static CostMatrix from_triples(int n, const std::vector<WeightedEdged>& triples);

  const Supergraph& graph() const { return graph_; }
  const Eigen::VectorXd& costs() const { return costs_; }
  int num_vertices() const { return graph_.num_vertices(); }
  std::size_t num_edges() const { return graph_.num_edges(); }

  double cost(int u, int v) const;

 private:
  Supergraph graph_;
  Eigen::VectorXd costs_;
};

/// Expected-cost budget U >= 0.
class Budget {
 public:
  explicit Budget(double u);
  double value() const { return u_; }

 private:
  double u_;
};

/// C_nl = eta * |x_n - x_l|^2 on realizable pairs.
CostMatrix geometric_cost_matrix(const std::vector<Eigen::Vector2d>& positions, const Supergraph& realizable,
                                 double eta);

/// Sum of C_nl over realizable edges: the per-iteration cost when every
/// realizable link is used.
double total_cost(const CostMatrix& c);

/// E[u] = sum_{n<l} C_nl P_nl (= -1/2 Tr(C mean_L)).
double expected_cost(const CostMatrix& c, const EdgeProbabilityMatrix& p);

/// Supergradient of P -> lambda_2(mean_L(P)) in edge order of p.graph():
/// g_nl = (v_n - v_l)^2 for the Fiedler vector v. When lambda_2 is repeated
/// (|lambda_2 - lambda_3| < multiplicity_tol * lambda_N) g is averaged over
/// an orthonormal basis of the eigenspace.
Eigen::VectorXd lambda2_supergradient(const EdgeProbabilityMatrix& p, double multiplicity_tol = 1e-8);

/// Euclidean projection of `raw` onto {0 <= p <= 1, costs . p <= u}, computed
/// as clip(raw - nu costs, 0, 1) with nu found by bisection.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& raw, const Eigen::VectorXd& costs, const Budget& u);
Eigen::VectorXd project_feasible(const Eigen::VectorXd& raw, const CostMatrix& c, const Budget& u);

/// max <g, p> over the same feasible set (fractional knapsack).
double max_linear_over_feasible(const Eigen::VectorXd& g, const Eigen::VectorXd& costs, double u);

struct ArcccOptions {
  int max_iterations = 5000;
  /// Relative tolerance on the optimality gap and on stall detection.
  double tol = 1e-6;
  int stall_window = 200;
  /// Diminishing step a / (k + b), used while no finite upper estimate exists.
  double step_a = 1.0;
  double step_b = 10.0;
  /// Optional warm start in edge order of the cost supergraph.
  std::optional<Eigen::VectorXd> initial;
};

struct ArcccResult {
  EdgeProbabilityMatrix probabilities;
  double lambda2 = 0.0;
  double expected_cost = 0.0;
  int iterations = 0;
  std::vector<double> history;  // objective at every iterate
  double upper_bound = std::numeric_limits<double>::infinity();
  bool converged = false;
  /// lambda_2 of the result is at or below the connectivity threshold.
  bool disconnected = false;
};

/// Maximizes lambda_2(mean_L) over P subject to the expected-cost budget by
/// projected supergradient ascent.
ArcccResult solve_arccc(const CostMatrix& c, const Budget& u, const ArcccOptions& opts = {});

struct PhiPoint {
  double budget = 0.0;
  double phi = 0.0;
  double expected_cost = 0.0;
  int iterations = 0;
};

/// phi(U) on an ascending budget list, each solve warm-started from the
/// previous solution.
std::vector<PhiPoint> phi_curve(const CostMatrix& c, const std::vector<double>& budgets,
                                const ArcccOptions& opts = {});

}  // namespace topocons
