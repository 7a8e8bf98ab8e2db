#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topocons/arccc.hpp"
#include "topocons/convergence.hpp"
#include "topocons/random_topology.hpp"

namespace topocons {

/// Parameters shared by the experiment subcommands. Defaults are the desk
/// scale; the sensor-network study at N = 80 is reached through a config file.
struct ScenarioConfig {
  int n_sensors = 30;
  double grid_side = 25.0;
  double eta = 1.0;
  /// 0 picks 9 * n_sensors, capped at the complete graph.
  int n_realizable_edges = 0;
  /// Absolute budgets. When empty, budget_fractions * C_tot is used.
  std::vector<double> budgets;
  std::vector<double> budget_fractions = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
  int mc_samples = kDefaultMcSamples;
  int iters = 200;
  std::uint64_t seed = 1;
  /// FRC radii. When empty, fractions 0.3..1.0 of the longest realizable link.
  std::vector<double> baseline_radii;
  std::optional<double> alpha;  // simulate: defaults to alpha_mss
  double alpha_tol = 1e-3;
  // Random-graph study.
  int er_vertices = 50;
  std::vector<int> er_avg_degrees = {10, 15, 20, 25, 30, 35, 40};
  int er_graphs = 8;
  int er_p_draws = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  int realizable_edge_count() const;
};

/// n points i.i.d. uniform on [0, side]^2.
std::vector<Eigen::Vector2d> grid_placement(int n, double side, SeededRng& rng);

/// Uniform sample of m distinct unordered pairs out of all n(n-1)/2.
Supergraph random_realizable_set(int n, int m, SeededRng& rng);

/// Fixed-radius baseline: P_nl = 1 on realizable pairs no farther apart than
/// `radius`, 0 elsewhere.
EdgeProbabilityMatrix frc_topology(const std::vector<Eigen::Vector2d>& positions, double radius,
                                   const Supergraph& realizable);

/// Sensors, realizable links and their geometric costs.
struct SensorScenario {
  std::vector<Eigen::Vector2d> positions;
  Supergraph realizable;
  CostMatrix costs;
};

/// Deterministic in config.seed. The realizable set is redrawn until it is
/// connected.
SensorScenario build_scenario(const ScenarioConfig& config);

/// Resolved budget list (absolute values, ascending).
std::vector<double> scenario_budgets(const ScenarioConfig& config, const CostMatrix& costs);
/// Resolved FRC radius list (ascending).
std::vector<double> scenario_radii(const ScenarioConfig& config, const SensorScenario& scenario);

/// Gain of P at its optimized alpha, with flags for the degenerate cases.
struct GainSummary {
  double lambda2_mean = 0.0;
  double alpha_star = 0.0;
  double factor = 1.0;
  double factor_stderr = 0.0;
  double gain = 0.0;
  double gain_stderr = 0.0;
  std::string flag = "ok";  // ok | disconnected | exact_consensus
};

GainSummary gain_at_optimal_alpha(const EdgeProbabilityMatrix& p, int n_samples, double tol, const SeededRng& rng);

struct ComparisonRow {
  std::string label;  // arccc | frc
  double budget_or_radius = 0.0;
  double expected_cost = 0.0;
  double lambda2_mean_laplacian = 0.0;
  double alpha_star = 0.0;
  double gain_sg = 0.0;
  double gain_stderr = 0.0;
  std::string flag = "ok";
  /// For ARCCC rows solved at an FRC cost: that FRC radius.
  std::optional<double> matched_radius;
};

/// ARCCC on every configured budget, then for every FRC radius the FRC row
/// followed by an ARCCC row solved with the FRC per-iteration cost as budget.
std::vector<ComparisonRow> run_arccc_vs_frc(const ScenarioConfig& config, const ArcccOptions& opts = {});

struct ErStudyRow {
  int avg_degree = 0;
  int graph = 0;
  int draw = 0;
  int n_edges = 0;
  double lambda2_mean_laplacian = 0.0;
  double expected_lambda2 = 0.0;
  double expected_lambda2_stderr = 0.0;
  double alpha_star = 0.0;
  double factor = 1.0;
  double factor_stderr = 0.0;
  double gain = 0.0;
  std::string flag = "ok";
};

/// Random graphs with M = d_avg N / 2 edges, P_nl ~ U(0, 1) per edge, and
/// Monte Carlo statistics for each draw.
std::vector<ErStudyRow> run_er_study(const ScenarioConfig& config);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace topocons
