#include "topocons/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "topocons/parallel.hpp"

namespace topocons {

namespace {

// Stream layout under the root seed.
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kRealizableStream = 2;
constexpr std::uint64_t kBudgetStream = 3;
constexpr std::uint64_t kRadiusStream = 4;
constexpr std::uint64_t kMatchedStream = 5;
constexpr std::uint64_t kErStream = 6;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_sensors >= 2, "n_sensors must be >= 2");
  require(grid_side > 0.0, "grid_side must be positive");
  require(eta > 0.0, "eta must be positive");
  const long long max_edges = static_cast<long long>(n_sensors) * (n_sensors - 1) / 2;
  require(n_realizable_edges >= 0 && n_realizable_edges <= max_edges,
          "n_realizable_edges must lie in [0, n_sensors (n_sensors - 1) / 2]");
  for (double b : budgets) require(b >= 0.0, "budgets must be non-negative");
  for (double f : budget_fractions) require(f >= 0.0, "budget_fractions must be non-negative");
  require(mc_samples >= 2, "mc_samples must be >= 2");
  require(iters >= 1, "iters must be >= 1");
  for (double r : baseline_radii) require(r > 0.0, "baseline_radii must be positive");
  if (alpha) require(std::isfinite(*alpha) && *alpha > 0.0, "alpha must be positive");
  require(alpha_tol > 0.0 && alpha_tol < 1.0, "alpha_tol must lie in (0, 1)");
  require(er_vertices >= 2, "er_vertices must be >= 2");
  require(!er_avg_degrees.empty(), "er_avg_degrees must not be empty");
  for (int d : er_avg_degrees) {
    require(d >= 1 && static_cast<long long>(d) * er_vertices / 2 <=
                          static_cast<long long>(er_vertices) * (er_vertices - 1) / 2,
            "er_avg_degrees entries must give between 1 and N(N-1)/2 edges");
  }
  require(er_graphs >= 1, "er_graphs must be >= 1");
  require(er_p_draws >= 1, "er_p_draws must be >= 1");
}

int ScenarioConfig::realizable_edge_count() const {
  if (n_realizable_edges > 0) return n_realizable_edges;
  const long long max_edges = static_cast<long long>(n_sensors) * (n_sensors - 1) / 2;
  return static_cast<int>(std::min<long long>(9LL * n_sensors, max_edges));
}

std::vector<Eigen::Vector2d> grid_placement(int n, double side, SeededRng& rng) {
  if (n < 2) throw std::invalid_argument("grid_placement: n must be >= 2");
  std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    const double x = side * rng.uniform();
    const double y = side * rng.uniform();
    p = {x, y};
  }
  return pts;
}

Supergraph random_realizable_set(int n, int m, SeededRng& rng) {
  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  if (m < 0 || m > total) throw std::invalid_argument("random_realizable_set: m exceeds n(n-1)/2");
  // Partial Fisher-Yates over the lexicographic pair list.
  std::vector<Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(total));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
  }
  for (int i = 0; i < m; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(total - i));
    std::swap(pairs[static_cast<std::size_t>(i)], pairs[j]);
  }
  pairs.resize(static_cast<std::size_t>(m));
  return {n, std::move(pairs)};
}

EdgeProbabilityMatrix frc_topology(const std::vector<Eigen::Vector2d>& positions, double radius,
                                   const Supergraph& realizable) {
  if (!(radius > 0.0)) throw std::invalid_argument("frc_topology: radius must be positive");
  Eigen::VectorXd probs(static_cast<Eigen::Index>(realizable.num_edges()));
  for (std::size_t k = 0; k < realizable.num_edges(); ++k) {
    const auto& e = realizable.edge(k);
    probs(static_cast<Eigen::Index>(k)) = (positions[e.u] - positions[e.v]).norm() <= radius ? 1.0 : 0.0;
  }
  return {realizable, std::move(probs)};
}

SensorScenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  const SeededRng root(config.seed);
  SensorScenario s;
  auto placement = root.substream(kPlacementStream);
  s.positions = grid_placement(config.n_sensors, config.grid_side, placement);

  const auto realizable_root = root.substream(kRealizableStream);
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 1000) {
      throw std::invalid_argument("config: no connected realizable set found; raise n_realizable_edges");
    }
    auto rng = realizable_root.substream(attempt);
    s.realizable = random_realizable_set(config.n_sensors, config.realizable_edge_count(), rng);
    if (is_connected(s.realizable)) break;
  }
  s.costs = geometric_cost_matrix(s.positions, s.realizable, config.eta);
  return s;
}

std::vector<double> scenario_budgets(const ScenarioConfig& config, const CostMatrix& costs) {
  std::vector<double> out = config.budgets;
  if (out.empty()) {
    const double c_tot = total_cost(costs);
    for (double f : config.budget_fractions) out.push_back(f * c_tot);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> scenario_radii(const ScenarioConfig& config, const SensorScenario& scenario) {
  std::vector<double> out = config.baseline_radii;
  if (out.empty()) {
    double longest = 0.0;
    for (const auto& e : scenario.realizable.edges()) {
      longest = std::max(longest, (scenario.positions[e.u] - scenario.positions[e.v]).norm());
    }
    for (double f : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) out.push_back(f * longest);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GainSummary gain_at_optimal_alpha(const EdgeProbabilityMatrix& p, int n_samples, double tol, const SeededRng& rng) {
  GainSummary s;
  const auto mean_l = mean_laplacian(p);
  s.lambda2_mean = algebraic_connectivity(mean_l);
  if (s.lambda2_mean <= kConnectivityThreshold) {
    s.flag = "disconnected";
    s.alpha_star = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  const auto search = optimize_alpha(sample_spectra(p, n_samples, rng), mean_l, tol);
  s.alpha_star = search.alpha_star;
  s.factor = search.factor.mean;
  s.factor_stderr = search.factor.std_error;
  const auto g = convergence_gain(s.factor);
  s.gain = g.value;
  if (g.exact_consensus) {
    s.flag = "exact_consensus";
  } else {
    // Delta method: d(-ln C) = dC / C.
    s.gain_stderr = s.factor_stderr / s.factor;
  }
  return s;
}

std::vector<ComparisonRow> run_arccc_vs_frc(const ScenarioConfig& config, const ArcccOptions& opts) {
  const auto scenario = build_scenario(config);
  const SeededRng root(config.seed);
  const auto budgets = scenario_budgets(config, scenario.costs);
  const auto radii = scenario_radii(config, scenario);

  const auto arccc_row = [&](double budget, const SeededRng& rng) {
    const auto r = solve_arccc(scenario.costs, Budget(budget), opts);
    const auto s = gain_at_optimal_alpha(r.probabilities, config.mc_samples, config.alpha_tol, rng);
    ComparisonRow row;
    row.label = "arccc";
    row.budget_or_radius = budget;
    row.expected_cost = r.expected_cost;
    row.lambda2_mean_laplacian = r.lambda2;
    row.alpha_star = s.alpha_star;
    row.gain_sg = s.gain;
    row.gain_stderr = s.gain_stderr;
    row.flag = s.flag;
    return row;
  };

  // Every task has its own rng stream, so rows can be computed in parallel.
  const std::size_t n_tasks = budgets.size() + 2 * radii.size();
  std::vector<ComparisonRow> rows(n_tasks);
  std::vector<double> frc_costs(radii.size());
  std::vector<EdgeProbabilityMatrix> frc(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    frc[i] = frc_topology(scenario.positions, radii[i], scenario.realizable);
    frc_costs[i] = expected_cost(scenario.costs, frc[i]);
  }
  parallel_for(n_tasks, [&](std::size_t t) {
    if (t < budgets.size()) {
      rows[t] = arccc_row(budgets[t], root.substream(kBudgetStream).substream(t));
      return;
    }
    const std::size_t i = (t - budgets.size()) / 2;
    const bool is_frc = (t - budgets.size()) % 2 == 0;
    if (is_frc) {
      const auto s = gain_at_optimal_alpha(frc[i], config.mc_samples, config.alpha_tol,
                                           root.substream(kRadiusStream).substream(i));
      ComparisonRow row;
      row.label = "frc";
      row.budget_or_radius = radii[i];
      row.expected_cost = frc_costs[i];
      row.lambda2_mean_laplacian = s.lambda2_mean;
      row.alpha_star = s.alpha_star;
      row.gain_sg = s.gain;
      row.gain_stderr = s.gain_stderr;
      row.flag = s.flag;
      rows[t] = row;
    } else {
      auto row = arccc_row(frc_costs[i], root.substream(kMatchedStream).substream(i));
      row.matched_radius = radii[i];
      rows[t] = row;
    }
  });
  return rows;
}

std::vector<ErStudyRow> run_er_study(const ScenarioConfig& config) {
  config.validate();
  const SeededRng root = SeededRng(config.seed).substream(kErStream);
  const int n = config.er_vertices;

  struct Task {
    int degree_index;
    int graph;
    int draw;
  };
  std::vector<Task> tasks;
  for (int d = 0; d < static_cast<int>(config.er_avg_degrees.size()); ++d) {
    for (int g = 0; g < config.er_graphs; ++g) {
      for (int k = 0; k < config.er_p_draws; ++k) tasks.push_back({d, g, k});
    }
  }

  std::vector<ErStudyRow> rows(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto& task = tasks[t];
    const int d_avg = config.er_avg_degrees[static_cast<std::size_t>(task.degree_index)];
    const auto graph_rng = root.substream(static_cast<std::uint64_t>(task.degree_index)).substream(
        static_cast<std::uint64_t>(task.graph));
    auto edge_rng = graph_rng.substream(0);
    const int m = d_avg * n / 2;
    const auto g = random_realizable_set(n, m, edge_rng);
    auto p_rng = graph_rng.substream(1 + static_cast<std::uint64_t>(task.draw));
    Eigen::VectorXd probs(static_cast<Eigen::Index>(g.num_edges()));
    for (Eigen::Index k = 0; k < probs.size(); ++k) probs(k) = p_rng.uniform();
    const EdgeProbabilityMatrix p(g, probs);

    const auto mc = graph_rng.substream(1000 + static_cast<std::uint64_t>(task.draw));
    const auto samples = sample_spectra(p, config.mc_samples, mc);
    const auto mean_l = mean_laplacian(p);
    ErStudyRow row;
    row.avg_degree = d_avg;
    row.graph = task.graph;
    row.draw = task.draw;
    row.n_edges = m;
    row.lambda2_mean_laplacian = algebraic_connectivity(mean_l);
    const auto el2 = summarize(samples.lambda2);
    row.expected_lambda2 = el2.mean;
    row.expected_lambda2_stderr = el2.std_error;
    if (row.lambda2_mean_laplacian <= kConnectivityThreshold) {
      row.flag = "disconnected";
      row.alpha_star = std::numeric_limits<double>::quiet_NaN();
    } else {
      const auto search = optimize_alpha(samples, mean_l, config.alpha_tol);
      row.alpha_star = search.alpha_star;
      row.factor = search.factor.mean;
      row.factor_stderr = search.factor.std_error;
      const auto gain = convergence_gain(row.factor);
      row.gain = gain.value;
      if (gain.exact_consensus) row.flag = "exact_consensus";
    }
    rows[t] = row;
  });
  return rows;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace topocons
