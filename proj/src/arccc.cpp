#include "topocons/arccc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace topocons {

CostMatrix::CostMatrix(Supergraph graph, Eigen::VectorXd costs) : graph_(std::move(graph)), costs_(std::move(costs)) {
  if (static_cast<std::size_t>(costs_.size()) != graph_.num_edges()) {
    throw std::invalid_argument("CostMatrix: one cost per realizable edge required");
  }
  for (Eigen::Index k = 0; k < costs_.size(); ++k) {
    if (!(costs_(k) >= 0.0) || !std::isfinite(costs_(k))) {
      throw std::invalid_argument("CostMatrix: realizable edge costs must be finite and non-negative");
    }
  }
}

CostMatrix CostMatrix::uniform(Supergraph graph, double cost) {
  const auto m = static_cast<Eigen::Index>(graph.num_edges());
  return {std::move(graph), Eigen::VectorXd::Constant(m, cost)};
}

CostMatrix CostMatrix::from_triples(int n, const std::vector<WeightedEdged>& triples) {
  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& t : triples) edges.push_back({t.u, t.v});
  Supergraph g(n, edges);
  Eigen::VectorXd costs(static_cast<Eigen::Index>(g.num_edges()));
  for (const auto& t : triples) costs(static_cast<Eigen::Index>(*g.find({t.u, t.v}))) = t.weight;
  return {std::move(g), std::move(costs)};
}

double CostMatrix::cost(int u, int v) const {
  if (u == v) return 0.0;
  const auto k = graph_.find({u, v});
  return k ? costs_(static_cast<Eigen::Index>(*k)) : std::numeric_limits<double>::infinity();
}

Budget::Budget(double u) : u_(u) {
  if (!(u >= 0.0)) throw std::invalid_argument("Budget: must be non-negative");
}

CostMatrix geometric_cost_matrix(const std::vector<Eigen::Vector2d>& positions, const Supergraph& realizable,
                                 double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("geometric_cost_matrix: eta must be positive");
  if (static_cast<int>(positions.size()) != realizable.num_vertices()) {
    throw std::invalid_argument("geometric_cost_matrix: one position per vertex required");
  }
  Eigen::VectorXd costs(static_cast<Eigen::Index>(realizable.num_edges()));
  for (std::size_t k = 0; k < realizable.num_edges(); ++k) {
    const auto& e = realizable.edge(k);
    costs(static_cast<Eigen::Index>(k)) = eta * (positions[e.u] - positions[e.v]).squaredNorm();
  }
  return {realizable, std::move(costs)};
}

double total_cost(const CostMatrix& c) { return c.costs().sum(); }

double expected_cost(const CostMatrix& c, const EdgeProbabilityMatrix& p) {
  if (p.num_vertices() != c.num_vertices()) throw std::invalid_argument("expected_cost: vertex count mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.num_edges(); ++k) {
    const double pk = p.probs()(static_cast<Eigen::Index>(k));
    if (pk == 0.0) continue;
    const auto& e = p.graph().edge(k);
    const double ck = c.cost(e.u, e.v);
    if (!std::isfinite(ck)) {
      throw std::invalid_argument("expected_cost: positive probability on a link with infinite cost");
    }
    sum += ck * pk;
  }
  return sum;
}

namespace {

// Edge-wise (v_n - v_l)^2 averaged over the given eigenvector columns.
Eigen::VectorXd averaged_gradient(const Supergraph& g, const Eigen::MatrixXd& vecs, Eigen::Index first,
                                  Eigen::Index count) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_edges()));
  for (Eigen::Index j = first; j < first + count; ++j) {
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      const auto& e = g.edge(k);
      const double d = vecs(e.u, j) - vecs(e.v, j);
      grad(static_cast<Eigen::Index>(k)) += d * d;
    }
  }
  return grad / static_cast<double>(count);
}

// Sequential sum in edge order, the same arithmetic as expected_cost, so a
// projected point never reads as over budget there.
double cost_of(const Eigen::VectorXd& p, const Eigen::VectorXd& costs) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) != 0.0) sum += costs(k) * p(k);
  }
  return sum;
}

}  // namespace

Eigen::VectorXd lambda2_supergradient(const EdgeProbabilityMatrix& p, double multiplicity_tol) {
  const auto spec = symmetric_eigen(mean_laplacian(p).symmetric(), 0.0);
  const Eigen::Index n = spec.size();
  if (n < 2) throw std::invalid_argument("lambda2_supergradient: need at least two vertices");
  const double l2 = spec.eigenvalues(1);
  const double gap_tol = multiplicity_tol * std::max(spec.lambda_max(), 1e-300);
  Eigen::Index count = 1;
  while (1 + count < n && spec.eigenvalues(1 + count) - l2 < gap_tol) ++count;
  return averaged_gradient(p.graph(), spec.eigenvectors, 1, count);
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& raw, const Eigen::VectorXd& costs, const Budget& u) {
  if (raw.size() != costs.size()) throw std::invalid_argument("project_feasible: size mismatch");
  if (!costs.allFinite() || (costs.array() < 0.0).any()) {
    throw std::invalid_argument("project_feasible: costs must be finite and non-negative");
  }
  const double budget = u.value();
  const auto at = [&](double nu) -> Eigen::VectorXd {
    return (raw - nu * costs).cwiseMax(0.0).cwiseMin(1.0);
  };
  Eigen::VectorXd p = at(0.0);
  if (cost_of(p, costs) <= budget) return p;

  // Every positive-cost coordinate is zero once nu >= max raw_k / c_k.
  double hi = 0.0;
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    if (costs(k) > 0.0) hi = std::max(hi, raw(k) / costs(k));
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cost_of(at(mid), costs) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  p = at(hi);
  // Guard against the last ulp of rounding in the cost sum.
  for (int guard = 0; guard < 64; ++guard) {
    const double spent = cost_of(p, costs);
    if (spent <= budget) break;
    const double scale = guard == 0 ? budget / spent : std::nextafter(budget / spent, 0.0) * (1.0 - 1e-15 * guard);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (costs(k) > 0.0) p(k) *= std::max(0.0, scale);
    }
  }
  return p;
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& raw, const CostMatrix& c, const Budget& u) {
  return project_feasible(raw, c.costs(), u);
}

double max_linear_over_feasible(const Eigen::VectorXd& g, const Eigen::VectorXd& costs, double u) {
  double value = 0.0;
  std::vector<Eigen::Index> paid;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (g(k) <= 0.0) continue;
    if (costs(k) == 0.0) {
      value += g(k);
    } else {
      paid.push_back(k);
    }
  }
  std::sort(paid.begin(), paid.end(),
            [&](Eigen::Index a, Eigen::Index b) { return g(a) / costs(a) > g(b) / costs(b); });
  double left = u;
  for (Eigen::Index k : paid) {
    if (left <= 0.0) break;
    const double take = std::min(1.0, left / costs(k));
    value += take * g(k);
    left -= take * costs(k);
  }
  return value;
}

namespace {

struct Evaluation {
  double lambda2 = 0.0;
  double smoothed = 0.0;  // soft-min of the nonzero modes at temperature mu
  Eigen::VectorXd grad;   // gradient of the soft-min
  double upper = std::numeric_limits<double>::infinity();
};

// Objective, smoothed objective and an upper bound on the optimum at p.
//
// The soft-min f_mu = -mu log sum_{j>=2} exp(-lambda_j / mu) is concave in P
// with lambda_2 - mu log(N-1) <= f_mu <= lambda_2 and gradient
// sum_j w_j (v_jn - v_jl)^2 (softmax weights w). Concavity gives
// lambda_2(P') <= f_mu(P) + <grad, P' - P> + mu log(N-1) for feasible P', so
// maximizing the linear part over the feasible set certifies the optimum.
Evaluation evaluate(const Supergraph& g, const Eigen::VectorXd& p, const Eigen::VectorXd& costs, double u,
                    double mu) {
  const auto spec = symmetric_eigen(build_laplacian(g, p).symmetric(), 0.0);
  const Eigen::Index n = spec.size();
  Evaluation ev;
  ev.lambda2 = spec.eigenvalues(1);

  double z = 0.0;
  ev.grad = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index j = 1; j < n; ++j) {
    const double t = (spec.eigenvalues(j) - ev.lambda2) / mu;
    if (t > 60.0) break;
    const double w = std::exp(-t);
    z += w;
    ev.grad += w * averaged_gradient(g, spec.eigenvectors, j, 1);
  }
  ev.grad /= z;
  ev.smoothed = ev.lambda2 - mu * std::log(z);
  ev.upper = ev.smoothed + max_linear_over_feasible(ev.grad, costs, u) - ev.grad.dot(p) +
             mu * std::log(static_cast<double>(n - 1));
  return ev;
}

}  // namespace

ArcccResult solve_arccc(const CostMatrix& c, const Budget& u, const ArcccOptions& opts) {
  const auto& g = c.graph();
  const auto m = static_cast<Eigen::Index>(g.num_edges());
  if (m == 0) throw std::invalid_argument("solve_arccc: no realizable edges");
  if (g.num_vertices() < 2) throw std::invalid_argument("solve_arccc: need at least two vertices");
  const Eigen::VectorXd& costs = c.costs();
  const double budget = u.value();
  const double c_tot = total_cost(c);

  ArcccResult res;
  const auto finish = [&](const Eigen::VectorXd& p, double lambda2) {
    res.probabilities = EdgeProbabilityMatrix(g, p);
    res.lambda2 = lambda2;
    res.expected_cost = expected_cost(c, res.probabilities);
    res.disconnected = lambda2 <= kConnectivityThreshold;
    return res;
  };

  // lambda_2 is monotone in every P_nl, so using every link is optimal as
  // soon as it is affordable.
  if (c_tot <= budget) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    const double l2 = algebraic_connectivity(build_laplacian(g, ones));
    res.history.push_back(l2);
    res.upper_bound = l2;
    res.converged = true;
    return finish(ones, l2);
  }

  // Starting points: budget split in proportion to 1/C_nl, the uniformly
  // scaled full topology (U/C_tot) 1, and an optional warm start.
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd split(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      split(k) = costs(k) > 0.0 ? std::min(1.0, budget / (static_cast<double>(m) * costs(k))) : 1.0;
    }
    starts.push_back(project_feasible(split, costs, u));
    starts.push_back(project_feasible(Eigen::VectorXd::Constant(m, c_tot > 0.0 ? budget / c_tot : 1.0), costs, u));
    if (opts.initial) {
      if (opts.initial->size() != m) throw std::invalid_argument("solve_arccc: warm start size mismatch");
      starts.push_back(project_feasible(*opts.initial, costs, u));
    }
  }

  const double lambda_full = algebraic_connectivity(build_laplacian(g, Eigen::VectorXd::Ones(m)));
  const double log_modes = std::log(static_cast<double>(std::max(2, g.num_vertices() - 1)));
  double mu = 0.05 * std::max(lambda_full, 1e-12);

  Eigen::VectorXd p;
  Evaluation ev;
  ev.lambda2 = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    auto e = evaluate(g, s, costs, budget, mu);
    if (e.lambda2 > ev.lambda2) {
      ev = std::move(e);
      p = s;
    }
  }

  Eigen::VectorXd best_p = p;
  double best = ev.lambda2;
  double upper = ev.upper;
  res.history.push_back(ev.lambda2);
  const auto record = [&](const Eigen::VectorXd& x, const Evaluation& e) {
    res.history.push_back(e.lambda2);
    upper = std::min(upper, e.upper);
    if (e.lambda2 > best) {
      best = e.lambda2;
      best_p = x;
    }
  };
  const auto target = [&] { return opts.tol * std::max(std::abs(best), 1e-12); };

  // Accelerated projected gradient ascent on the soft-min, with adaptive
  // restart and backtracking on the Lipschitz estimate. mu shrinks by 10x per
  // stage until the smoothing error mu log(N-1) is below the target gap.
  int evals = 0;
  int since_improvement = 0;
  double lip = 4.0 / mu;
  while (evals < opts.max_iterations) {
    if (upper - best <= target()) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd y = p;
    Evaluation ev_y = ev;
    Eigen::VectorXd x_prev = p;
    double t = 1.0;
    const double stage_target = mu;
    const int stage_start = evals;
    while (evals < opts.max_iterations) {
      Eigen::VectorXd x_new;
      Evaluation ev_new;
      for (;;) {
        x_new = project_feasible(y + ev_y.grad / lip, costs, u);
        ev_new = evaluate(g, x_new, costs, budget, mu);
        ++evals;
        const Eigen::VectorXd d = x_new - y;
        if (ev_new.smoothed >= ev_y.smoothed + ev_y.grad.dot(d) - 0.5 * lip * d.squaredNorm() - 1e-15 ||
            evals >= opts.max_iterations) {
          break;
        }
        lip *= 2.0;
      }
      const double before = best;
      record(x_new, ev_new);
      since_improvement = best > before + target() ? 0 : since_improvement + 1;

      if (ev_new.smoothed < ev.smoothed) {
        // Restart momentum from the last accepted point.
        t = 1.0;
        y = p;
        ev_y = ev;
        lip *= 1.5;
        continue;
      }
      const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      x_prev = p;
      p = x_new;
      ev = ev_new;
      y = project_feasible(p + ((t - 1.0) / t_new) * (p - x_prev), costs, u);
      t = t_new;
      ev_y = evaluate(g, y, costs, budget, mu);
      ++evals;
      lip *= 0.95;

      const double smooth_gap = ev.upper - mu * log_modes - ev.smoothed;
      if (smooth_gap <= stage_target || upper - best <= target()) break;
      if (since_improvement > opts.stall_window && evals - stage_start > opts.stall_window) break;
    }
    if (mu * log_modes <= 0.5 * target() && since_improvement > opts.stall_window) break;
    mu = std::max(mu / 10.0, 0.25 * target() / log_modes);
    lip *= 10.0;
    ev = evaluate(g, p, costs, budget, mu);
    ++evals;
    record(p, ev);
  }
  res.iterations = evals;
  res.upper_bound = upper;
  return finish(best_p, algebraic_connectivity(build_laplacian(g, best_p)));
}

std::vector<PhiPoint> phi_curve(const CostMatrix& c, const std::vector<double>& budgets, const ArcccOptions& opts) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw std::invalid_argument("phi_curve: budgets must be sorted ascending");
  }
  std::vector<PhiPoint> out;
  out.reserve(budgets.size());
  ArcccOptions local = opts;
  for (double b : budgets) {
    const auto r = solve_arccc(c, Budget(b), local);
    out.push_back({b, r.lambda2, r.expected_cost, r.iterations});
    local.initial = r.probabilities.probs();
  }
  return out;
}

}  // namespace topocons
