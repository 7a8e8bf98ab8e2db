#include "topocons/cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "topocons/arccc.hpp"
#include "topocons/consensus.hpp"
#include "topocons/convergence.hpp"
#include "topocons/io.hpp"
#include "topocons/parallel.hpp"
#include "topocons/scenario.hpp"

namespace topocons {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  int threads = 1;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig load_config(const GlobalOptions& g) {
  ScenarioConfig c;
  if (!g.config_path.empty()) {
    json doc;
    try {
      doc = read_json_file(g.config_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    c = config_from_json(doc);
  }
  if (g.seed) c.seed = *g.seed;
  if (g.samples) c.mc_samples = *g.samples;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
  if (g.out_path.empty()) {
    out << text;
  } else {
    write_text_file(g.out_path, text);
  }
}

// Summaries go to stdout when the main output is a file, otherwise to stderr.
std::ostream& summary_stream(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  return g.out_path.empty() ? err : out;
}

EdgeProbabilityMatrix load_probabilities(const std::string& path) {
  try {
    return probabilities_from_edge_map(read_json_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--p: ") + e.what());
  }
}

CostMatrix load_costs(const std::string& path) {
  try {
    return costs_from_edge_map(read_json_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--cost: ") + e.what());
  }
}

double default_budget(const ScenarioConfig& c, const CostMatrix& costs) {
  return c.budgets.empty() ? 0.5 * total_cost(costs) : c.budgets.front();
}

StateVector initial_state(const ScenarioConfig& c, int n) {
  auto rng = SeededRng(c.seed).substream(0x5eed);
  StateVector x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.normal();
  return x;
}

int cmd_optimize(const GlobalOptions& g, const std::string& cost_path, std::optional<double> budget,
                 const std::string& phi_path, std::ostream& out, std::ostream& err) {
  const auto config = load_config(g);
  const CostMatrix costs = cost_path.empty() ? build_scenario(config).costs : load_costs(cost_path);
  const double u = budget ? *budget : default_budget(config, costs);
  if (u < 0.0) throw ConfigError("--budget must be non-negative");
  const auto r = solve_arccc(costs, Budget(u));
  emit(g, out, to_edge_map(r.probabilities).dump(2) + "\n");

  if (!phi_path.empty()) {
    write_text_file(phi_path, phi_csv(phi_curve(costs, scenario_budgets(config, costs))));
  }
  json summary = {{"budget", u},
                  {"total_cost", total_cost(costs)},
                  {"lambda2", r.lambda2},
                  {"upper_bound", r.upper_bound},
                  {"expected_cost", r.expected_cost},
                  {"iterations", r.iterations},
                  {"converged", r.converged},
                  {"disconnected", r.disconnected}};
  summary_stream(g, out, err) << summary.dump() << "\n";
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& g, const std::string& p_path, std::optional<double> alpha_opt,
                 std::optional<int> iters_opt, bool states, std::ostream& out, std::ostream& err) {
  const auto config = load_config(g);
  EdgeProbabilityMatrix p;
  if (p_path.empty()) {
    const auto costs = build_scenario(config).costs;
    p = solve_arccc(costs, Budget(default_budget(config, costs))).probabilities;
  } else {
    p = load_probabilities(p_path);
  }
  const int iters = iters_opt.value_or(config.iters);
  if (iters < 0) throw ConfigError("--iters must be non-negative");
  double alpha = 0.0;
  if (alpha_opt) {
    alpha = *alpha_opt;
  } else if (config.alpha) {
    alpha = *config.alpha;
  } else {
    alpha = alpha_mss(p.graph());
  }

  const double lambda2_mean = algebraic_connectivity(mean_laplacian(p));
  const bool connected = lambda2_mean > kConnectivityThreshold;
  SeededRng rng(config.seed, 1);
  const auto x0 = initial_state(config, p.num_vertices());
  RunOptions ro;
  ro.store_states = states;
  const auto t = run_consensus(x0, p, alpha, iters, rng, ro);
  emit(g, out, trajectory_csv(t));

  const double final_ratio = t.error_norms.front() > 0.0 ? t.error_norms.back() / t.error_norms.front() : 0.0;
  json summary = {{"alpha", alpha},
                  {"iters", iters},
                  {"seed", config.seed},
                  {"initial_state", "seeded standard normal"},
                  {"lambda2_mean_laplacian", lambda2_mean},
                  {"mean_graph_connected", connected},
                  {"converges", connected && !t.diverged},
                  {"diverged", t.diverged},
                  {"final_error_ratio", final_ratio}};
  if (!connected) summary["warning"] = "mean graph is disconnected: consensus cannot be reached for any alpha";
  summary_stream(g, out, err) << summary.dump() << "\n";
  return kExitOk;
}

int cmd_analyze(const GlobalOptions& g, const std::string& p_path, std::optional<double> alpha_opt,
                std::ostream& out, std::ostream& err) {
  const auto config = load_config(g);
  EdgeProbabilityMatrix p;
  if (p_path.empty()) {
    const auto costs = build_scenario(config).costs;
    p = solve_arccc(costs, Budget(default_budget(config, costs))).probabilities;
  } else {
    p = load_probabilities(p_path);
  }
  const SeededRng rng(config.seed, 2);
  const auto samples = sample_spectra(p, config.mc_samples, rng);
  const auto mean_l = mean_laplacian(p);
  const double l2 = algebraic_connectivity(mean_l);

  json records = json::array();
  json summary = {{"lambda2_mean_laplacian", l2}, {"seed", config.seed}, {"n_samples", config.mc_samples}};
  const auto add = [&](const std::string& name, double alpha) {
    auto rec = estimate_record(alpha, samples.factor(alpha), config.seed);
    rec["label"] = name;
    records.push_back(std::move(rec));
  };
  const double a_mss = alpha_mss(p.graph());
  add("alpha_mss", a_mss);
  if (alpha_opt) add("alpha_user", *alpha_opt);
  const auto el2 = summarize(samples.lambda2);
  summary["expected_lambda2"] = el2.mean;
  summary["expected_lambda2_stderr"] = el2.std_error;
  const double bound_factor = std::max(0.0, 1.0 - a_mss * el2.mean);
  summary["gain_lower_bound"] = convergence_gain(bound_factor).value;

  if (l2 > kConnectivityThreshold) {
    const auto mean_opt = optimal_alpha_mean(mean_l);
    add("alpha_mean_optimal", mean_opt.alpha_star);
    summary["rho_min_mean"] = mean_opt.rho_min;
    const auto search = optimize_alpha(samples, mean_l, config.alpha_tol);
    add("alpha_mss_optimal", search.alpha_star);
    summary["converges"] = true;
  } else {
    summary["converges"] = false;
    summary["warning"] = "mean graph is disconnected: no alpha gives mss convergence";
  }
  json doc = {{"estimates", records}, {"summary", summary}};
  emit(g, out, doc.dump(2) + "\n");
  (void)err;
  return kExitOk;
}

int cmd_compare(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto config = load_config(g);
  const auto rows = run_arccc_vs_frc(config);
  emit(g, out, comparison_csv(rows));
  summary_stream(g, out, err) << json{{"rows", rows.size()}, {"seed", config.seed}}.dump() << "\n";
  return kExitOk;
}

int cmd_er_study(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const auto config = load_config(g);
  const auto rows = run_er_study(config);
  emit(g, out, er_study_csv(rows));
  std::vector<double> l2;
  std::vector<double> el2;
  std::vector<double> gain;
  std::size_t jensen_ok = 0;
  for (const auto& r : rows) {
    l2.push_back(r.lambda2_mean_laplacian);
    el2.push_back(r.expected_lambda2);
    gain.push_back(r.gain);
    if (r.expected_lambda2 <= r.lambda2_mean_laplacian + 3.0 * r.expected_lambda2_stderr + 1e-12) ++jensen_ok;
  }
  json summary = {{"rows", rows.size()}, {"seed", config.seed}, {"jensen_rows_ok", jensen_ok}};
  if (rows.size() >= 2) {
    summary["spearman_lambda2_mean_vs_gain"] = spearman(l2, gain);
    summary["spearman_expected_lambda2_vs_gain"] = spearman(el2, gain);
  }
  summary_stream(g, out, err) << summary.dump() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized consensus topology design and analysis", "topocons"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  int samples = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Root random seed");
  app.add_option("--config", g.config_path, "Scenario config (JSON)");
  app.add_option("--out", g.out_path, "Output file (default: stdout)");
  auto* samples_opt = app.add_option("--samples", samples, "Monte Carlo samples per estimate")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  std::string cost_path;
  std::string phi_path;
  std::string p_path;
  double budget = 0.0;
  double alpha = 0.0;
  int iters = 0;
  bool states = false;

  auto* optimize = app.add_subcommand("optimize", "Solve ARCCC and write P* as an edge map");
  optimize->add_option("--cost", cost_path, "Cost edge map (default: generated scenario)");
  auto* budget_opt = optimize->add_option("--budget", budget, "Expected cost budget U");
  optimize->add_option("--phi", phi_path, "Also write phi(U) over the config budgets to this CSV");

  auto* simulate = app.add_subcommand("simulate", "Run a consensus trajectory and write it as CSV");
  simulate->add_option("--p", p_path, "Probability edge map (default: ARCCC solution of the scenario)");
  auto* sim_alpha = simulate->add_option("--alpha", alpha, "Link weight (default: alpha_mss)");
  auto* sim_iters = simulate->add_option("--iters", iters, "Iterations (default: config iters)");
  simulate->add_flag("--states", states, "Include the state vector columns");

  auto* analyze = app.add_subcommand("analyze", "Estimate convergence factors and gains");
  analyze->add_option("--p", p_path, "Probability edge map (default: ARCCC solution of the scenario)");
  auto* an_alpha = analyze->add_option("--alpha", alpha, "Extra alpha to evaluate");

  auto* compare = app.add_subcommand("compare", "ARCCC versus fixed-radius topologies (CSV)");
  auto* er = app.add_subcommand("er-study", "Random-graph study of gain versus lambda_2 (CSV)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (seed_opt->count()) g.seed = seed;
  if (samples_opt->count()) g.samples = samples;
  set_thread_count(g.threads);

  try {
    if (optimize->parsed()) {
      return cmd_optimize(g, cost_path, budget_opt->count() ? std::optional<double>(budget) : std::nullopt, phi_path,
                          out, err);
    }
    if (simulate->parsed()) {
      return cmd_simulate(g, p_path, sim_alpha->count() ? std::optional<double>(alpha) : std::nullopt,
                          sim_iters->count() ? std::optional<int>(iters) : std::nullopt, states, out, err);
    }
    if (analyze->parsed()) {
      return cmd_analyze(g, p_path, an_alpha->count() ? std::optional<double>(alpha) : std::nullopt, out, err);
    }
    if (compare->parsed()) return cmd_compare(g, out, err);
    if (er->parsed()) return cmd_er_study(g, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NoConvergenceError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace topocons
