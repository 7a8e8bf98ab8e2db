#include "topocons/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace topocons {

using nlohmann::json;

namespace {

std::vector<WeightedEdged> parse_edges(const json& doc, int& n, const char* what) {
  if (!doc.is_object()) throw std::invalid_argument(std::string(what) + ": document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "edges") throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw std::invalid_argument(std::string(what) + ": 'n' must be an integer");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw std::invalid_argument(std::string(what) + ": 'edges' must be an array");
  }
  n = doc["n"].get<int>();
  if (n < 1) throw std::invalid_argument(std::string(what) + ": 'n' must be positive");
  std::vector<WeightedEdged> out;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
        !e[2].is_number()) {
      throw std::invalid_argument(std::string(what) + ": each edge must be [n, l, value]");
    }
    const int u = e[0].get<int>();
    const int v = e[1].get<int>();
    if (u < 1 || u > n || v < 1 || v > n) {
      throw std::invalid_argument(std::string(what) + ": vertex out of range 1..n");
    }
    out.push_back({u - 1, v - 1, e[2].get<double>()});
  }
  return out;
}

json edge_map(const Supergraph& g, const Eigen::VectorXd& values) {
  json edges = json::array();
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    edges.push_back({g.edge(k).u + 1, g.edge(k).v + 1, values(static_cast<Eigen::Index>(k))});
  }
  return {{"n", g.num_vertices()}, {"edges", std::move(edges)}};
}

}  // namespace

json to_edge_map(const EdgeProbabilityMatrix& p) { return edge_map(p.graph(), p.probs()); }
json to_edge_map(const CostMatrix& c) { return edge_map(c.graph(), c.costs()); }

EdgeProbabilityMatrix probabilities_from_edge_map(const json& doc) {
  int n = 0;
  const auto edges = parse_edges(doc, n, "probability edge map");
  return EdgeProbabilityMatrix::from_triples(n, edges);
}

CostMatrix costs_from_edge_map(const json& doc) {
  int n = 0;
  const auto edges = parse_edges(doc, n, "cost edge map");
  return CostMatrix::from_triples(n, edges);
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key);

template <>
int get_as<int>(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  return v.get<int>();
}

template <>
double get_as<double>(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return v.get<double>();
}

template <>
std::uint64_t get_as<std::uint64_t>(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw ConfigError("config: '" + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

template <typename T>
std::vector<T> get_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array");
  std::vector<T> out;
  for (const auto& x : v) out.push_back(get_as<T>(x, key));
  return out;
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  ScenarioConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "n_sensors") {
      c.n_sensors = get_as<int>(v, key);
    } else if (key == "grid_side") {
      c.grid_side = get_as<double>(v, key);
    } else if (key == "eta") {
      c.eta = get_as<double>(v, key);
    } else if (key == "n_realizable_edges") {
      c.n_realizable_edges = get_as<int>(v, key);
    } else if (key == "budgets") {
      c.budgets = get_list<double>(v, key);
    } else if (key == "budget_fractions") {
      c.budget_fractions = get_list<double>(v, key);
    } else if (key == "mc_samples") {
      c.mc_samples = get_as<int>(v, key);
    } else if (key == "iters") {
      c.iters = get_as<int>(v, key);
    } else if (key == "seed") {
      c.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "baseline_radii") {
      c.baseline_radii = get_list<double>(v, key);
    } else if (key == "alpha") {
      if (!v.is_null()) c.alpha = get_as<double>(v, key);
    } else if (key == "alpha_tol") {
      c.alpha_tol = get_as<double>(v, key);
    } else if (key == "er_vertices") {
      c.er_vertices = get_as<int>(v, key);
    } else if (key == "er_avg_degrees") {
      c.er_avg_degrees = get_list<int>(v, key);
    } else if (key == "er_graphs") {
      c.er_graphs = get_as<int>(v, key);
    } else if (key == "er_p_draws") {
      c.er_p_draws = get_as<int>(v, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json doc = {{"n_sensors", c.n_sensors},
              {"grid_side", c.grid_side},
              {"eta", c.eta},
              {"n_realizable_edges", c.n_realizable_edges},
              {"budgets", c.budgets},
              {"budget_fractions", c.budget_fractions},
              {"mc_samples", c.mc_samples},
              {"iters", c.iters},
              {"seed", c.seed},
              {"baseline_radii", c.baseline_radii},
              {"alpha_tol", c.alpha_tol},
              {"er_vertices", c.er_vertices},
              {"er_avg_degrees", c.er_avg_degrees},
              {"er_graphs", c.er_graphs},
              {"er_p_draws", c.er_p_draws}};
  doc["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  return doc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double x) {
  rows_.back().push_back(format_real(x));
  return *this;
}

CsvTable& CsvTable::add(long long x) {
  rows_.back().push_back(std::to_string(x));
  return *this;
}

CsvTable& CsvTable::add(const std::string& s) {
  rows_.back().push_back(s);
  return *this;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string trajectory_csv(const Trajectory& t) {
  std::vector<std::string> header = {"iter", "error_norm"};
  const bool states = !t.states.empty();
  if (states) {
    for (Eigen::Index i = 0; i < t.states.front().size(); ++i) header.push_back("x" + std::to_string(i + 1));
  }
  CsvTable table(header);
  for (std::size_t i = 0; i < t.error_norms.size(); ++i) {
    table.row().add(static_cast<long long>(i)).add(t.error_norms[i]);
    if (states) {
      for (Eigen::Index k = 0; k < t.states[i].size(); ++k) table.add(t.states[i](k));
    }
  }
  return table.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  CsvTable table({"label", "budget_or_radius", "expected_cost", "lambda2_mean_laplacian", "alpha_star", "gain_Sg",
                  "gain_stderr", "flag", "matched_radius"});
  for (const auto& r : rows) {
    table.row()
        .add(r.label)
        .add(r.budget_or_radius)
        .add(r.expected_cost)
        .add(r.lambda2_mean_laplacian)
        .add(r.alpha_star)
        .add(r.gain_sg)
        .add(r.gain_stderr)
        .add(r.flag)
        .add(r.matched_radius ? format_real(*r.matched_radius) : std::string());
  }
  return table.str();
}

std::string er_study_csv(const std::vector<ErStudyRow>& rows) {
  CsvTable table({"avg_degree", "graph", "draw", "n_edges", "lambda2_mean_laplacian", "expected_lambda2",
                  "expected_lambda2_stderr", "alpha_star", "factor", "factor_stderr", "gain_Sg", "flag"});
  for (const auto& r : rows) {
    table.row()
        .add(r.avg_degree)
        .add(r.graph)
        .add(r.draw)
        .add(r.n_edges)
        .add(r.lambda2_mean_laplacian)
        .add(r.expected_lambda2)
        .add(r.expected_lambda2_stderr)
        .add(r.alpha_star)
        .add(r.factor)
        .add(r.factor_stderr)
        .add(r.gain)
        .add(r.flag);
  }
  return table.str();
}

std::string phi_csv(const std::vector<PhiPoint>& points) {
  CsvTable table({"U", "phi", "expected_cost", "iterations"});
  for (const auto& p : points) table.row().add(p.budget).add(p.phi).add(p.expected_cost).add(p.iterations);
  return table.str();
}

json estimate_record(double alpha, const FactorEstimate& f, std::uint64_t seed) {
  const auto g = convergence_gain(f.mean);
  return {{"alpha", alpha},
          {"factor_mean", f.mean},
          {"factor_stderr", f.std_error},
          {"gain", g.value},
          {"n_samples", f.n_samples},
          {"seed", seed}};
}

}  // namespace topocons
