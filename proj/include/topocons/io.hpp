#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "topocons/arccc.hpp"
#include "topocons/consensus.hpp"
#include "topocons/random_topology.hpp"
#include "topocons/scenario.hpp"

namespace topocons {

/// Malformed or out-of-range configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Edge-map documents: {"n": N, "edges": [[n, l, value], ...]} with 1-based
// vertex numbers. The value is P_nl for probability matrices and C_nl for
// cost matrices.

nlohmann::json to_edge_map(const EdgeProbabilityMatrix& p);
nlohmann::json to_edge_map(const CostMatrix& c);
EdgeProbabilityMatrix probabilities_from_edge_map(const nlohmann::json& doc);
CostMatrix costs_from_edge_map(const nlohmann::json& doc);

/// Unknown keys and wrong types are rejected with a message naming the key.
ScenarioConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ScenarioConfig& config);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Reals with 17 significant digits; non-finite values as nan / inf / -inf.
std::string format_real(double x);

/// Comma-separated rows with a header line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& add(double x);
  CsvTable& add(long long x);
  CsvTable& add(int x) { return add(static_cast<long long>(x)); }
  CsvTable& add(const std::string& s);

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns iter, error_norm and, when states are stored, x1..xN.
std::string trajectory_csv(const Trajectory& t);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string er_study_csv(const std::vector<ErStudyRow>& rows);
std::string phi_csv(const std::vector<PhiPoint>& points);

/// {alpha, factor_mean, factor_stderr, gain, n_samples, seed}.
nlohmann::json estimate_record(double alpha, const FactorEstimate& f, std::uint64_t seed);

}  // namespace topocons
