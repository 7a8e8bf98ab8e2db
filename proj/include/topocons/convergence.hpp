#pragma once

#include <utility>
#include <vector>

#include "topocons/consensus.hpp"
#include "topocons/random_topology.hpp"

namespace topocons {

/// Default Monte Carlo sample count per estimate.
inline constexpr int kDefaultMcSamples = 400;
/// Gain reported when the factor is numerically zero (one-step consensus).
inline constexpr double kGainCap = 50.0;
inline constexpr double kExactConsensusFactor = 1e-15;

/// Sample mean with its standard error sd / sqrt(n).
struct FactorEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

FactorEstimate summarize(const std::vector<double>& samples);

/// Extreme nonzero-mode eigenvalues (lambda_2, lambda_N) of sampled
/// Laplacians. These determine rho(W - J/N) = max(|1 - a l2|, |1 - a lN|)
/// for every alpha, so one sample set serves every alpha (common random
/// numbers).
struct SpectralSamples {
  std::vector<double> lambda2;
  std::vector<double> lambda_max;

  std::size_t size() const { return lambda2.size(); }
  /// rho(W - J/N) of sample k at weight alpha.
  double rho(std::size_t k, double alpha) const;
  FactorEstimate factor(double alpha) const;
};

/// Sample k is drawn from rng.substream(k).
SpectralSamples sample_spectra(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng);

/// C(alpha) = E[rho(W - J/N)].
FactorEstimate estimate_convergence_factor(const EdgeProbabilityMatrix& p, double alpha, int n_samples,
                                           const SeededRng& rng);

struct Gain {
  double value = 0.0;
  bool exact_consensus = false;  // factor below kExactConsensusFactor; value = kGainCap
  bool converges = true;         // false when factor >= 1
};

/// S_g = -ln(factor).
Gain convergence_gain(double factor);

/// E[lambda_2(L)].
FactorEstimate estimate_expected_lambda2(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng);

struct AlphaSearchResult {
  double alpha_star = 0.0;
  FactorEstimate factor;
  std::pair<double, double> bracket;  // (0, 2 / lambda_N(mean L))
  int evaluations = 0;
};

/// Golden-section minimization of the common-random-number estimate of
/// C(alpha) over (0, 2/lambda_N(mean L)); stops once the bracket is narrower
/// than tol * 2/lambda_N(mean L). Throws NoConvergenceError on a disconnected
/// mean graph.
AlphaSearchResult optimize_alpha(const SpectralSamples& samples, const Laplaciand& mean_l, double tol = 1e-3);
AlphaSearchResult optimize_alpha(const EdgeProbabilityMatrix& p, int n_samples, double tol, const SeededRng& rng);

struct GainBound {
  double value = 0.0;
  bool capped = false;   // 1 - alpha_mss E[lambda_2] vanished; value = kGainCap
  bool clamped = false;  // estimate exceeded 1/alpha_mss and was clamped
  double alpha_mss = 0.0;
  FactorEstimate expected_lambda2;
};

/// ln(1 / (1 - alpha_mss E[lambda_2(L)])), a lower bound on the optimal gain.
GainBound mss_gain_lower_bound(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng);

}  // namespace topocons
