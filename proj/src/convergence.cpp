#include "topocons/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "topocons/parallel.hpp"

namespace topocons {

FactorEstimate summarize(const std::vector<double>& samples) {
  FactorEstimate est;
  est.n_samples = static_cast<int>(samples.size());
  if (samples.empty()) return est;
  // A degenerate (deterministic) sample is reported exactly.
  if (std::all_of(samples.begin(), samples.end(), [&](double s) { return s == samples.front(); })) {
    est.mean = samples.front();
    return est;
  }
  const double n = static_cast<double>(samples.size());
  est.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - est.mean) * (s - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

double SpectralSamples::rho(std::size_t k, double alpha) const {
  return std::max(std::abs(1.0 - alpha * lambda2[k]), std::abs(1.0 - alpha * lambda_max[k]));
}

FactorEstimate SpectralSamples::factor(double alpha) const {
  std::vector<double> r(size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = rho(k, alpha);
  return summarize(r);
}

SpectralSamples sample_spectra(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng) {
  if (n_samples < 1) throw std::invalid_argument("sample_spectra: n_samples must be >= 1");
  if (p.num_vertices() < 2) throw std::invalid_argument("sample_spectra: need at least two vertices");
  SpectralSamples out;
  out.lambda2.resize(static_cast<std::size_t>(n_samples));
  out.lambda_max.resize(static_cast<std::size_t>(n_samples));
  const int n = p.num_vertices();
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
    auto sub = rng.substream(s);
    const auto mask = sample_edge_mask(p, sub);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) continue;
      const auto& e = p.graph().edge(k);
      l(e.u, e.u) += 1.0;
      l(e.v, e.v) += 1.0;
      l(e.u, e.v) -= 1.0;
      l(e.v, e.u) -= 1.0;
    }
    const auto vals = tridiagonal_eigen(l, false).values;
    // Round-off can leave tiny negative values on disconnected samples.
    out.lambda2[s] = std::max(0.0, vals(1));
    out.lambda_max[s] = std::max(0.0, vals(n - 1));
  });
  return out;
}

FactorEstimate estimate_convergence_factor(const EdgeProbabilityMatrix& p, double alpha, int n_samples,
                                           const SeededRng& rng) {
  if (n_samples < 2) throw std::invalid_argument("estimate_convergence_factor: n_samples must be >= 2");
  return sample_spectra(p, n_samples, rng).factor(alpha);
}

Gain convergence_gain(double factor) {
  if (!(factor >= 0.0)) throw std::invalid_argument("convergence_gain: factor must be non-negative");
  Gain g;
  if (factor <= kExactConsensusFactor) {
    g.value = kGainCap;
    g.exact_consensus = true;
    return g;
  }
  g.value = -std::log(factor) + 0.0;  // +0.0 turns -0 into 0
  g.converges = factor < 1.0;
  return g;
}

FactorEstimate estimate_expected_lambda2(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng) {
  if (n_samples < 2) throw std::invalid_argument("estimate_expected_lambda2: n_samples must be >= 2");
  return summarize(sample_spectra(p, n_samples, rng).lambda2);
}

AlphaSearchResult optimize_alpha(const SpectralSamples& samples, const Laplaciand& mean_l, double tol) {
  const auto vals = symmetric_eigenvalues(mean_l.symmetric());
  if (vals.size() < 2 || vals(1) <= kConnectivityThreshold) {
    throw NoConvergenceError("optimize_alpha: mean graph is disconnected; no alpha gives mss convergence");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("optimize_alpha: tol must be positive");
  const double upper = 2.0 / vals(vals.size() - 1);

  AlphaSearchResult res;
  res.bracket = {0.0, upper};

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = upper;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = samples.factor(x1).mean;
  double f2 = samples.factor(x2).mean;
  res.evaluations = 2;
  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);

  while (hi - lo >= tol * upper) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = samples.factor(x1).mean;
      if (f1 < best_f) best_f = f1, best_x = x1;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = samples.factor(x2).mean;
      if (f2 < best_f) best_f = f2, best_x = x2;
    }
    ++res.evaluations;
  }

  res.alpha_star = best_x;
  res.factor = samples.factor(best_x);
  return res;
}

AlphaSearchResult optimize_alpha(const EdgeProbabilityMatrix& p, int n_samples, double tol, const SeededRng& rng) {
  if (n_samples < 2) throw std::invalid_argument("optimize_alpha: n_samples must be >= 2");
  const auto mean_l = mean_laplacian(p);
  if (algebraic_connectivity(mean_l) <= kConnectivityThreshold) {
    throw NoConvergenceError("optimize_alpha: mean graph is disconnected; no alpha gives mss convergence");
  }
  return optimize_alpha(sample_spectra(p, n_samples, rng), mean_l, tol);
}

GainBound mss_gain_lower_bound(const EdgeProbabilityMatrix& p, int n_samples, const SeededRng& rng) {
  GainBound b;
  b.alpha_mss = alpha_mss(p.graph());
  b.expected_lambda2 = estimate_expected_lambda2(p, n_samples, rng);
  double contraction = 1.0 - b.alpha_mss * b.expected_lambda2.mean;
  if (contraction < 0.0) {
    b.clamped = true;
    contraction = 0.0;
  }
  const auto g = convergence_gain(contraction);
  b.value = g.value;
  b.capped = g.exact_consensus;
  return b;
}

}  // namespace topocons
