#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's eigensolver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "topocons/arccc.hpp"
#include "topocons/random_topology.hpp"
#include "topocons/spectral.hpp"

namespace oracle {

// Characteristic polynomial of a square matrix by Faddeev-LeVerrier.
// Returns c with det(tI - A) = t^n + c[1] t^(n-1) + ... + c[n].
inline std::vector<double> char_poly(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

// All roots of a monic polynomial by Durand-Kerner, real parts sorted.
inline std::vector<double> poly_roots(const std::vector<double>& c) {
  using cd = std::complex<double>;
  const std::size_t n = c.size() - 1;
  const auto eval = [&](cd z) {
    cd v = 1.0;
    for (std::size_t k = 1; k <= n; ++k) v = v * z + c[k];
    return v;
  };
  double bound = 1.0;
  for (std::size_t k = 1; k <= n; ++k) bound = std::max(bound, 1.0 + std::abs(c[k]));
  std::vector<cd> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(0.5 * bound, 0.4 + 2.0 * M_PI * k / n);
  for (int it = 0; it < 2000; ++it) {
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cd den = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) den *= z[i] - z[j];
      }
      const cd step = eval(z[i]) / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-15 * bound) break;
  }
  std::vector<double> out;
  for (const auto& r : z) out.push_back(r.real());
  std::sort(out.begin(), out.end());
  return out;
}

// lambda_2 of the triangle Laplacian with edge weights a, b, c: the nonzero
// eigenvalues solve t^2 - 2 s t + 3 q = 0.
inline double triangle_lambda2(double a, double b, double c) {
  const double s = a + b + c;
  const double q = a * b + b * c + c * a;
  return s - std::sqrt(std::max(0.0, s * s - 3.0 * q));
}

// Random simple graph on n vertices with edge probability q, forced connected
// by a random spanning path.
inline topocons::Supergraph random_connected_graph(int n, double q, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<topocons::Edge> edges;
  for (int u1 = 0; u1 < n; ++u1) {
    for (int v = u1 + 1; v < n; ++v) {
      bool on_path = false;
      for (int k = 0; k + 1 < n; ++k) {
        const int a = perm[static_cast<std::size_t>(k)];
        const int b = perm[static_cast<std::size_t>(k + 1)];
        if ((a == u1 && b == v) || (a == v && b == u1)) on_path = true;
      }
      if (on_path || u(gen) < q) edges.push_back({u1, v});
    }
  }
  return {n, edges};
}

inline Eigen::VectorXd random_probs(std::size_t m, double lo, double hi, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd p(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = u(gen);
  return p;
}

// lambda_2 from the characteristic polynomial; only for small orders with
// well separated eigenvalues.
inline double lambda2_by_roots(const Eigen::MatrixXd& l) {
  const auto r = poly_roots(char_poly(l));
  return r[1];
}

}  // namespace oracle
