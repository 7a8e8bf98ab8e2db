#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topocons/tridiagonal_eigen.hpp"

namespace topocons {

/// Default zero threshold for "lambda_2 > 0" decisions.
inline constexpr double kConnectivityThreshold = 1e-8;
/// Default relative residual accepted from the eigensolver.
inline constexpr double kEigenResidualTolerance = 1e-9;

/// Unordered vertex pair, stored with u < v (0-based).
struct Edge {
  int u = 0;
  int v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// The graph of realizable links. Edges are kept sorted lexicographically,
/// which fixes the order in which per-edge quantities are laid out and
/// sampled everywhere else in the library.
class Supergraph {
 public:
  Supergraph() = default;
  /// Rejects self-loops, duplicates and out-of-range endpoints. Endpoint order
  /// inside an edge does not matter.
  Supergraph(int n_vertices, std::vector<Edge> edges);

  static Supergraph complete(int n_vertices);
  static Supergraph path(int n_vertices);

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t k) const { return edges_[k]; }

  /// Position of `e` in edges(), if realizable.
  std::optional<std::size_t> find(Edge e) const;
  std::vector<int> degrees() const;
  int max_degree() const;
  std::vector<std::vector<int>> neighbors() const;

  /// Subgraph on the edges whose mask entry is true.
  Supergraph subgraph(std::span<const char> keep) const;

  friend bool operator==(const Supergraph&, const Supergraph&) = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Exact connectivity by breadth-first traversal. A graph on zero or one
/// vertex counts as connected.
bool is_connected(const Supergraph& g);
/// Component label per vertex, labels numbered from 0 in order of discovery.
std::vector<int> connected_components(const Supergraph& g);

/// Dense real symmetric matrix. Construction checks symmetry and then makes
/// it exact by averaging with the transpose.
template <typename Scalar>
class SymmetricMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SymmetricMatrix() = default;

  explicit SymmetricMatrix(const Matrix& m, Scalar rel_tol = Scalar(1e-12)) {
    using std::abs;
    if (m.rows() != m.cols()) throw std::invalid_argument("SymmetricMatrix: matrix must be square");
    if (!m.allFinite()) throw std::invalid_argument("SymmetricMatrix: non-finite entry");
    const Scalar scale = m.size() ? m.cwiseAbs().maxCoeff() : Scalar(0);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > rel_tol * std::max(scale, Scalar(1))) {
      throw std::invalid_argument("SymmetricMatrix: matrix is not symmetric");
    }
    m_ = (m + m.transpose()) / Scalar(2);
  }

  static SymmetricMatrix identity(Eigen::Index n) { return SymmetricMatrix(Matrix::Identity(n, n)); }

  Eigen::Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

template <typename Scalar>
struct WeightedEdge {
  int u = 0;
  int v = 0;
  Scalar weight = Scalar(1);
};

/// Weighted graph Laplacian D - A.
template <typename Scalar>
class Laplacian {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Laplacian() = default;

  /// Wraps an existing matrix after checking zero row sums, non-positive
  /// off-diagonals and symmetry.
  static Laplacian from_matrix(const Matrix& m) {
    using std::abs;
    SymmetricMatrix<Scalar> sym(m);
    const Matrix& s = sym.matrix();
    const Eigen::Index n = s.rows();
    const Scalar scale = n ? std::max(s.cwiseAbs().maxCoeff(), Scalar(1)) : Scalar(1);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (abs(s.row(i).sum()) > Scalar(1e-12) * Scalar(n) * scale) {
        throw std::invalid_argument("Laplacian: row " + std::to_string(i) + " does not sum to zero");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && s(i, j) > Scalar(0)) {
          throw std::invalid_argument("Laplacian: positive off-diagonal entry");
        }
      }
    }
    Laplacian out;
    out.weightsum_ = s.diagonal();
    out.m_ = std::move(sym);
    return out;
  }

  Eigen::Index order() const { return m_.order(); }
  const SymmetricMatrix<Scalar>& symmetric() const { return m_; }
  const Matrix& matrix() const { return m_.matrix(); }
  /// Weighted degree of every vertex (the diagonal).
  const Vector& weightsum() const { return weightsum_; }

 private:
  template <typename S>
  friend Laplacian<S> build_laplacian(int, std::span<const WeightedEdge<S>>);

  SymmetricMatrix<Scalar> m_;
  Vector weightsum_;
};

/// Eigenvalues ascending, eigenvectors as matching orthonormal columns.
template <typename Scalar>
struct Spectrum {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;

  Eigen::Index size() const { return eigenvalues.size(); }
  Scalar lambda2() const { return eigenvalues.size() > 1 ? eigenvalues(1) : Scalar(0); }
  Scalar lambda_max() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : Scalar(0); }
};

using SymmetricMatrixd = SymmetricMatrix<double>;
using Laplaciand = Laplacian<double>;
using Spectrumd = Spectrum<double>;
using WeightedEdged = WeightedEdge<double>;

/// Builds D - A from non-negative edge weights. Parallel entries for the same
/// pair accumulate.
template <typename Scalar>
Laplacian<Scalar> build_laplacian(int n, std::span<const WeightedEdge<Scalar>> edges) {
  using Matrix = typename Laplacian<Scalar>::Matrix;
  if (n < 0) throw std::invalid_argument("build_laplacian: negative vertex count");
  Matrix m = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw std::invalid_argument("build_laplacian: vertex out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("build_laplacian: self-loop");
    if (!(e.weight >= Scalar(0)) || !std::isfinite(static_cast<double>(e.weight))) {
      throw std::invalid_argument("build_laplacian: weight must be finite and non-negative");
    }
    m(e.u, e.u) += e.weight;
    m(e.v, e.v) += e.weight;
    m(e.u, e.v) -= e.weight;
    m(e.v, e.u) -= e.weight;
  }
  Laplacian<Scalar> out;
  out.weightsum_ = m.diagonal();
  out.m_ = SymmetricMatrix<Scalar>(m);
  return out;
}

template <typename Scalar>
Laplacian<Scalar> build_laplacian(int n, const std::vector<WeightedEdge<Scalar>>& edges) {
  return build_laplacian<Scalar>(n, std::span<const WeightedEdge<Scalar>>(edges));
}

/// Laplacian of `g` with weight weights[k] on g.edge(k).
template <typename Derived>
Laplacian<typename Derived::Scalar> build_laplacian(const Supergraph& g,
                                                    const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(weights.size()) != g.num_edges()) {
    throw std::invalid_argument("build_laplacian: one weight per edge required");
  }
  std::vector<WeightedEdge<Scalar>> we;
  we.reserve(g.num_edges());
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    we.push_back({g.edge(k).u, g.edge(k).v, weights(static_cast<Eigen::Index>(k))});
  }
  return build_laplacian<Scalar>(g.num_vertices(), std::span<const WeightedEdge<Scalar>>(we));
}

/// Unit-weight Laplacian of `g`.
inline Laplaciand unit_laplacian(const Supergraph& g) {
  return build_laplacian(g, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.num_edges())));
}

/// Full eigendecomposition. With `tol > 0` the result is checked against
/// ||M - U diag(l) U^T||_F <= tol ||M||_F and ||U^T U - I||_F <= tol.
template <typename Scalar>
Spectrum<Scalar> symmetric_eigen(const SymmetricMatrix<Scalar>& m,
                                 Scalar tol = Scalar(kEigenResidualTolerance)) {
  auto dec = tridiagonal_eigen(m.matrix(), true);
  Spectrum<Scalar> out{std::move(dec.values), std::move(dec.vectors)};
  if (tol > Scalar(0) && out.size() > 0) {
    const auto& u = out.eigenvectors;
    const Scalar norm = m.matrix().norm();
    const Scalar residual =
        (m.matrix() - u * out.eigenvalues.asDiagonal() * u.transpose()).norm();
    const Scalar ortho =
        (u.transpose() * u - decltype(out.eigenvectors)::Identity(u.cols(), u.cols())).norm();
    if (residual > tol * std::max(norm, Scalar(1e-300)) && residual > tol) {
      throw NumericalError("symmetric_eigen: reconstruction residual too large");
    }
    if (ortho > tol) throw NumericalError("symmetric_eigen: eigenvectors not orthonormal");
  }
  return out;
}

/// Eigenvalues only, ascending.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> symmetric_eigenvalues(const SymmetricMatrix<Scalar>& m) {
  return tridiagonal_eigen(m.matrix(), false).values;
}

template <typename Scalar>
Spectrum<Scalar> laplacian_spectrum(const Laplacian<Scalar>& l, Scalar tol = Scalar(0)) {
  return symmetric_eigen(l.symmetric(), tol);
}

/// Second smallest eigenvalue. Zero (up to rounding) iff the weighted graph
/// is disconnected.
template <typename Scalar>
Scalar algebraic_connectivity(const Laplacian<Scalar>& l) {
  if (l.order() < 2) return Scalar(0);
  return symmetric_eigenvalues(l.symmetric())(1);
}

/// Unit eigenvector for lambda_2. When lambda_2 is repeated this is simply
/// the first computed vector of the eigenspace.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fiedler_vector(const Laplacian<Scalar>& l) {
  if (l.order() < 2) throw std::invalid_argument("fiedler_vector: need at least two vertices");
  auto spec = symmetric_eigen(l.symmetric(), Scalar(0));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = spec.eigenvectors.col(1);
  // Remove the round-off component along 1 and fix the sign so the first
  // non-negligible entry is positive.
  v.array() -= v.mean();
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(static_cast<double>(v(i))) > 1e-12) {
      if (v(i) < Scalar(0)) v = -v;
      break;
    }
  }
  return v;
}

/// rho(W - J/N) for a symmetric W that keeps the consensus direction fixed
/// (W 1 = 1). This is the largest magnitude among the eigenvalues of W once
/// the eigenvalue 1 on the all-ones vector is removed.
template <typename Scalar>
Scalar deflated_spectral_radius(const SymmetricMatrix<Scalar>& w, Scalar tol = Scalar(1e-9)) {
  using Matrix = typename SymmetricMatrix<Scalar>::Matrix;
  const Eigen::Index n = w.order();
  if (n == 0) return Scalar(0);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ones = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(n);
  const Scalar scale = std::max(w.matrix().cwiseAbs().maxCoeff(), Scalar(1));
  if ((w.matrix() * ones - ones).cwiseAbs().maxCoeff() > tol * scale) {
    throw std::invalid_argument("deflated_spectral_radius: all-ones vector is not fixed by W");
  }
  const Matrix deflated = w.matrix() - Matrix::Constant(n, n, Scalar(1) / Scalar(n));
  const auto vals = tridiagonal_eigen(deflated, false).values;
  return std::max(std::abs(vals(0)), std::abs(vals(n - 1)));
}

}  // namespace topocons
