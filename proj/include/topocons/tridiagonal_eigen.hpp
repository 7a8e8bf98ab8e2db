#pragma once

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit-shift QL iteration. Templated on the scalar so
// the same kernel serves double and long double checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace topocons {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Scalar>
Scalar hypot2(Scalar a, Scalar b) {
  using std::abs;
  using std::sqrt;
  const Scalar aa = abs(a);
  const Scalar ab = abs(b);
  if (aa > ab) {
    const Scalar r = ab / aa;
    return aa * sqrt(Scalar(1) + r * r);
  }
  if (ab == Scalar(0)) return Scalar(0);
  const Scalar r = aa / ab;
  return ab * sqrt(Scalar(1) + r * r);
}

// Reduces the symmetric matrix stored in `z` to tridiagonal form.
// On exit `d` holds the diagonal, `e` the subdiagonal (e[0] = 0), and, when
// `with_vectors`, `z` holds the accumulated orthogonal transform Q with
// A = Q T Q^T.
template <typename Scalar>
void householder_tridiagonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& z,
                                std::vector<Scalar>& d, std::vector<Scalar>& e,
                                bool with_vectors) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = z.rows();
  d.assign(n, Scalar(0));
  e.assign(n, Scalar(0));

  for (Eigen::Index i = n - 1; i > 0; --i) {
    const Eigen::Index l = i - 1;
    Scalar h = 0;
    if (l > 0) {
      Scalar scale = 0;
      for (Eigen::Index k = 0; k <= l; ++k) scale += abs(z(i, k));
      if (scale == Scalar(0)) {
        e[i] = z(i, l);
      } else {
        for (Eigen::Index k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        Scalar f = z(i, l);
        const Scalar g = f >= 0 ? -sqrt(h) : sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0;
        for (Eigen::Index j = 0; j <= l; ++j) {
          if (with_vectors) z(j, i) = z(i, j) / h;
          Scalar acc = 0;
          for (Eigen::Index k = 0; k <= j; ++k) acc += z(j, k) * z(i, k);
          for (Eigen::Index k = j + 1; k <= l; ++k) acc += z(k, j) * z(i, k);
          e[j] = acc / h;
          f += e[j] * z(i, j);
        }
        const Scalar hh = f / (h + h);
        for (Eigen::Index j = 0; j <= l; ++j) {
          const Scalar fj = z(i, j);
          const Scalar gj = e[j] - hh * fj;
          e[j] = gj;
          for (Eigen::Index k = 0; k <= j; ++k) z(j, k) -= (fj * e[k] + gj * z(i, k));
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }

  d[0] = 0;
  e[0] = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (with_vectors) {
      if (d[i] != Scalar(0)) {
        for (Eigen::Index j = 0; j < i; ++j) {
          Scalar g = 0;
          for (Eigen::Index k = 0; k < i; ++k) g += z(i, k) * z(k, j);
          for (Eigen::Index k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
        }
      }
      d[i] = z(i, i);
      z(i, i) = 1;
      for (Eigen::Index j = 0; j < i; ++j) z(j, i) = z(i, j) = 0;
    } else {
      d[i] = z(i, i);
    }
  }
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are accumulated
// into `z` when `with_vectors`. Throws NumericalError once the total number
// of QL sweeps exceeds `sweep_cap`.
template <typename Scalar>
void tridiagonal_ql(std::vector<Scalar>& d, std::vector<Scalar>& e,
                    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& z, bool with_vectors,
                    long sweep_cap) {
  using std::abs;
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  if (n == 0) return;
  for (Eigen::Index i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;

  long sweeps = 0;
  for (Eigen::Index l = 0; l < n; ++l) {
    for (;;) {
      Eigen::Index m = l;
      for (; m < n - 1; ++m) {
        const Scalar dd = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= std::numeric_limits<Scalar>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++sweeps > sweep_cap) {
        throw NumericalError("symmetric_eigen: QL iteration did not converge within sweep cap");
      }
      Scalar g = (d[l + 1] - d[l]) / (Scalar(2) * e[l]);
      Scalar r = hypot2(g, Scalar(1));
      g = d[m] - d[l] + e[l] / (g + (g >= 0 ? abs(r) : -abs(r)));
      Scalar s = 1;
      Scalar c = 1;
      Scalar p = 0;
      Eigen::Index i = m - 1;
      bool underflow = false;
      for (; i >= l; --i) {
        Scalar f = s * e[i];
        const Scalar b = c * e[i];
        r = hypot2(f, g);
        e[i + 1] = r;
        if (r == Scalar(0)) {
          d[i + 1] -= p;
          e[m] = 0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + Scalar(2) * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (with_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
      }
      if (underflow && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0;
    }
  }
}

}  // namespace detail

template <typename Scalar>
struct EigenDecomposition {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;                // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns, may be empty
};

/// Eigen-decomposition of a dense symmetric matrix. Only the lower triangle
/// of `a` is read. Eigenvalues come back in ascending order with matching
/// eigenvector columns when `with_vectors` is set.
template <typename Derived>
EigenDecomposition<typename Derived::Scalar> tridiagonal_eigen(const Eigen::MatrixBase<Derived>& a,
                                                               bool with_vectors = true) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigen: matrix must be square");
  if (!a.allFinite()) throw std::invalid_argument("symmetric_eigen: non-finite entry");

  const Eigen::Index n = a.rows();
  Mat z = a;
  std::vector<Scalar> d;
  std::vector<Scalar> e;
  detail::householder_tridiagonalize(z, d, e, with_vectors);
  detail::tridiagonal_ql(d, e, z, with_vectors, 30L * std::max<long>(1, static_cast<long>(n)));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return d[x] < d[y]; });

  EigenDecomposition<Scalar> out;
  out.values.resize(n);
  if (with_vectors) out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = d[order[j]];
    if (with_vectors) out.vectors.col(j) = z.col(order[j]);
  }
  return out;
}

}  // namespace topocons
