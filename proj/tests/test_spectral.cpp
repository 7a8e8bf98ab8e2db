#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "topocons/spectral.hpp"
#include "topocons/tridiagonal_eigen.hpp"

using namespace topocons;

TEST_CASE("build_laplacian: two nodes with weight 0.5") {
  const auto l = build_laplacian<double>(2, std::vector<WeightedEdged>{{0, 1, 0.5}});
  Eigen::Matrix2d expect;
  expect << 0.5, -0.5, -0.5, 0.5;
  CHECK((l.matrix() - expect).norm() == 0.0);
}

TEST_CASE("build_laplacian: unit path on three vertices") {
  const auto l = unit_laplacian(Supergraph::path(3));
  Eigen::Matrix3d expect;
  expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK((l.matrix() - expect).norm() == 0.0);
}

TEST_CASE("build_laplacian: rows sum to zero") {
  const auto l = build_laplacian<double>(3, std::vector<WeightedEdged>{{0, 1, 0.3}, {1, 2, 0.7}});
  CHECK(l.matrix().rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
  CHECK(l.matrix()(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("build_laplacian: rejects bad input") {
  CHECK_THROWS_AS(build_laplacian<double>(2, std::vector<WeightedEdged>{{0, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_laplacian<double>(2, std::vector<WeightedEdged>{{1, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_laplacian<double>(2, std::vector<WeightedEdged>{{0, 1, -0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_laplacian<double>(2, std::vector<WeightedEdged>{{0, 1, NAN}}), std::invalid_argument);
}

TEST_CASE("Laplacian::from_matrix validates structure") {
  Eigen::Matrix2d bad;
  bad << 1, -0.5, -0.5, 0.5;
  CHECK_THROWS_AS(Laplaciand::from_matrix(bad), std::invalid_argument);
  Eigen::Matrix2d pos;
  pos << -1, 1, 1, -1;
  CHECK_THROWS_AS(Laplaciand::from_matrix(pos), std::invalid_argument);
}

TEST_CASE("SymmetricMatrix rejects asymmetric input") {
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(SymmetricMatrixd{m}, std::invalid_argument);
}

TEST_CASE("Supergraph normalizes and rejects duplicates") {
  const Supergraph g(3, {{2, 1}, {0, 1}});
  CHECK(g.edge(0) == Edge{0, 1});
  CHECK(g.edge(1) == Edge{1, 2});
  CHECK(g.find({1, 2}).has_value());
  CHECK_FALSE(g.find({0, 2}).has_value());
  CHECK_THROWS_AS(Supergraph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Supergraph(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Supergraph(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("symmetric_eigen: small closed forms") {
  const auto id = symmetric_eigen(SymmetricMatrixd::identity(3));
  CHECK((id.eigenvalues - Eigen::Vector3d::Ones()).norm() < 1e-14);

  const auto path = laplacian_spectrum(unit_laplacian(Supergraph::path(3)));
  CHECK(path.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(path.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(path.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-12));

  const auto k4 = laplacian_spectrum(unit_laplacian(Supergraph::complete(4)));
  CHECK(std::abs(k4.eigenvalues(0)) < 1e-12);
  for (int j = 1; j < 4; ++j) CHECK(k4.eigenvalues(j) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("symmetric_eigen: eigenvectors are orthonormal and satisfy the residual") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 5, 17, 40}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = nd(gen);
    const SymmetricMatrixd s(Eigen::MatrixXd(a + a.transpose()));
    const auto sp = symmetric_eigen(s);
    const auto& v = sp.eigenvectors;
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
    CHECK((s.matrix() * v - v * sp.eigenvalues.asDiagonal()).norm() < 1e-9 * (1.0 + s.matrix().norm()));
    for (int j = 1; j < n; ++j) CHECK(sp.eigenvalues(j - 1) <= sp.eigenvalues(j));
  }
}

TEST_CASE("tridiagonal_eigen rejects non-finite and non-square input") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  a(0, 1) = a(1, 0) = NAN;
  CHECK_THROWS_AS(tridiagonal_eigen(a), std::invalid_argument);
  CHECK_THROWS(tridiagonal_eigen(Eigen::MatrixXd(2, 3)));
}

TEST_CASE("property: eigenvalues match characteristic polynomial roots for N <= 4") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = nd(gen);
    a = (a + a.transpose()).eval();
    const auto mine = symmetric_eigenvalues(SymmetricMatrixd(a));
    const auto ref = oracle::poly_roots(oracle::char_poly(a));
    for (int j = 0; j < n; ++j) CHECK(mine(j) == doctest::Approx(ref[static_cast<std::size_t>(j)]).epsilon(1e-8));
  }
}

TEST_CASE("property: random weighted Laplacians are PSD with zero row sums") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 25;
    const auto g = oracle::random_connected_graph(n, 0.3, gen);
    const Eigen::VectorXd w = oracle::random_probs(g.num_edges(), 0.0, 1.0, gen);
    const auto l = build_laplacian(g, w);
    CHECK(l.matrix().rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(symmetric_eigenvalues(l.symmetric())(0) >= -1e-9);

    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = nd(gen);
    double half_sum = 0.0;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      const auto& e = g.edge(k);
      half_sum += w(static_cast<Eigen::Index>(k)) * std::pow(z(e.u) - z(e.v), 2);
    }
    CHECK(z.dot(l.matrix() * z) == doctest::Approx(half_sum).epsilon(1e-10));
  }
}

TEST_CASE("algebraic_connectivity examples") {
  CHECK(algebraic_connectivity(unit_laplacian(Supergraph::complete(3))) == doctest::Approx(3.0));
  CHECK(algebraic_connectivity(unit_laplacian(Supergraph(4, {{0, 1}, {2, 3}}))) == doctest::Approx(0.0).epsilon(1e-12));
  const auto l = build_laplacian<double>(2, std::vector<WeightedEdged>{{0, 1, 0.37}});
  CHECK(algebraic_connectivity(l) == doctest::Approx(0.74));
  CHECK(algebraic_connectivity(unit_laplacian(Supergraph(1, {}))) == 0.0);
}

TEST_CASE("fiedler_vector examples") {
  const auto v2 = fiedler_vector(unit_laplacian(Supergraph::path(2)));
  CHECK(std::abs(v2(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(v2(0) == doctest::Approx(-v2(1)));

  const auto v3 = fiedler_vector(unit_laplacian(Supergraph::path(3)));
  CHECK(std::abs(v3(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(v3(1)) < 1e-12);
  CHECK(v3(0) == doctest::Approx(-v3(2)));

  const auto l = unit_laplacian(Supergraph::complete(3));
  const auto vk = fiedler_vector(l);
  CHECK(vk.norm() == doctest::Approx(1.0));
  CHECK(std::abs(vk.sum()) < 1e-12);
  CHECK(vk.dot(l.matrix() * vk) == doctest::Approx(3.0));
}

TEST_CASE("deflated_spectral_radius examples") {
  CHECK(deflated_spectral_radius(SymmetricMatrixd::identity(2)) == doctest::Approx(1.0));
  const SymmetricMatrixd j(Eigen::MatrixXd::Constant(4, 4, 0.25));
  CHECK(deflated_spectral_radius(j) == doctest::Approx(0.0).epsilon(1e-12));
  const auto l = unit_laplacian(Supergraph::path(3));
  const SymmetricMatrixd w(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3) - 0.5 * l.matrix()));
  CHECK(deflated_spectral_radius(w) == doctest::Approx(0.5));

  Eigen::Matrix2d not_stochastic;
  not_stochastic << 1, 0.5, 0.5, 1;
  CHECK_THROWS_AS(deflated_spectral_radius(SymmetricMatrixd(not_stochastic)), std::invalid_argument);
}

TEST_CASE("property: deflated radius is the largest eigenvalue magnitude off the consensus direction") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 9;
    const auto g = oracle::random_connected_graph(n, 0.4, gen);
    const auto l = build_laplacian(g, oracle::random_probs(g.num_edges(), 0.0, 1.0, gen));
    const double alpha = ua(gen);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n) - alpha * l.matrix();
    // Exhaustive check: eigenvalues of W are 1 - alpha lambda_j; the
    // deflation drops exactly the one belonging to the all-ones vector.
    const auto roots = oracle::poly_roots(oracle::char_poly(l.matrix()));
    double expect = 0.0;
    for (std::size_t k = 1; k < roots.size(); ++k) expect = std::max(expect, std::abs(1.0 - alpha * roots[k]));
    if (n > 5) {
      // Root finding loses digits on larger orders; fall back to a
      // projected power iteration.
      const Eigen::MatrixXd d = w - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
      Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
      double r = 0.0;
      for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd y = d * (d * x);
        r = std::sqrt(y.norm() / x.norm());
        x = y / y.norm();
      }
      expect = r;
      CHECK(deflated_spectral_radius(SymmetricMatrixd(w)) == doctest::Approx(expect).epsilon(1e-6));
    } else {
      CHECK(deflated_spectral_radius(SymmetricMatrixd(w)) == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("connectivity by traversal") {
  CHECK(is_connected(Supergraph::path(3)));
  CHECK_FALSE(is_connected(Supergraph(2, {})));
  std::vector<Edge> star;
  for (int k = 1; k < 10; ++k) star.push_back({0, k});
  CHECK(is_connected(Supergraph(10, star)));
  const auto comp = connected_components(Supergraph(4, {{0, 1}, {2, 3}}));
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] == comp[3]);
  CHECK(comp[0] != comp[2]);
}

TEST_CASE("property: spectral and traversal connectivity agree") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 12;
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (u(gen) < 0.18) edges.push_back({a, b});
    const Supergraph g(n, edges);
    CHECK(is_connected(g) == (algebraic_connectivity(unit_laplacian(g)) > kConnectivityThreshold));
  }
}

TEST_CASE("templated scalar: float Laplacian spectrum") {
  const auto l = build_laplacian<float>(3, std::vector<WeightedEdge<float>>{{0, 1, 1.0f}, {1, 2, 1.0f}});
  const auto vals = symmetric_eigenvalues(l.symmetric());
  CHECK(vals(2) == doctest::Approx(3.0f).epsilon(1e-5));
}
