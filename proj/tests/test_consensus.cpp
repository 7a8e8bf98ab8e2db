#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "topocons/consensus.hpp"

using namespace topocons;

TEST_CASE("weight_matrix examples") {
  const auto l3 = unit_laplacian(Supergraph::path(3));
  CHECK((weight_matrix(l3, 0.0).matrix() - Eigen::Matrix3d::Identity()).norm() == 0.0);
  const auto w2 = weight_matrix(unit_laplacian(Supergraph::path(2)), 0.5);
  CHECK((w2.matrix() - Eigen::Matrix2d::Constant(0.5)).norm() == 0.0);
  const auto vals = symmetric_eigenvalues(weight_matrix(l3, 0.25));
  CHECK(vals(0) == doctest::Approx(0.25));
  CHECK(vals(1) == doctest::Approx(0.75));
  CHECK(vals(2) == doctest::Approx(1.0));
}

TEST_CASE("consensus_target examples") {
  const auto t = consensus_target(Eigen::Vector2d(0, 2));
  CHECK(t.average == 1.0);
  CHECK((t.vector - Eigen::Vector2d(1, 1)).norm() == 0.0);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(5, 3.5);
  CHECK((consensus_target(c).vector - c).norm() == 0.0);
  CHECK(consensus_target(Eigen::Vector4d(1, 2, 3, 6)).average == 3.0);
}

TEST_CASE("run_consensus: one step of a reliable link reaches the average") {
  SeededRng rng(1);
  const auto t = run_consensus(Eigen::Vector2d(0, 2), EdgeProbabilityMatrix::constant(Supergraph::path(2), 1.0), 0.5,
                               3, rng, {.store_states = true});
  CHECK((t.states[1] - Eigen::Vector2d(1, 1)).norm() == 0.0);
  CHECK(t.error_norms[1] == 0.0);
  CHECK(t.error_norms.size() == 4);
}

TEST_CASE("run_consensus: no links means no motion") {
  SeededRng rng(1);
  const Eigen::Vector3d x0(1, -2, 5);
  const auto t = run_consensus(x0, EdgeProbabilityMatrix::constant(Supergraph::complete(3), 0.0), 0.3, 50, rng,
                               {.store_states = true});
  for (const auto& x : t.states) CHECK((x - x0).norm() == 0.0);
}

TEST_CASE("run_consensus: divergence is flagged") {
  SeededRng rng(1);
  const auto t = run_consensus(Eigen::Vector2d(0, 1), EdgeProbabilityMatrix::constant(Supergraph::path(2), 1.0), 5.0,
                               100, rng);
  CHECK(t.diverged);
  REQUIRE(t.diverged_at.has_value());
  CHECK(*t.diverged_at < 100);
}

TEST_CASE("run_consensus rejects mismatched sizes") {
  SeededRng rng(1);
  CHECK_THROWS_AS(run_consensus(Eigen::Vector3d(0, 1, 2), EdgeProbabilityMatrix::constant(Supergraph::path(2), 1.0),
                                0.5, 3, rng),
                  std::invalid_argument);
}

TEST_CASE("property: the sum of states is preserved and errors never grow at alpha_mss") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 15;
    const auto g = oracle::random_connected_graph(n, 0.3, gen);
    const EdgeProbabilityMatrix p(g, oracle::random_probs(g.num_edges(), 0.0, 1.0, gen));
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = nd(gen);
    SeededRng rng(static_cast<std::uint64_t>(trial));
    const auto t = run_consensus(x0, p, alpha_mss(g), 100, rng, {.store_states = true});
    for (const auto& x : t.states) CHECK(x.sum() == doctest::Approx(x0.sum()).epsilon(1e-10).scale(x0.norm()));
    for (std::size_t i = 1; i < t.error_norms.size(); ++i) {
      CHECK(t.error_norms[i] <= t.error_norms[i - 1] * (1.0 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("property: each step contracts by at most the sampled deflated radius") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 8;
    const auto g = oracle::random_connected_graph(n, 0.4, gen);
    const EdgeProbabilityMatrix p(g, oracle::random_probs(g.num_edges(), 0.0, 1.0, gen));
    const double alpha = alpha_mss(g) * 1.5;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = nd(gen);
    const double avg = x.mean();
    SeededRng rng(100 + static_cast<std::uint64_t>(trial));
    for (int step = 0; step < 30; ++step) {
      const auto mask = sample_edge_mask(p, rng);
      const double before = (x.array() - avg).matrix().norm();
      consensus_step(g, mask, alpha, x);
      const double after = (x.array() - avg).matrix().norm();
      const auto l = unit_laplacian(g.subgraph(mask));
      const double rho = deflated_spectral_radius(weight_matrix(l, alpha));
      CHECK(after <= rho * before * (1.0 + 1e-10) + 1e-14);
    }
  }
}

TEST_CASE("mean_trajectory_prediction examples") {
  const Eigen::Vector2d x0(0, 2);
  const auto mw = weight_matrix(mean_laplacian(EdgeProbabilityMatrix::constant(Supergraph::path(2), 0.5)), 0.5);
  CHECK((mean_trajectory_prediction(x0, mw, 0) - x0).norm() == 0.0);
  CHECK((mean_trajectory_prediction(x0, mw, 1) - Eigen::Vector2d(0.5, 1.5)).norm() < 1e-15);
  const Eigen::Vector2d avg(1, 1);
  for (int i : {0, 1, 7}) CHECK((mean_trajectory_prediction(avg, mw, i) - avg).norm() < 1e-15);
}

TEST_CASE("optimal_alpha_mean closed forms") {
  const auto r = optimal_alpha_mean(unit_laplacian(Supergraph::path(3)));
  CHECK(r.alpha_star == doctest::Approx(0.5));
  CHECK(r.rho_min == doctest::Approx(0.5));
  for (int n = 3; n <= 7; ++n) {
    const auto k = optimal_alpha_mean(unit_laplacian(Supergraph::complete(n)));
    CHECK(k.alpha_star == doctest::Approx(1.0 / n));
    CHECK(std::abs(k.rho_min) < 1e-12);
  }
  CHECK_THROWS_AS(optimal_alpha_mean(unit_laplacian(Supergraph(4, {{0, 1}, {2, 3}}))), NoConvergenceError);
}

TEST_CASE("alpha_mss examples") {
  CHECK(alpha_mss(Supergraph(4, {{0, 1}, {0, 2}, {0, 3}})) == doctest::Approx(1.0 / 6.0));
  CHECK(alpha_mss(Supergraph::path(2)) == 0.5);
  const double a = alpha_mss(Supergraph::path(3));
  CHECK(a == 0.25);
  CHECK(1.0 - a * 3.0 >= 0.0);
  CHECK_THROWS_AS(alpha_mss(Supergraph(3, {})), std::invalid_argument);
}

TEST_CASE("mean_convergence_condition examples") {
  CHECK_FALSE(mean_convergence_condition(SymmetricMatrixd::identity(3)));
  CHECK(mean_convergence_condition(SymmetricMatrixd(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3))));
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_connected_graph(6, 0.4, gen);
    const auto l = mean_laplacian(EdgeProbabilityMatrix(g, oracle::random_probs(g.num_edges(), 0.1, 1.0, gen)));
    const double alpha = u(gen) * 2.0 / symmetric_eigenvalues(l.symmetric())(5);
    CHECK(mean_convergence_condition(weight_matrix(l, alpha)));
  }
}
