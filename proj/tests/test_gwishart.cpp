#include <doctest.h>

#include "gwsv/errors.hpp"
#include "gwsv/gwishart.hpp"
#include "oracles.hpp"

using namespace gwsv;

TEST_SUITE_BEGIN("gwishart");

TEST_CASE("factor log density on fixed points") {
  // p = 1: phi = 1, delta = 3, d = 1 gives log(1^2 e^{-1/2}) = -1/2
  Matrix phi1(1, 1);
  phi1 << 1.0;
  CHECK(log_density_phi(phi1, 3.0, Matrix::Identity(1, 1), Graph(1)) ==
        doctest::Approx(-0.5));

  // identity factor: each diagonal contributes -1/2 regardless of the graph
  for (int p : {2, 4}) {
    const Matrix phi = Matrix::Identity(p, p);
    CHECK(log_density_phi(phi, 3.0, Matrix::Identity(p, p), Graph(p)) ==
          doctest::Approx(-0.5 * p));
    CHECK(log_density_phi(phi, 3.0, Matrix::Identity(p, p),
                          Graph::complete(p)) == doctest::Approx(-0.5 * p));
  }

  CHECK_THROWS_AS(
      log_density_phi(phi1, 3.0, Matrix::Identity(2, 2), Graph(2)),
      NumericError);
}

TEST_CASE("density exponents follow the higher-neighbor counts") {
  // scaling one diagonal entry isolates its exponent delta + nu_i - 1
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  const double delta = 3.0;
  const Matrix d = Matrix::Identity(3, 3);
  const double c = 1.7;
  Matrix phi = Matrix::Identity(3, 3);
  Matrix scaled = phi;
  scaled(0, 0) = c;
  const double diff = log_density_phi(scaled, delta, d, g) -
                      log_density_phi(phi, delta, d, g);
  const double nu0 = 2.0;
  CHECK(diff == doctest::Approx((delta + nu0 - 1.0) * std::log(c) -
                                0.5 * (c * c - 1.0)));
}

TEST_CASE("block gibbs on the complete graph is a plain wishart draw") {
  Rng rng(101);
  const int p = 3;
  const double delta = 3.0;
  Matrix d(p, p);
  d << 1.8, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.3;
  const Matrix expect = (delta + p - 1) * d.inverse();
  const CliqueSet cliques = maximal_cliques(Graph::complete(p));
  ChainState state = initial_chain_state(p);
  state.g = Graph::complete(p);

  const int n = 20000;
  Matrix acc = Matrix::Zero(p, p);
  Matrix acc_sq = Matrix::Zero(p, p);
  for (int it = 0; it < n; ++it) {
    block_gibbs_sweep(state, delta, d, cliques, rng);
    acc += state.k;
    acc_sq += state.k.cwiseProduct(state.k);
  }
  const Matrix mean = acc / n;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const double var = acc_sq(i, j) / n - mean(i, j) * mean(i, j);
      const double se = std::sqrt(var / n);
      CHECK(std::abs(mean(i, j) - expect(i, j)) <= 3.5 * se + 1e-12);
    }
  }
}

TEST_CASE("block gibbs on the empty graph gives independent gamma margins") {
  Rng rng(103);
  const int p = 3;
  const double delta = 3.0;
  Matrix d = Matrix::Zero(p, p);
  d.diagonal() << 1.0, 2.0, 0.5;
  ChainState state = initial_chain_state(p);
  const CliqueSet cliques = maximal_cliques(Graph(p));
  std::vector<double> scaled;  // K_ii * d_ii should be Gamma(delta/2, 1/2)
  for (int it = 0; it < 10000; ++it) {
    block_gibbs_sweep(state, delta, d, cliques, rng);
    for (int i = 0; i < p; ++i) scaled.push_back(state.k(i, i) * d(i, i));
  }
  CHECK(oracles::ks_pass_01(scaled, oracles::gamma_cdf(0.5 * delta, 0.5)));
}

TEST_CASE("block gibbs keeps the zero pattern exactly") {
  Rng rng(107);
  for (int rep = 0; rep < 5; ++rep) {
    const Graph g = oracles::random_graph(6, 0.4, rng);
    ChainState state{oracles::random_pd_in_pattern(g, rng), g};
    const CliqueSet cliques = maximal_cliques(g);
    Matrix d = oracles::random_pd_in_pattern(Graph::complete(6), rng);
    for (int it = 0; it < 50; ++it) {
      block_gibbs_sweep(state, 3.0, d, cliques, rng);
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
          if (!g.has_edge(i, j)) {
            CHECK(state.k(i, j) == 0.0);
            CHECK(state.k(j, i) == 0.0);
          }
      CHECK_NOTHROW(cholesky_upper(state.k));
    }
  }
}

TEST_CASE("rwmh always accepts when the closure adds nothing") {
  Rng rng(109);
  const Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
  CholeskyFactor f{Matrix::Identity(3, 3),
                   fill_in_graph(path, Permutation::identity(3))};
  CHECK(f.fill == path);  // perfect ordering: no fill
  for (int it = 0; it < 200; ++it) {
    CHECK(rwmh_prior_step(f, path, 3.0, rng));
  }
}

TEST_CASE("rwmh at p = 1 reproduces the chi-squared diagonal") {
  Rng rng(113);
  const Graph g(1);
  CholeskyFactor f{Matrix::Identity(1, 1), Graph(1)};
  const double delta = 3.0;
  std::vector<double> draws;
  for (int it = 0; it < 10000; ++it) {
    rwmh_prior_step(f, g, delta, rng);
    draws.push_back(f.phi(0, 0) * f.phi(0, 0));
  }
  CHECK(oracles::ks_pass_01(draws, oracles::chi2_cdf(delta)));
}

TEST_CASE("rwmh and block gibbs agree on the identity-scale prior") {
  // a labeling whose natural elimination produces fill, so the acceptance
  // ratio is exercised
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  const double delta = 3.0;
  const Matrix d = Matrix::Identity(3, 3);
  const int iters = 60000, burn = 2000;

  Rng rng_a(127);
  CholeskyFactor f{Matrix::Identity(3, 3),
                   fill_in_graph(g, Permutation::identity(3))};
  std::vector<double> rw01, rw02, rwdiag;
  for (int it = 0; it < iters; ++it) {
    rwmh_prior_step(f, g, delta, rng_a);
    if (it < burn) continue;
    const Matrix k = phi_to_precision(f.phi, g);
    rw01.push_back(k(0, 1));
    rw02.push_back(k(0, 2));
    rwdiag.push_back(k(1, 1));
  }

  Rng rng_b(131);
  ChainState state = initial_chain_state(3);
  state.g = g;
  const CliqueSet cliques = maximal_cliques(g);
  std::vector<double> bg01, bg02, bgdiag;
  for (int it = 0; it < iters; ++it) {
    block_gibbs_sweep(state, delta, d, cliques, rng_b);
    if (it < burn) continue;
    bg01.push_back(state.k(0, 1));
    bg02.push_back(state.k(0, 2));
    bgdiag.push_back(state.k(1, 1));
  }

  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    const double se = std::sqrt(oracles::batch_se(a) * oracles::batch_se(a) +
                                oracles::batch_se(b) * oracles::batch_se(b));
    return std::abs(oracles::mean(a) - oracles::mean(b)) <= 3.0 * se;
  };
  CHECK(close(rw01, bg01));
  CHECK(close(rw02, bg02));
  CHECK(close(rwdiag, bgdiag));
}

TEST_SUITE_END();
