#include "gwsv/gwishart.hpp"

#include <cmath>

#include "gwsv/errors.hpp"

namespace gwsv {

ChainState initial_chain_state(int p) {
  return ChainState{Matrix::Identity(p, p), Graph(p)};
}

double log_density_phi(const Matrix& phi, double delta, const Matrix& d,
                       const Graph& g) {
  const int p = g.size();
  if (phi.rows() != p || d.rows() != p) {
    throw NumericError("log_density_phi: dimension mismatch");
  }
  const std::vector<int> nu = nu_counts(g);
  double out = 0.0;
  for (int i = 0; i < p; ++i) {
    out += (delta + nu[i] - 1.0) * std::log(phi(i, i));
  }
  // <phi'phi, D> = tr(phi D phi')
  out -= 0.5 * (phi * d).cwiseProduct(phi).sum();
  return out;
}

double log_density_phi(const CholeskyFactor& phi, const GWishartParams& params) {
  return log_density_phi(phi.phi, params.delta, params.d, params.g);
}

void block_gibbs_sweep(ChainState& state, double delta, const Matrix& d,
                       const CliqueSet& cliques, Rng& rng,
                       OpCounters* counters) {
  const int p = static_cast<int>(state.k.rows());
  for (const auto& c : cliques.cliques) {
    const int q = static_cast<int>(c.size());
    std::vector<int> rest;
    rest.reserve(p - q);
    {
      std::vector<char> in_c(p, 0);
      for (int v : c) in_c[v] = 1;
      for (int v = 0; v < p; ++v)
        if (!in_c[v]) rest.push_back(v);
    }
    Matrix d_c(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) d_c(a, b) = d(c[a], c[b]);

    Matrix shift = Matrix::Zero(q, q);
    if (!rest.empty()) {
      const int r = static_cast<int>(rest.size());
      Matrix k_rest(r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) k_rest(a, b) = state.k(rest[a], rest[b]);
      Matrix k_rc(r, q);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < q; ++b) k_rc(a, b) = state.k(rest[a], c[b]);
      Eigen::LLT<Matrix> llt(k_rest);
      if (llt.info() != Eigen::Success) {
        throw NumericError("block_gibbs_sweep: complement block not positive definite");
      }
      if (counters) {
        ++counters->gibbs_clique_updates;
        if (r >= p - 2 && r >= 1) ++counters->gibbs_large_solves;
      }
      shift = k_rc.transpose() * llt.solve(k_rc);
      symmetrize(shift);
    } else if (counters) {
      ++counters->gibbs_clique_updates;
    }

    const Matrix w = sample_wishart(delta, d_c, rng);
    for (int a = 0; a < q; ++a) {
      for (int b = a; b < q; ++b) {
        const double v = w(a, b) + shift(a, b);
        state.k(c[a], c[b]) = v;
        state.k(c[b], c[a]) = v;
      }
    }
  }
}

bool rwmh_prior_step(Matrix& phi, const Graph& g, const Graph& fill,
                     double delta, Rng& rng) {
  const int p = g.size();
  const std::vector<int> nu = nu_counts(g);
  Matrix psi = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    psi(i, i) = std::sqrt(rng.chi_squared(delta + nu[i]));
    for (int j = i + 1; j < p; ++j)
      if (g.has_edge(i, j)) psi(i, j) = rng.normal();
  }
  complete_phi(psi, g, fill);
  double log_alpha = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (fill.has_edge(i, j) && !g.has_edge(i, j)) {
        log_alpha -= 0.5 * (psi(i, j) * psi(i, j) - phi(i, j) * phi(i, j));
      }
    }
  }
  if (std::log(rng.uniform()) < log_alpha) {
    phi = std::move(psi);
    return true;
  }
  return false;
}

bool rwmh_prior_step(CholeskyFactor& phi, const Graph& g, double delta,
                     Rng& rng) {
  const Graph fill = fill_in_graph(g, Permutation::identity(g.size()));
  const bool accepted = rwmh_prior_step(phi.phi, g, fill, delta, rng);
  phi.fill = fill;
  return accepted;
}

}  // namespace gwsv
