#pragma once

#include "gwsv/graph.hpp"
#include "gwsv/linalg.hpp"
#include "gwsv/rng.hpp"

namespace gwsv {

// Parameters (delta, D, G) of the distribution with unnormalized density
// |K|^{(delta-2)/2} exp(-<K, D>/2) on positive definite matrices with zeros
// off G.  The conjugate posterior after n mean-zero Gaussian observations
// with scatter U is the same family with (delta + n, D + U, G).
struct GWishartParams {
  double delta = 3.0;
  Matrix d;
  Graph g;
};

// Coupled (K, G) sampler state; K positive definite with exact zeros off G.
struct ChainState {
  Matrix k;
  Graph g;
};

ChainState initial_chain_state(int p);

// Log of the unnormalized density of the upper Cholesky factor:
//   sum_i (delta + nu_i - 1) log phi_ii  -  <phi'phi, D>/2
// with nu_i the number of higher-indexed neighbors of i in params.g.
double log_density_phi(const CholeskyFactor& phi, const GWishartParams& params);
double log_density_phi(const Matrix& phi, double delta, const Matrix& d,
                       const Graph& g);

// One clique-wise Gibbs sweep: for each clique C, the Schur complement
// K_C - K_{C,R} K_R^{-1} K_{R,C} (R = complement of C) is replaced with a
// fresh draw from the dimension-|C| law with parameters (delta, D_C).  The
// zero pattern of K is preserved exactly.  Cliques are visited in the fixed
// order they are listed.
void block_gibbs_sweep(ChainState& state, double delta, const Matrix& d,
                       const CliqueSet& cliques, Rng& rng,
                       OpCounters* counters = nullptr);
inline void block_gibbs_sweep(ChainState& state, const GWishartParams& params,
                              const CliqueSet& cliques, Rng& rng,
                              OpCounters* counters = nullptr) {
  block_gibbs_sweep(state, params.delta, params.d, cliques, rng, counters);
}

// One random-walk MH step targeting the identity-scale prior with the given
// delta and graph.  A full proposal is drawn (chi-squared diagonal, standard
// normal free off-diagonals, deterministic completion of the fill entries)
// and accepted with probability
//   min{1, exp(-1/2 sum_{(i,j) in fill\g} (psi_ij^2 - phi_ij^2))}.
// Returns true if the proposal was accepted.  `fill` must be the elimination
// closure of g under the identity order.  Only the identity scale is
// supported; general scales make both the completion and the acceptance
// ratio lose this form.
bool rwmh_prior_step(Matrix& phi, const Graph& g, const Graph& fill,
                     double delta, Rng& rng);
bool rwmh_prior_step(CholeskyFactor& phi, const Graph& g, double delta,
                     Rng& rng);

}  // namespace gwsv
