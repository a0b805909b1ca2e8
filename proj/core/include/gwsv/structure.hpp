#pragma once

#include <cstdint>
#include <string>

#include "gwsv/gwishart.hpp"

namespace gwsv {

// Independent Bernoulli(q) prior over edges; q = 1/2 is uniform over graphs.
struct GraphPrior {
  double edge_probability = 0.5;
  // log prior ratio for adding one edge
  double log_odds() const;
};

enum class SamplerKind { CL, WL };

SamplerKind sampler_from_name(const std::string& name);
const char* sampler_name(SamplerKind s);

// Complete-subgraph cover driving the clique Gibbs stage.  Maximal cliques
// mix best; the edge cover bounds per-clique cost on very dense graphs.
enum class CliqueCover { maximal, edges };

CliqueCover cover_from_name(const std::string& name);
CliqueSet build_cover(const Graph& g, CliqueCover cover);

// I(b, c) = c^{-b/2} 2^{b/2} Gamma(b/2), the marginal over a single free
// diagonal element (its shifted value integrates a Gamma kernel).
double log_factor_i(double b, double c);
double factor_i(double b, double c);

// J(h, B, b) = (2 pi / B22)^{1/2} b^{(h-1)/2} I(h, B22)
//              exp(-(b/2) [B11 - B12^2 / B22]),
// the marginal over a free (off-diagonal, diagonal) pair given the leading
// Schur-complement entry b.
double log_factor_j(double h, const Eigen::Matrix2d& b_mat, double b);
double factor_j(double h, const Eigen::Matrix2d& b_mat, double b);

// Ratio of the two conditional marginals of the matrix-space move for edge
// e = (i, j) given everything but (K_ij, K_jj): value with the edge ABSENT
// over value with it PRESENT, at weight parameter d and scale S.  Computed
// from I, J, the determinants |K0_{V\j}| and |K1_{V\e}| and the inner
// product <S, K0 - K1>, where K0 pins the jj Schur complement at zero with
// K_ij = 0 and K1 pins the 2x2 Schur complement of e at zero.
double log_factor_h(double d, int i, int j, const Matrix& k, const Matrix& s,
                    OpCounters* counters = nullptr);
double factor_h(double d, int i, int j, const Matrix& k, const Matrix& s,
                OpCounters* counters = nullptr);

// Cholesky-space analogue for the edge at positions (p-2, p-1), given the
// factor with its last two free entries removed:
//   N = phi(p-2,p-2) (2 pi / S_pp)^{1/2} exp(S_pp (phi0 - m)^2 / 2)
// where m = -phi(p-2,p-2) S_{p-1,p} / S_pp is the conditional mean of the
// (p-2, p-1) entry when free and phi0 is its deterministic completion value
// when absent.  This is the PRESENT-over-ABSENT ratio: the marginal with the
// edge integrates a Gaussian kernel, the one without evaluates it at phi0.
// Only columns p-2 and p-1 of phi and entries S(p-2,p-1), S(p-1,p-1) enter.
double log_factor_n(const Matrix& phi, const Matrix& s);
double factor_n(const Matrix& phi, const Matrix& s);

// One Cholesky-space edge move: permute the system so e sits at (p-2, p-1)
// with minimum fill on the rest, decide the move from the posterior-side N
// factor, estimate the intractable prior-constant ratio with one identity-
// scale RWMH step toward the proposed graph, then resample the two moving
// factor entries from their conditionals and unpermute.  Requires the
// identity prior scale.  Performs no solves of (p-1)- or (p-2)-dimensional
// systems.
void cl_edge_move(ChainState& state, int i, int j, double delta_post,
                  const Matrix& d_star, double delta_prior,
                  const GraphPrior& gp, Rng& rng,
                  OpCounters* counters = nullptr);

// Matrix-space edge move: decide the move from the posterior-side H factor,
// build the auxiliary matrix by resampling (K_ij, K_jj) under the proposed
// graph's prior followed by one full clique sweep, evaluate the prior-side
// H factor at it, then resample (K_ij, K_jj) from their posterior
// conditionals under the accepted graph.
void wl_edge_move(ChainState& state, int i, int j, double delta_post,
                  const Matrix& d_star, double delta_prior,
                  const Matrix& d_prior, const GraphPrior& gp, Rng& rng,
                  OpCounters* counters = nullptr,
                  CliqueCover cover = CliqueCover::maximal);

// Resample (K_ij, K_jj) from their exact conditionals given the rest of K
// at weight d and scale S: a Gamma draw for the free Schur complement plus,
// when the edge is present, a Gaussian draw for the off-diagonal entry.
// Used for the WL auxiliary construction and for its step-c refresh.
void resample_edge_entries(Matrix& k, bool edge_present, int i, int j,
                           double d, const Matrix& s, Rng& rng,
                           OpCounters* counters = nullptr);

// Steps every unordered pair once (lexicographic order) with the chosen
// move, then runs one full clique Gibbs sweep under the updated graph.
void posterior_sweep(ChainState& state, SamplerKind sampler, double delta_post,
                     const Matrix& d_star, double delta_prior,
                     const Matrix& d_prior, const GraphPrior& gp, Rng& rng,
                     OpCounters* counters = nullptr,
                     CliqueCover cover = CliqueCover::maximal);

struct ChainResult {
  Matrix edge_probs;   // inclusion frequencies, unit diagonal
  Matrix k_mean;       // model-averaged posterior mean of K
  double seconds = 0;  // wall clock for the sampling loop
  OpCounters counters;
  long iters = 0;
  long burnin = 0;
};

// Full posterior run on scatter matrix u with effective sample size n:
// builds D* = D + u, starts from (I, empty graph) and repeats
// posterior_sweep, accumulating edge inclusion frequencies and the mean of
// K over the kept iterations.  Identical seeds give identical results.
ChainResult run_chain(const Matrix& u, double n, double delta,
                      const Matrix& d_prior, const GraphPrior& gp,
                      SamplerKind sampler, long iters, long burnin,
                      std::uint64_t seed,
                      CliqueCover cover = CliqueCover::maximal);

}  // namespace gwsv
