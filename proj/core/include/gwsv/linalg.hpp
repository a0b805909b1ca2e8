#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "gwsv/graph.hpp"
#include "gwsv/rng.hpp"

namespace gwsv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Work attributed to the two stages of a structure-learning sweep.  The
// edge-move stage is where the samplers differ; the clique resampling stage
// is shared.  "Large" means a factorization of a system of dimension p-1 or
// p-2 relative to the state dimension.
struct OpCounters {
  std::uint64_t edge_large_solves = 0;
  std::uint64_t edge_moves_attempted = 0;
  std::uint64_t edge_moves_accepted = 0;
  std::uint64_t full_choleskys = 0;
  std::uint64_t gibbs_clique_updates = 0;
  std::uint64_t gibbs_large_solves = 0;
};

// copies the upper triangle onto the lower one
void symmetrize(Matrix& m);

bool is_symmetric(const Matrix& m);

// Upper-triangular factor with phi' * phi reproducing the source matrix,
// plus the sparsity pattern of its off-diagonal entries.
struct CholeskyFactor {
  Matrix phi;
  Graph fill;
};

// Row-by-row upper Cholesky.  Throws NumericError on a non-positive pivot;
// no regularization is ever applied.  Exact zero entries of the input
// propagate to exact zeros of the factor wherever elimination creates no
// fill, so the factor of a matrix in P_G has support inside the fill graph.
Matrix cholesky_upper(const Matrix& k);

// cholesky_upper plus the pattern of nonzero off-diagonal entries
CholeskyFactor cholesky(const Matrix& k);

// Fills the entries of phi at positions in fill \ g (i < j) with
//   phi(i,j) = -(1/phi(i,i)) * sum_{l<i} phi(l,i) phi(l,j),
// the unique values making (phi'phi)(i,j) = 0 off g.  Free entries (diagonal
// and positions in g) must already be set.
void complete_phi(Matrix& phi, const Graph& g, const Graph& fill);
CholeskyFactor complete_phi(const CholeskyFactor& phi_free, const Graph& g,
                            const Graph& fill);

// phi'phi with entries off g (and off the diagonal) written as exact zeros
Matrix phi_to_precision(const Matrix& phi, const Graph& g);

// simultaneous row/column reindexing: out(perm(a), perm(b)) = m(a, b)
Matrix permute_sym(const Matrix& m, const Permutation& perm);

// Draw from the density proportional to |W|^{(delta-2)/2} exp(-<W, D_C>/2)
// on positive definite matrices of the dimension of D_C.  In the usual
// degrees-of-freedom/scale convention this is a Wishart with
// df = delta + dim - 1 and scale D_C^{-1}; see the README for the mapping.
Matrix sample_wishart(double delta, const Matrix& d_c, Rng& rng);

}  // namespace gwsv
