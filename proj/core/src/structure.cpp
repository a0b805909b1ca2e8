#include "gwsv/structure.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "gwsv/errors.hpp"

namespace gwsv {

namespace {

const double kLog2Pi = std::log(2.0 * M_PI);

std::vector<int> complement(int p, int i, int j) {
  std::vector<int> rest;
  rest.reserve(p - 2);
  for (int v = 0; v < p; ++v)
    if (v != i && v != j) rest.push_back(v);
  return rest;
}

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  double out = 0.0;
  const auto& l = llt.matrixLLT();
  for (int i = 0; i < l.rows(); ++i) out += std::log(l(i, i));
  return 2.0 * out;
}

struct EdgeMarginals {
  Eigen::Matrix2d m2;     // 2x2 Schur shift for the (i, j) block
  double a11 = 0.0;       // k(i,i) - m2(0,0)
  double m0 = 0.0;        // jj Schur shift with k(i,j) pinned at zero
  double log_det_rest = 0.0;  // log |K_{V \ {i,j}}|
  double log_det_vj = 0.0;    // log |K_{V \ j}|
};

// The shared linear algebra behind the matrix-space edge factors and the
// conditional resampling of (K_ij, K_jj).  Factorizes K on V\{i,j} and on
// V\{j}; both count as large solves.
EdgeMarginals edge_marginals(const Matrix& k, int i, int j,
                             OpCounters* counters) {
  const int p = static_cast<int>(k.rows());
  EdgeMarginals em;
  em.m2.setZero();
  const std::vector<int> rest = complement(p, i, j);
  if (!rest.empty()) {
    const int r = static_cast<int>(rest.size());
    Matrix k_rest(r, r);
    Matrix k_re(r, 2);
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) k_rest(a, b) = k(rest[a], rest[b]);
      k_re(a, 0) = k(rest[a], i);
      k_re(a, 1) = k(rest[a], j);
    }
    Eigen::LLT<Matrix> llt(k_rest);
    if (llt.info() != Eigen::Success)
      throw NumericError("edge move: K on V\\{i,j} not positive definite");
    if (counters) ++counters->edge_large_solves;
    em.m2 = k_re.transpose() * llt.solve(k_re);
    em.log_det_rest = log_det_from_llt(llt);
  }
  em.a11 = k(i, i) - em.m2(0, 0);
  if (!(em.a11 > 0.0))
    throw NumericError("edge move: nonpositive Schur complement");

  const int q = p - 1;
  Matrix k_vj(q, q);
  Vector r_j(q);
  {
    int a = 0;
    for (int v = 0; v < p; ++v) {
      if (v == j) continue;
      r_j(a) = (v == i) ? 0.0 : k(v, j);  // edge entry pinned at zero
      int b = 0;
      for (int w = 0; w < p; ++w) {
        if (w == j) continue;
        k_vj(a, b) = k(v, w);
        ++b;
      }
      ++a;
    }
  }
  Eigen::LLT<Matrix> llt_j(k_vj);
  if (llt_j.info() != Eigen::Success)
    throw NumericError("edge move: K on V\\{j} not positive definite");
  if (counters) ++counters->edge_large_solves;
  em.m0 = r_j.dot(llt_j.solve(r_j));
  em.log_det_vj = log_det_from_llt(llt_j);
  return em;
}

}  // namespace

double GraphPrior::log_odds() const {
  return std::log(edge_probability) - std::log(1.0 - edge_probability);
}

SamplerKind sampler_from_name(const std::string& name) {
  if (name == "cl") return SamplerKind::CL;
  if (name == "wl") return SamplerKind::WL;
  throw ConfigError("unknown sampler '" + name + "' (expected cl or wl)");
}

const char* sampler_name(SamplerKind s) {
  return s == SamplerKind::CL ? "cl" : "wl";
}

CliqueCover cover_from_name(const std::string& name) {
  if (name == "maximal") return CliqueCover::maximal;
  if (name == "edges") return CliqueCover::edges;
  throw ConfigError("unknown clique cover '" + name + "' (expected maximal or edges)");
}

CliqueSet build_cover(const Graph& g, CliqueCover cover) {
  return cover == CliqueCover::maximal ? maximal_cliques(g) : edge_cover_cliques(g);
}

double log_factor_i(double b, double c) {
  if (!(b > 0.0) || !(c > 0.0))
    throw NumericError("factor I requires positive arguments");
  return -0.5 * b * std::log(c) + 0.5 * b * std::log(2.0) + std::lgamma(0.5 * b);
}

double factor_i(double b, double c) { return std::exp(log_factor_i(b, c)); }

double log_factor_j(double h, const Eigen::Matrix2d& b_mat, double b) {
  if (!(b_mat(1, 1) > 0.0) || !(b > 0.0))
    throw NumericError("factor J requires positive B22 and b");
  return 0.5 * (kLog2Pi - std::log(b_mat(1, 1))) + 0.5 * (h - 1.0) * std::log(b) +
         log_factor_i(h, b_mat(1, 1)) -
         0.5 * b * (b_mat(0, 0) - b_mat(0, 1) * b_mat(0, 1) / b_mat(1, 1));
}

double factor_j(double h, const Eigen::Matrix2d& b_mat, double b) {
  return std::exp(log_factor_j(h, b_mat, b));
}

double log_factor_h(double d, int i, int j, const Matrix& k, const Matrix& s,
                    OpCounters* counters) {
  if (i > j) std::swap(i, j);
  const EdgeMarginals em = edge_marginals(k, i, j, counters);
  Eigen::Matrix2d s_ee;
  s_ee << s(i, i), s(i, j), s(i, j), s(j, j);
  // <S, K0 - K1> over the three entries where the two pinned matrices differ
  const double trace_term = s(i, i) * em.a11 - 2.0 * s(i, j) * em.m2(0, 1) +
                            s(j, j) * (em.m0 - em.m2(1, 1));
  return log_factor_i(d, s(j, j)) - log_factor_j(d, s_ee, em.a11) +
         0.5 * (d - 2.0) * (em.log_det_vj - em.log_det_rest) - 0.5 * trace_term;
}

double factor_h(double d, int i, int j, const Matrix& k, const Matrix& s,
                OpCounters* counters) {
  return std::exp(log_factor_h(d, i, j, k, s, counters));
}

namespace {

// completion value the fill rule would assign at (p-2, p-1)
double completion_value(const Matrix& phi) {
  const int p = static_cast<int>(phi.rows());
  double cross = 0.0;
  for (int l = 0; l + 2 < p; ++l) cross += phi(l, p - 2) * phi(l, p - 1);
  return -cross / phi(p - 2, p - 2);
}

}  // namespace

double log_factor_n(const Matrix& phi, const Matrix& s) {
  const int p = static_cast<int>(phi.rows());
  const double s_pp = s(p - 1, p - 1);
  if (!(s_pp > 0.0)) throw NumericError("factor N requires S_pp > 0");
  const double phi0 = completion_value(phi);
  const double mu = phi(p - 2, p - 2) * s(p - 2, p - 1) / s_pp;
  // conditional mean of the free entry is -mu, so the Gaussian kernel
  // evaluated at the completion value contributes (phi0 + mu)^2
  return std::log(phi(p - 2, p - 2)) + 0.5 * (kLog2Pi - std::log(s_pp)) +
         0.5 * s_pp * (phi0 + mu) * (phi0 + mu);
}

double factor_n(const Matrix& phi, const Matrix& s) {
  return std::exp(log_factor_n(phi, s));
}

void cl_edge_move(ChainState& state, int i, int j, double delta_post,
                  const Matrix& d_star, double delta_prior,
                  const GraphPrior& gp, Rng& rng, OpCounters* counters) {
  if (i > j) std::swap(i, j);
  const int p = static_cast<int>(state.k.rows());
  const int a = p - 2, b = p - 1;

  const Permutation theta = edge_permutation(state.g, i, j);
  Graph g_perm = state.g.permuted(theta);
  Matrix kp = permute_sym(state.k, theta);
  const Matrix sp = permute_sym(d_star, theta);

  Matrix phi = cholesky_upper(kp);
  if (counters) ++counters->full_choleskys;

  const double phi0 = completion_value(phi);
  const double mu = phi(a, a) * sp(a, b) / sp(b, b);
  const double log_n_post = std::log(phi(a, a)) +
                            0.5 * (kLog2Pi - std::log(sp(b, b))) +
                            0.5 * sp(b, b) * (phi0 + mu) * (phi0 + mu);

  bool has = g_perm.has_edge(a, b);
  const double log_move =
      has ? -gp.log_odds() - log_n_post : gp.log_odds() + log_n_post;
  if (std::log(rng.uniform()) < log_move) {
    if (counters) ++counters->edge_moves_attempted;
    const Graph g_prime =
        has ? g_perm.without_edge(a, b) : g_perm.with_edge(a, b);
    const Graph fill_prime = fill_in_graph(g_prime, Permutation::identity(p));
    // one identity-scale RWMH step toward the proposed graph's prior stands
    // in for the ratio of prior normalizing constants
    Matrix psi = phi;
    rwmh_prior_step(psi, g_prime, fill_prime, delta_prior, rng);
    const double phi0_aux = completion_value(psi);
    const double log_n_prior =
        std::log(psi(a, a)) + 0.5 * kLog2Pi + 0.5 * phi0_aux * phi0_aux;
    const double log_alpha = has ? log_n_prior : -log_n_prior;
    if (std::log(rng.uniform()) < log_alpha) {
      g_perm = g_prime;
      has = !has;
      if (counters) ++counters->edge_moves_accepted;
    }
  }

  // refresh the two moving entries of the factor under the final graph
  if (has) {
    phi(a, b) = rng.normal(-mu, 1.0 / std::sqrt(sp(b, b)));
  } else {
    phi(a, b) = phi0;
  }
  phi(b, b) = std::sqrt(rng.gamma(0.5 * delta_post, 0.5 * sp(b, b)));

  // only K(a,b) and K(b,b) move; write them back and unpermute
  if (has) {
    double cross = 0.0;
    for (int l = 0; l < a; ++l) cross += phi(l, a) * phi(l, b);
    kp(a, b) = kp(b, a) = cross + phi(a, a) * phi(a, b);
  } else {
    kp(a, b) = kp(b, a) = 0.0;
  }
  double diag = 0.0;
  for (int l = 0; l <= b; ++l) diag += phi(l, b) * phi(l, b);
  kp(b, b) = diag;

  const Permutation inv = theta.inverse();
  state.k = permute_sym(kp, inv);
  state.g = g_perm.permuted(inv);
}

void resample_edge_entries(Matrix& k, bool edge_present, int i, int j,
                           double d, const Matrix& s, Rng& rng,
                           OpCounters* counters) {
  if (i > j) std::swap(i, j);
  const int p = static_cast<int>(k.rows());
  if (edge_present) {
    Eigen::Matrix2d m2;
    m2.setZero();
    const std::vector<int> rest = complement(p, i, j);
    if (!rest.empty()) {
      const int r = static_cast<int>(rest.size());
      Matrix k_rest(r, r);
      Matrix k_re(r, 2);
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) k_rest(a, b) = k(rest[a], rest[b]);
        k_re(a, 0) = k(rest[a], i);
        k_re(a, 1) = k(rest[a], j);
      }
      Eigen::LLT<Matrix> llt(k_rest);
      if (llt.info() != Eigen::Success)
        throw NumericError("resample: K on V\\{i,j} not positive definite");
      if (counters) ++counters->edge_large_solves;
      m2 = k_re.transpose() * llt.solve(k_re);
    }
    const double a11 = k(i, i) - m2(0, 0);
    if (!(a11 > 0.0)) throw NumericError("resample: nonpositive Schur complement");
    const double a12 =
        rng.normal(-a11 * s(i, j) / s(j, j), std::sqrt(a11 / s(j, j)));
    const double u = rng.gamma(0.5 * d, 0.5 * s(j, j));
    k(i, j) = k(j, i) = m2(0, 1) + a12;
    k(j, j) = m2(1, 1) + u + a12 * a12 / a11;
  } else {
    k(i, j) = k(j, i) = 0.0;
    double m0 = 0.0;
    const int q = p - 1;
    if (q > 0) {
      Matrix k_vj(q, q);
      Vector r_j(q);
      int a = 0;
      for (int v = 0; v < p; ++v) {
        if (v == j) continue;
        r_j(a) = k(v, j);
        int bcol = 0;
        for (int w = 0; w < p; ++w) {
          if (w == j) continue;
          k_vj(a, bcol) = k(v, w);
          ++bcol;
        }
        ++a;
      }
      Eigen::LLT<Matrix> llt(k_vj);
      if (llt.info() != Eigen::Success)
        throw NumericError("resample: K on V\\{j} not positive definite");
      if (counters) ++counters->edge_large_solves;
      m0 = r_j.dot(llt.solve(r_j));
    }
    const double u = rng.gamma(0.5 * d, 0.5 * s(j, j));
    k(j, j) = m0 + u;
  }
}

void wl_edge_move(ChainState& state, int i, int j, double delta_post,
                  const Matrix& d_star, double delta_prior,
                  const Matrix& d_prior, const GraphPrior& gp, Rng& rng,
                  OpCounters* counters, CliqueCover cover) {
  if (i > j) std::swap(i, j);
  bool has = state.g.has_edge(i, j);
  // the H factor is the absent-over-present ratio, so the move odds toward
  // the edge carry it negated
  const double log_h_post =
      log_factor_h(delta_post, i, j, state.k, d_star, counters);
  const double log_move =
      has ? -gp.log_odds() + log_h_post : gp.log_odds() - log_h_post;
  if (std::log(rng.uniform()) < log_move) {
    if (counters) ++counters->edge_moves_attempted;
    const Graph g_prime = has ? state.g.without_edge(i, j) : state.g.with_edge(i, j);
    // auxiliary draw: refresh the moving entries under the proposed graph's
    // prior, then one full clique sweep under that prior
    ChainState aux{state.k, g_prime};
    resample_edge_entries(aux.k, !has, i, j, delta_prior, d_prior, rng,
                          counters);
    const CliqueSet cliques = build_cover(g_prime, cover);
    OpCounters aux_counters;
    block_gibbs_sweep(aux, delta_prior, d_prior, cliques, rng,
                      counters ? &aux_counters : nullptr);
    if (counters) {
      counters->edge_large_solves += aux_counters.gibbs_large_solves;
      counters->gibbs_clique_updates += aux_counters.gibbs_clique_updates;
    }
    const double log_h_prior =
        log_factor_h(delta_prior, i, j, aux.k, d_prior, counters);
    const double log_alpha = has ? -log_h_prior : log_h_prior;
    if (std::log(rng.uniform()) < log_alpha) {
      state.g = g_prime;
      has = !has;
      if (counters) ++counters->edge_moves_accepted;
    }
  }
  resample_edge_entries(state.k, has, i, j, delta_post, d_star, rng, counters);
}

void posterior_sweep(ChainState& state, SamplerKind sampler, double delta_post,
                     const Matrix& d_star, double delta_prior,
                     const Matrix& d_prior, const GraphPrior& gp, Rng& rng,
                     OpCounters* counters, CliqueCover cover) {
  const int p = static_cast<int>(state.k.rows());
  if (sampler == SamplerKind::CL &&
      !d_prior.isApprox(Matrix::Identity(p, p), 0.0)) {
    throw ConfigError("the Cholesky-space sampler requires the identity prior scale");
  }
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (sampler == SamplerKind::CL) {
        cl_edge_move(state, i, j, delta_post, d_star, delta_prior, gp, rng,
                     counters);
      } else {
        wl_edge_move(state, i, j, delta_post, d_star, delta_prior, d_prior, gp,
                     rng, counters, cover);
      }
    }
  }
  const CliqueSet cliques = build_cover(state.g, cover);
  block_gibbs_sweep(state, delta_post, d_star, cliques, rng, counters);
}

ChainResult run_chain(const Matrix& u, double n, double delta,
                      const Matrix& d_prior, const GraphPrior& gp,
                      SamplerKind sampler, long iters, long burnin,
                      std::uint64_t seed, CliqueCover cover) {
  const int p = static_cast<int>(u.rows());
  if (u.cols() != p) throw ConfigError("run_chain: scatter matrix not square");
  if (d_prior.rows() != p || d_prior.cols() != p)
    throw ConfigError("run_chain: prior scale dimension mismatch");
  if (iters <= burnin || burnin < 0)
    throw ConfigError("run_chain: need iters > burnin >= 0");
  if (!(delta > 2.0)) throw ConfigError("run_chain: delta must exceed 2");
  if (!(n > 0.0)) throw ConfigError("run_chain: sample size must be positive");
  if (!(gp.edge_probability >= 0.0 && gp.edge_probability <= 1.0))
    throw ConfigError("run_chain: edge prior outside [0, 1]");

  Matrix d_star = d_prior + u;
  symmetrize(d_star);
  const double delta_post = delta + n;

  ChainState state = initial_chain_state(p);
  Rng rng(seed);
  ChainResult res;
  res.iters = iters;
  res.burnin = burnin;
  Matrix edge_acc = Matrix::Zero(p, p);
  Matrix k_acc = Matrix::Zero(p, p);

  const auto t0 = std::chrono::steady_clock::now();
  for (long it = 0; it < iters; ++it) {
    posterior_sweep(state, sampler, delta_post, d_star, delta, d_prior, gp,
                    rng, &res.counters, cover);
    if (it >= burnin) {
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
          if (state.g.has_edge(i, j)) {
            edge_acc(i, j) += 1.0;
            edge_acc(j, i) += 1.0;
          }
      k_acc += state.k;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  res.seconds = std::chrono::duration<double>(t1 - t0).count();

  const double kept = static_cast<double>(iters - burnin);
  res.edge_probs = edge_acc / kept;
  for (int i = 0; i < p; ++i) res.edge_probs(i, i) = 1.0;
  res.k_mean = k_acc / kept;
  return res;
}

}  // namespace gwsv
