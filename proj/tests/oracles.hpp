// Test-only reference computations: closed-form normalizing constants,
// Kolmogorov-Smirnov checks, quadrature over the unnormalized kernels and
// small brute-force graph searches.  Everything here is independent of the
// sampler code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "gwsv/gwishart.hpp"
#include "gwsv/linalg.hpp"

namespace oracles {

using gwsv::Graph;
using gwsv::Matrix;
using gwsv::Vector;

// ---------------------------------------------------------------- KS test --

inline double ks_statistic(std::vector<double> draws,
                           const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// asymptotic critical value at level 0.01
inline bool ks_pass_01(const std::vector<double>& draws,
                       const std::function<double(double)>& cdf) {
  const double d = ks_statistic(draws, cdf);
  return d < 1.6276 / std::sqrt(static_cast<double>(draws.size()));
}

inline std::function<double(double)> gamma_cdf(double shape, double rate) {
  boost::math::gamma_distribution<double> dist(shape, 1.0 / rate);
  return [dist](double x) { return x <= 0 ? 0.0 : boost::math::cdf(dist, x); };
}

inline std::function<double(double)> chi2_cdf(double df) {
  boost::math::chi_squared_distribution<double> dist(df);
  return [dist](double x) { return x <= 0 ? 0.0 : boost::math::cdf(dist, x); };
}

inline std::function<double(double)> normal_cdf(double mean, double sd) {
  boost::math::normal_distribution<double> dist(mean, sd);
  return [dist](double x) { return boost::math::cdf(dist, x); };
}

// ------------------------------------------------------- summary statistics --

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double se_of_mean(const std::vector<double>& v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// standard error of the mean of a correlated series via batch means
inline double batch_se(const std::vector<double>& v, int batches = 50) {
  const std::size_t b = v.size() / batches;
  std::vector<double> bm;
  for (int k = 0; k < batches; ++k) {
    double s = 0.0;
    for (std::size_t i = k * b; i < (k + 1) * b; ++i) s += v[i];
    bm.push_back(s / static_cast<double>(b));
  }
  return std::sqrt(variance(bm) / batches);
}

// -------------------------------------- closed-form normalizing constants --

// log of integral over PD matrices of |K|^{(delta-2)/2} exp(-<K,D>/2)
// for the complete graph (standard Wishart constant, df = delta + p - 1)
inline double log_ig_complete(double delta, const Matrix& d) {
  const int p = static_cast<int>(d.rows());
  const double nu = delta + p - 1;
  double log_det = 0.0;
  {
    const Matrix phi = gwsv::cholesky_upper(d);
    for (int i = 0; i < p; ++i) log_det += 2.0 * std::log(phi(i, i));
  }
  double log_gamma_p = 0.25 * p * (p - 1) * std::log(M_PI);
  for (int i = 0; i < p; ++i) log_gamma_p += std::lgamma(0.5 * (nu - i));
  return 0.5 * nu * p * std::log(2.0) - 0.5 * nu * log_det + log_gamma_p;
}

// same integral restricted to diagonal matrices (empty graph)
inline double log_ig_empty(double delta, const Matrix& d) {
  double out = 0.0;
  for (int i = 0; i < d.rows(); ++i) {
    out += -0.5 * delta * std::log(d(i, i)) + 0.5 * delta * std::log(2.0) +
           std::lgamma(0.5 * delta);
  }
  return out;
}

// exact posterior inclusion probability of the single possible edge at p = 2
inline double p2_edge_posterior(double delta, double n, const Matrix& u,
                                const Matrix& d_prior, double q) {
  const Matrix d_star = d_prior + u;
  const double log_r =
      (log_ig_complete(delta + n, d_star) - log_ig_complete(delta, d_prior)) -
      (log_ig_empty(delta + n, d_star) - log_ig_empty(delta, d_prior));
  const double log_odds = log_r + std::log(q) - std::log(1.0 - q);
  return 1.0 / (1.0 + std::exp(-log_odds));
}

// -------------------------------------------------------------- quadrature --

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double simpson2d(const std::function<double(double, double)>& f,
                        double ax, double bx, double ay, double by, int n) {
  return simpson(
      [&](double x) {
        return simpson([&](double y) { return f(x, y); }, ay, by, n);
      },
      ax, bx, n);
}

// ------------------------------------------------------ brute-force graphs --

// maximal cliques by exhaustive subset check (p <= ~16)
inline std::vector<std::vector<int>> brute_force_maximal_cliques(
    const Graph& g) {
  const int p = g.size();
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<int> nodes;
    for (int v = 0; v < p; ++v)
      if (mask & (1u << v)) nodes.push_back(v);
    if (!g.is_complete_subset(nodes)) continue;
    bool maximal = true;
    for (int v = 0; v < p && maximal; ++v) {
      if (mask & (1u << v)) continue;
      std::vector<int> bigger = nodes;
      bigger.push_back(v);
      if (g.is_complete_subset(bigger)) maximal = false;
    }
    if (maximal) out.push_back(nodes);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// random graph with independent edges
inline Graph random_graph(int p, double q, gwsv::Rng& rng) {
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (rng.uniform() < q) g.add_edge(i, j);
  return g;
}

// random positive definite matrix with exact zeros off g
inline Matrix random_pd_in_pattern(const Graph& g, gwsv::Rng& rng) {
  const int p = g.size();
  Matrix m = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    m(i, i) = 1.0 + rng.uniform();
    for (int j = i + 1; j < p; ++j) {
      if (g.has_edge(i, j)) m(i, j) = m(j, i) = rng.normal(0.0, 0.4);
    }
  }
  // diagonal dominance keeps it PD without touching the pattern
  for (int i = 0; i < p; ++i) {
    double row = 0.0;
    for (int j = 0; j < p; ++j)
      if (j != i) row += std::abs(m(i, j));
    m(i, i) += row;
  }
  return m;
}

}  // namespace oracles
