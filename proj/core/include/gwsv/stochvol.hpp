#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwsv/structure.hpp"

namespace gwsv {

// Hierarchical model for T days of p mean-zero returns:
//   Y_t ~ N_p(0, exp(X_t) K^{-1})
//   X_t ~ N(phi X_{t-1}, 1/tau),  X_0 = 0
//   phi ~ N(0, tau0)   (tau0 is a variance)
//   tau ~ Gamma(a, b)
//   K   ~ identity-scale prior with weight delta, zeros off G
//   G   ~ independent Bernoulli(edge_probability) edges
struct SVHyper {
  double tau0 = 1.0;
  double a = 1.0;
  double b = 1.0;
  double delta = 3.0;
  double edge_probability = 0.5;
  bool truncate_phi = false;  // optionally restrict phi to (-1, 1)
};

struct SVState {
  Vector x;  // log-volatility, one entry per day (X_0 = 0 is implicit)
  double phi = 0.0;
  double tau = 1.0;
  Matrix k;
  Graph g;
};

SVState initial_sv_state(int t, int p);

// log of the full conditional of a single X_t (up to a constant):
//   -(p/2) x - e^{-x} q_t / 2 - tau (x - phi x_prev)^2 / 2
//   - tau (x_next - phi x)^2 / 2          (last term absent on the final day)
// where q_t = Y_t' K Y_t.
double x_log_conditional(double x, double q_t, int p, double tau, double phi,
                         double x_prev, bool has_next, double x_next);

// Single-site random-walk MH pass over X_1..X_T with Normal(x, step^2)
// proposals.  Returns the number of accepted sites.
int update_x(SVState& state, const Matrix& y, const SVHyper& hyper,
             double step, Rng& rng);

// Exact conjugate draw: phi | rest ~ N(m, v) with
// v = (1/tau0 + tau sum x_{t-1}^2)^{-1}, m = v tau sum x_{t-1} x_t.
void update_phi(SVState& state, const SVHyper& hyper, Rng& rng);

// Exact conjugate draw: tau | rest ~ Gamma(a + T/2, b + sum (x_t - phi x_{t-1})^2 / 2).
void update_tau(SVState& state, const SVHyper& hyper, Rng& rng);

// Joint (K, G) refresh through one Cholesky-space structure sweep with
// scale D* = I + sum_t Y_t Y_t' / exp(X_t) and weight delta + T.
void update_k_g(SVState& state, const Matrix& y, const SVHyper& hyper,
                Rng& rng, OpCounters* counters = nullptr);

// slim retained posterior draw, enough to form one-day-ahead predictions
struct SVDraw {
  double phi = 0.0;
  double tau = 1.0;
  double x_last = 0.0;
  Matrix k;
};

struct SVFitOptions {
  long iters = 5000;
  long burnin = 1000;
  int max_draws = 2000;  // retained states are thinned to at most this many
  bool fixed_vol = false;
  double step0 = 0.5;
  std::uint64_t seed = 1;
};

struct SVFit {
  std::vector<SVDraw> draws;
  Vector x_mean;      // posterior mean of the latent path
  Matrix edge_probs;  // edge inclusion frequencies
  double x_accept_rate = 0.0;
  double step = 0.0;  // step size after burn-in adaptation
  SVState last;
};

// Runs the full Gibbs/MH scheme (X sites, phi, tau, then (K, G)), adapting
// the X step size toward 0.35 acceptance during burn-in only.  With
// fixed_vol the latent path is pinned at zero and only (K, G) is sampled,
// which reduces the model to the static one on the plain scatter matrix.
SVFit fit_sv(const Matrix& y, const SVHyper& hyper, const SVFitOptions& opts,
             const SVState* warm_start = nullptr);

// One-day-ahead sampling: for draws cycled from the retained states,
// X_next ~ N(phi x_last, 1/tau) (zero when fixed_vol) and
// Y_next ~ N_p(0, exp(X_next) K^{-1}).  Returns an m x p matrix; x_next_mean,
// when given, receives the average sampled X_next.
Matrix posterior_predictive(const std::vector<SVDraw>& draws, int m,
                            bool fixed_vol, Rng& rng,
                            double* x_next_mean = nullptr);

struct ReturnsSeries {
  std::vector<std::string> dates;
  Matrix y;  // T x p log-returns
};

struct ForecastOptions {
  long iters = 5000;
  long burnin = 1000;
  int draws = 500;
  std::uint64_t seed = 1;
  bool fixed_vol = false;
  int jobs = 1;
  bool warm_start = false;  // reuse the previous day's final state (serial)
};

struct DayForecast {
  std::string date;
  Matrix draws;  // draws x p predictive returns
  double x_next_mean = 0.0;
};

// For each day index t in [first_day, last_day] fits the model on rows
// [0, t) and emits the one-day-ahead predictive sample for day t.  Days are
// independent given their data prefix; the per-day stream is seeded with
// seed + t, so results do not depend on the number of jobs.
std::vector<DayForecast> rolling_forecast(const ReturnsSeries& series,
                                          const SVHyper& hyper, int first_day,
                                          int last_day,
                                          const ForecastOptions& opts);

}  // namespace gwsv
