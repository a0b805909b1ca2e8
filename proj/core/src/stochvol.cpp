#include "gwsv/stochvol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gwsv/errors.hpp"

namespace gwsv {

SVState initial_sv_state(int t, int p) {
  SVState s;
  s.x = Vector::Zero(t);
  s.k = Matrix::Identity(p, p);
  s.g = Graph(p);
  return s;
}

double x_log_conditional(double x, double q_t, int p, double tau, double phi,
                         double x_prev, bool has_next, double x_next) {
  double out = -0.5 * p * x - 0.5 * std::exp(-x) * q_t;
  const double d_prev = x - phi * x_prev;
  out -= 0.5 * tau * d_prev * d_prev;
  if (has_next) {
    const double d_next = x_next - phi * x;
    out -= 0.5 * tau * d_next * d_next;
  }
  return out;
}

int update_x(SVState& state, const Matrix& y, const SVHyper&, double step,
             Rng& rng) {
  const int t_len = static_cast<int>(state.x.size());
  const int p = static_cast<int>(y.cols());
  // Y_t' K Y_t for every day; K is fixed during this pass
  const Vector q = ((y * state.k).cwiseProduct(y)).rowwise().sum();
  int accepted = 0;
  for (int t = 0; t < t_len; ++t) {
    const double x_prev = (t == 0) ? 0.0 : state.x(t - 1);
    const bool has_next = t + 1 < t_len;
    const double x_next = has_next ? state.x(t + 1) : 0.0;
    const double cur = state.x(t);
    const double prop = cur + step * rng.normal();
    const double log_ratio =
        x_log_conditional(prop, q(t), p, state.tau, state.phi, x_prev,
                          has_next, x_next) -
        x_log_conditional(cur, q(t), p, state.tau, state.phi, x_prev, has_next,
                          x_next);
    if (std::log(rng.uniform()) < log_ratio) {
      state.x(t) = prop;
      ++accepted;
    }
  }
  return accepted;
}

void update_phi(SVState& state, const SVHyper& hyper, Rng& rng) {
  const int t_len = static_cast<int>(state.x.size());
  double sum_sq = 0.0, sum_cross = 0.0;
  for (int t = 0; t < t_len; ++t) {
    const double x_prev = (t == 0) ? 0.0 : state.x(t - 1);
    sum_sq += x_prev * x_prev;
    sum_cross += x_prev * state.x(t);
  }
  const double v = 1.0 / (1.0 / hyper.tau0 + state.tau * sum_sq);
  const double m = v * state.tau * sum_cross;
  double draw = rng.normal(m, std::sqrt(v));
  if (hyper.truncate_phi) {
    for (int tries = 0; std::abs(draw) >= 1.0 && tries < 1000; ++tries) {
      draw = rng.normal(m, std::sqrt(v));
    }
    if (std::abs(draw) >= 1.0) draw = std::copysign(0.999, draw);
  }
  state.phi = draw;
}

void update_tau(SVState& state, const SVHyper& hyper, Rng& rng) {
  const int t_len = static_cast<int>(state.x.size());
  double rss = 0.0;
  for (int t = 0; t < t_len; ++t) {
    const double x_prev = (t == 0) ? 0.0 : state.x(t - 1);
    const double r = state.x(t) - state.phi * x_prev;
    rss += r * r;
  }
  state.tau = rng.gamma(hyper.a + 0.5 * t_len, hyper.b + 0.5 * rss);
}

void update_k_g(SVState& state, const Matrix& y, const SVHyper& hyper,
                Rng& rng, OpCounters* counters) {
  const int p = static_cast<int>(y.cols());
  const int t_len = static_cast<int>(y.rows());
  const Vector w = (-state.x).array().exp();
  Matrix u = y.transpose() * w.asDiagonal() * y;
  symmetrize(u);
  Matrix d_star = Matrix::Identity(p, p) + u;
  symmetrize(d_star);
  const Matrix d_prior = Matrix::Identity(p, p);
  GraphPrior gp{hyper.edge_probability};
  ChainState chain{std::move(state.k), std::move(state.g)};
  posterior_sweep(chain, SamplerKind::CL, hyper.delta + t_len, d_star,
                  hyper.delta, d_prior, gp, rng, counters);
  state.k = std::move(chain.k);
  state.g = std::move(chain.g);
}

SVFit fit_sv(const Matrix& y, const SVHyper& hyper, const SVFitOptions& opts,
             const SVState* warm_start) {
  const int t_len = static_cast<int>(y.rows());
  const int p = static_cast<int>(y.cols());
  if (t_len < 2) throw ConfigError("fit_sv: need at least two days of returns");
  if (opts.iters <= opts.burnin || opts.burnin < 0)
    throw ConfigError("fit_sv: need iters > burnin >= 0");

  SVState state = warm_start ? *warm_start : initial_sv_state(t_len, p);
  if (warm_start && static_cast<int>(state.x.size()) != t_len) {
    // warm starts across growing windows keep the old path and extend it
    Vector x = Vector::Zero(t_len);
    const int keep = std::min<int>(t_len, static_cast<int>(state.x.size()));
    x.head(keep) = state.x.head(keep);
    state.x = std::move(x);
  }
  Rng rng(opts.seed);

  SVFit fit;
  fit.x_mean = Vector::Zero(t_len);
  Matrix edge_acc = Matrix::Zero(p, p);
  const long kept = opts.iters - opts.burnin;
  const long thin = std::max<long>(1, kept / std::max(1, opts.max_draws));

  double step = opts.step0;
  long site_accepts = 0, site_total = 0;
  long window_accepts = 0, window_total = 0;
  const long adapt_every = 50;

  for (long it = 0; it < opts.iters; ++it) {
    if (!opts.fixed_vol) {
      const int acc = update_x(state, y, hyper, step, rng);
      update_phi(state, hyper, rng);
      update_tau(state, hyper, rng);
      window_accepts += acc;
      window_total += t_len;
      if (it >= opts.burnin) {
        site_accepts += acc;
        site_total += t_len;
      }
      // Robbins-Monro style step adaptation toward 0.35, burn-in only
      if (it < opts.burnin && (it + 1) % adapt_every == 0) {
        const double rate = static_cast<double>(window_accepts) / window_total;
        step *= std::exp(rate - 0.35);
        step = std::clamp(step, 0.01, 10.0);
        window_accepts = window_total = 0;
      }
    }
    update_k_g(state, y, hyper, rng);

    if (it >= opts.burnin) {
      fit.x_mean += state.x;
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
          if (state.g.has_edge(i, j)) {
            edge_acc(i, j) += 1.0;
            edge_acc(j, i) += 1.0;
          }
      if ((it - opts.burnin) % thin == 0) {
        fit.draws.push_back(
            SVDraw{state.phi, state.tau, state.x(t_len - 1), state.k});
      }
    }
  }

  fit.x_mean /= static_cast<double>(kept);
  fit.edge_probs = edge_acc / static_cast<double>(kept);
  for (int i = 0; i < p; ++i) fit.edge_probs(i, i) = 1.0;
  fit.x_accept_rate =
      site_total > 0 ? static_cast<double>(site_accepts) / site_total : 0.0;
  fit.step = step;
  fit.last = std::move(state);
  return fit;
}

Matrix posterior_predictive(const std::vector<SVDraw>& draws, int m,
                            bool fixed_vol, Rng& rng, double* x_next_mean) {
  if (draws.empty()) throw ConfigError("posterior_predictive: no states");
  if (m < 1) throw ConfigError("posterior_predictive: need at least one draw");
  const int p = static_cast<int>(draws.front().k.rows());
  const auto s = static_cast<long>(draws.size());
  Matrix out(m, p);
  double x_sum = 0.0;
  Vector z(p);
  for (int d = 0; d < m; ++d) {
    const SVDraw& st = draws[static_cast<std::size_t>((d * s) / m)];
    const double x_next =
        fixed_vol ? 0.0
                  : rng.normal(st.phi * st.x_last, 1.0 / std::sqrt(st.tau));
    x_sum += x_next;
    const Matrix phi = cholesky_upper(st.k);
    for (int c = 0; c < p; ++c) z(c) = rng.normal();
    // K = phi'phi, so phi^{-1} z has covariance K^{-1}
    Vector draw = phi.triangularView<Eigen::Upper>().solve(z);
    out.row(d) = std::exp(0.5 * x_next) * draw.transpose();
  }
  if (x_next_mean) *x_next_mean = x_sum / m;
  return out;
}

namespace {

DayForecast forecast_one_day(const ReturnsSeries& series, const SVHyper& hyper,
                             int day, const ForecastOptions& opts,
                             const SVState* warm) {
  SVFitOptions fo;
  fo.iters = opts.iters;
  fo.burnin = opts.burnin;
  fo.fixed_vol = opts.fixed_vol;
  fo.seed = opts.seed + static_cast<std::uint64_t>(day);
  const Matrix train = series.y.topRows(day);
  SVFit fit = fit_sv(train, hyper, fo, warm);
  Rng rng(fo.seed ^ 0x9e3779b97f4a7c15ULL);  // separate stream for prediction
  DayForecast out;
  out.date = series.dates[day];
  out.draws =
      posterior_predictive(fit.draws, opts.draws, opts.fixed_vol, rng,
                           &out.x_next_mean);
  return out;
}

}  // namespace

std::vector<DayForecast> rolling_forecast(const ReturnsSeries& series,
                                          const SVHyper& hyper, int first_day,
                                          int last_day,
                                          const ForecastOptions& opts) {
  const int t_len = static_cast<int>(series.y.rows());
  if (first_day < 2) throw ConfigError("rolling_forecast: first day must leave at least two training rows");
  if (last_day >= t_len || first_day > last_day)
    throw ConfigError("rolling_forecast: bad forecast window");

  const int n_days = last_day - first_day + 1;
  std::vector<DayForecast> out(n_days);

  if (opts.warm_start || opts.jobs <= 1) {
    SVState carry;
    bool have_carry = false;
    for (int d = 0; d < n_days; ++d) {
      const int day = first_day + d;
      const SVState* warm =
          (opts.warm_start && have_carry) ? &carry : nullptr;
      if (opts.warm_start) {
        SVFitOptions fo;
        fo.iters = opts.iters;
        fo.burnin = opts.burnin;
        fo.fixed_vol = opts.fixed_vol;
        fo.seed = opts.seed + static_cast<std::uint64_t>(day);
        SVFit fit = fit_sv(series.y.topRows(day), hyper, fo, warm);
        Rng rng(fo.seed ^ 0x9e3779b97f4a7c15ULL);
        out[d].date = series.dates[day];
        out[d].draws = posterior_predictive(fit.draws, opts.draws,
                                            opts.fixed_vol, rng,
                                            &out[d].x_next_mean);
        carry = std::move(fit.last);
        have_carry = true;
      } else {
        out[d] = forecast_one_day(series, hyper, day, opts, nullptr);
      }
    }
    return out;
  }

  const int jobs = std::min(opts.jobs, n_days);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int d = next.fetch_add(1);
      if (d >= n_days) return;
      out[d] = forecast_one_day(series, hyper, first_day + d, opts, nullptr);
    }
  };
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace gwsv
