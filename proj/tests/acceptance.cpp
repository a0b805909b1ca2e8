// Acceptance suite: drives the CLI and the library through the full set of
// release criteria and prints one PASS/FAIL line per criterion.  Exits
// nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwsv/errors.hpp"
#include "gwsv/gwishart.hpp"
#include "gwsv/io.hpp"
#include "gwsv/scoring.hpp"
#include "gwsv/stochvol.hpp"
#include "gwsv/structure.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gwsv;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::current_path() / "acceptance_work";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GWSV_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  const std::string sa = slurp(a), sb = slurp(b);
  return !sa.empty() && sa == sb;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Matrix simulate_returns(const Matrix& k_true, const Vector& x_true, Rng& rng) {
  const int p = static_cast<int>(k_true.rows());
  const int t_len = static_cast<int>(x_true.size());
  const Matrix phi = cholesky_upper(k_true);
  Matrix y(t_len, p);
  Vector z(p);
  for (int t = 0; t < t_len; ++t) {
    for (int c = 0; c < p; ++c) z(c) = rng.normal();
    const Vector v = phi.triangularView<Eigen::Upper>().solve(z);
    y.row(t) = std::exp(0.5 * x_true(t)) * v.transpose();
  }
  return y;
}

// ------------------------------------------------------------------------
// 1. Posterior reproduction of the six-variable benchmark through the CLI.

void criterion_wangli6_posterior() {
  const fs::path out = work_dir() / "c1";
  const int rc = run_cli(
      "search --builtin wangli6 --sampler cl --iters 60000 --burnin 10000 "
      "--seed 20240 --out " + out.string());
  if (rc != 0) {
    report("wangli6-cl-posterior", false, "cli exited with " + fmt(rc));
    return;
  }
  const Matrix probs = read_csv_matrix((out / "edge_probs.csv").string());
  const double mse = edge_prob_mse(probs, wangli6_reference_edge_probs());
  report("wangli6-cl-posterior", mse <= 0.02,
         "mse " + fmt(mse) + " (bound 0.02)");
}

// ------------------------------------------------------------------------
// 2. Wall-clock advantage and the large-solve counter split.

void criterion_speedup() {
  const fs::path out = work_dir() / "c2";
  const int rc = run_cli(
      "benchmark --builtin wangli6 --iters 6000 --burnin 1000 --seed 99 "
      "--out " + out.string());
  if (rc != 0) {
    report("cl-wl-speedup", false, "cli exited with " + fmt(rc));
    return;
  }
  json j;
  std::ifstream(out / "benchmark.json") >> j;
  const double cl_s = j["cl"]["seconds"].get<double>();
  const double wl_s = j["wl"]["seconds"].get<double>();
  const auto cl_large = j["cl"]["counters"]["edge_large_solves"].get<std::uint64_t>();
  const auto wl_large = j["wl"]["counters"]["edge_large_solves"].get<std::uint64_t>();
  const auto wl_attempted =
      j["wl"]["counters"]["edge_moves_attempted"].get<std::uint64_t>();
  const bool timing = cl_s < wl_s && wl_s / cl_s >= 2.0;
  const bool counters = cl_large == 0 && wl_large >= wl_attempted &&
                        wl_attempted > 0;
  report("cl-wl-speedup", timing && counters,
         "cl " + fmt(cl_s) + " s, wl " + fmt(wl_s) + " s, ratio " +
             fmt(wl_s / cl_s) + ", cl large solves " + fmt(double(cl_large)) +
             ", wl " + fmt(double(wl_large)) + " vs attempted " +
             fmt(double(wl_attempted)));
}

// ------------------------------------------------------------------------
// 3. Closed-form two-graph posterior at p = 2.

void criterion_p2_analytic() {
  Matrix u(2, 2);
  u << 14.2, 6.3, 6.3, 9.8;
  const double delta = 3.0, n = 12.0;
  const Matrix d_prior = Matrix::Identity(2, 2);
  const double exact = oracles::p2_edge_posterior(delta, n, u, d_prior, 0.5);

  const ChainResult cl = run_chain(u, n, delta, d_prior, GraphPrior{0.5},
                                   SamplerKind::CL, 60000, 10000, 71);
  const ChainResult wl = run_chain(u, n, delta, d_prior, GraphPrior{0.5},
                                   SamplerKind::WL, 60000, 10000, 73);
  const double err_cl = std::abs(cl.edge_probs(0, 1) - exact);
  const double err_wl = std::abs(wl.edge_probs(0, 1) - exact);
  report("p2-analytic-oracle", err_cl <= 0.02 && err_wl <= 0.02,
         "exact " + fmt(exact) + ", cl " + fmt(cl.edge_probs(0, 1)) + ", wl " +
             fmt(wl.edge_probs(0, 1)));
}

// ------------------------------------------------------------------------
// 4. Distributional correctness of the two base samplers.

void criterion_distributional() {
  bool pass = true;
  std::string detail;

  {  // complete graph: clique sweep is an exact draw with a known mean
    Rng rng(301);
    const int p = 3;
    const double delta = 3.0;
    Matrix d(p, p);
    d << 1.8, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.3;
    const Matrix expect = (delta + p - 1) * d.inverse();
    const CliqueSet cliques = maximal_cliques(Graph::complete(p));
    ChainState state{Matrix::Identity(p, p), Graph::complete(p)};
    const int n = 30000;
    Matrix acc = Matrix::Zero(p, p), acc_sq = Matrix::Zero(p, p);
    for (int it = 0; it < n; ++it) {
      block_gibbs_sweep(state, delta, d, cliques, rng);
      acc += state.k;
      acc_sq += state.k.cwiseProduct(state.k);
    }
    const Matrix mean = acc / n;
    double worst_z = 0.0;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const double var = acc_sq(i, j) / n - mean(i, j) * mean(i, j);
        const double z =
            std::abs(mean(i, j) - expect(i, j)) / std::sqrt(var / n);
        worst_z = std::max(worst_z, z);
      }
    }
    pass = pass && worst_z <= 3.0;
    detail += "wishart-mean z " + fmt(worst_z);
  }

  {  // p = 1 margins against the exact gamma law
    Rng rng(303);
    const double delta = 3.0, d_val = 2.0;
    Matrix d(1, 1);
    d << d_val;
    ChainState state{Matrix::Identity(1, 1), Graph(1)};
    const CliqueSet cliques = maximal_cliques(Graph(1));
    std::vector<double> draws;
    for (int it = 0; it < 10000; ++it) {
      block_gibbs_sweep(state, delta, d, cliques, rng);
      draws.push_back(state.k(0, 0));
    }
    const bool ks =
        oracles::ks_pass_01(draws, oracles::gamma_cdf(0.5 * delta, 0.5 * d_val));
    pass = pass && ks;
    detail += std::string(", p1 ks ") + (ks ? "ok" : "reject");
  }

  {  // identity-scale prior: random-walk chain vs clique chain
    const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
    const double delta = 3.0;
    const Matrix d = Matrix::Identity(3, 3);
    const int iters = 80000, burn = 4000;

    Rng rng_a(307);
    CholeskyFactor f{Matrix::Identity(3, 3),
                     fill_in_graph(g, Permutation::identity(3))};
    std::vector<double> rw01, rw02;
    for (int it = 0; it < iters; ++it) {
      rwmh_prior_step(f, g, delta, rng_a);
      if (it < burn) continue;
      const Matrix k = phi_to_precision(f.phi, g);
      rw01.push_back(k(0, 1));
      rw02.push_back(k(0, 2));
    }
    Rng rng_b(311);
    ChainState state{Matrix::Identity(3, 3), g};
    const CliqueSet cliques = maximal_cliques(g);
    std::vector<double> bg01, bg02;
    for (int it = 0; it < iters; ++it) {
      block_gibbs_sweep(state, delta, d, cliques, rng_b);
      if (it < burn) continue;
      bg01.push_back(state.k(0, 1));
      bg02.push_back(state.k(0, 2));
    }
    auto zscore = [](const std::vector<double>& a,
                     const std::vector<double>& b) {
      const double se =
          std::sqrt(oracles::batch_se(a) * oracles::batch_se(a) +
                    oracles::batch_se(b) * oracles::batch_se(b));
      return std::abs(oracles::mean(a) - oracles::mean(b)) / se;
    };
    const double z1 = zscore(rw01, bg01), z2 = zscore(rw02, bg02);
    pass = pass && z1 <= 3.0 && z2 <= 3.0;
    detail += ", rwmh-vs-gibbs z " + fmt(std::max(z1, z2));
  }

  report("distributional", pass, detail);
}

// ------------------------------------------------------------------------
// 5. Exact structural invariants along both chains.

void criterion_invariants() {
  const Wangli6 w = builtin_wangli6();
  const Matrix d_prior = Matrix::Identity(6, 6);
  Matrix d_star = d_prior + w.u;
  symmetrize(d_star);
  bool pass = true;
  std::string detail;

  for (const SamplerKind sk : {SamplerKind::CL, SamplerKind::WL}) {
    Rng rng(sk == SamplerKind::CL ? 401 : 403);
    ChainState state = initial_chain_state(6);
    long violations = 0;
    for (int it = 0; it < 10000; ++it) {
      posterior_sweep(state, sk, 3.0 + w.n, d_star, 3.0, d_prior,
                      GraphPrior{0.5}, rng);
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
          if (!state.g.has_edge(i, j) &&
              (state.k(i, j) != 0.0 || state.k(j, i) != 0.0))
            ++violations;
      try {
        cholesky_upper(state.k);
      } catch (const NumericError&) {
        ++violations;
      }
    }
    pass = pass && violations == 0;
    detail += std::string(sampler_name(sk)) + " violations " +
              fmt(double(violations)) + " ";
  }

  {  // completion residuals on random patterns
    Rng rng(409);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const Graph g = oracles::random_graph(6, 0.45, rng);
      const Graph fill = fill_in_graph(g, Permutation::identity(6));
      Matrix phi = Matrix::Zero(6, 6);
      for (int i = 0; i < 6; ++i) {
        phi(i, i) = 0.5 + rng.uniform();
        for (int j = i + 1; j < 6; ++j)
          if (g.has_edge(i, j)) phi(i, j) = rng.normal();
      }
      complete_phi(phi, g, fill);
      const Matrix k = phi.transpose() * phi;
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
          if (!g.has_edge(i, j))
            worst = std::max(worst,
                             std::abs(k(i, j)) / k.cwiseAbs().maxCoeff());
    }
    pass = pass && worst <= 1e-10;
    detail += "completion residual " + fmt(worst);
  }

  report("structural-invariants", pass, detail);
}

// ------------------------------------------------------------------------
// 6. Energy score exact values.

void criterion_energy_score() {
  bool pass = true;

  Matrix equal(4, 3);
  for (int i = 0; i < 4; ++i) equal.row(i) << 0.5, -1.0, 2.0;
  Vector x(3);
  x << 0.5, -1.0, 2.0;
  pass = pass && energy_score(equal, x) == 0.0;

  Matrix two(2, 1);
  two << 0.0, 2.0;
  Vector one(1);
  one << 1.0;
  pass = pass && std::abs(energy_score(two, one) - 0.0) <= 1e-12;

  Matrix zeros(2, 2);
  zeros.setZero();
  Vector far(2);
  far << 3.0, 4.0;
  pass = pass && std::abs(energy_score(zeros, far) - 5.0) <= 1e-12;

  Rng rng(501);
  Matrix draws(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) draws(i, j) = rng.normal();
  Vector target(3);
  target << 0.1, 0.2, -0.3;
  const double base = energy_score(draws, target);
  Matrix reversed(50, 3);
  for (int i = 0; i < 50; ++i) reversed.row(i) = draws.row(49 - i);
  pass = pass && std::abs(energy_score(reversed, target) - base) <=
                     1e-12 * std::abs(base);

  report("energy-score", pass, "exact checks and permutation invariance");
}

// ------------------------------------------------------------------------
// 7. Recovery study for the volatility model on synthetic data.

void criterion_sv_recovery() {
  const int p = 6, t_len = 500;
  Matrix k_true = Matrix::Identity(p, p);
  for (int i = 0; i + 1 < p; ++i) k_true(i, i + 1) = k_true(i + 1, i) = 0.4;
  Vector x_true = Vector::Zero(t_len);
  for (int t = 250; t < 300; ++t) x_true(t) = 2.0;
  Rng rng(601);
  const Matrix y = simulate_returns(k_true, x_true, rng);

  // full-series fit: latent path correlation and edge recovery
  SVHyper hyper;
  SVFitOptions opts;
  opts.iters = 4000;
  opts.burnin = 1000;
  opts.seed = 607;
  const SVFit fit = fit_sv(y, hyper, opts);

  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int t = 0; t < t_len; ++t) {
    sx += fit.x_mean(t);
    sy += x_true(t);
    sxy += fit.x_mean(t) * x_true(t);
    sxx += fit.x_mean(t) * fit.x_mean(t);
    syy += x_true(t) * x_true(t);
  }
  const double corr =
      (t_len * sxy - sx * sy) /
      std::sqrt((t_len * sxx - sx * sx) * (t_len * syy - sy * sy));

  double incl = 0.0;
  for (int i = 0; i + 1 < p; ++i) incl += fit.edge_probs(i, i + 1);
  incl /= (p - 1);

  // rolling one-day-ahead comparison inside and outside the spike
  ReturnsSeries series;
  series.y = y;
  for (int t = 0; t < t_len; ++t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%04d", t);
    series.dates.push_back(buf);
  }
  ForecastOptions fo;
  fo.iters = 1500;
  fo.burnin = 300;
  fo.draws = 300;
  fo.seed = 613;
  fo.jobs = 4;

  auto scores_for = [&](int first, int last, bool fixed) {
    ForecastOptions f = fo;
    f.fixed_vol = fixed;
    const auto days = rolling_forecast(series, hyper, first, last, f);
    std::vector<double> out;
    for (const auto& day : days) {
      const int t = std::stoi(day.date.substr(1));
      out.push_back(energy_score(day.draws, y.row(t).transpose()));
    }
    return out;
  };

  const int spike_lo = 262, spike_hi = 271;
  const int quiet_lo = 200, quiet_hi = 209;
  const auto sv_spike = scores_for(spike_lo, spike_hi, false);
  const auto fx_spike = scores_for(spike_lo, spike_hi, true);
  const auto sv_quiet = scores_for(quiet_lo, quiet_hi, false);
  const auto fx_quiet = scores_for(quiet_lo, quiet_hi, true);

  const double spike_sv = oracles::mean(sv_spike);
  const double spike_fx = oracles::mean(fx_spike);
  const double quiet_gap =
      std::abs(oracles::mean(sv_quiet) - oracles::mean(fx_quiet));
  const double quiet_se =
      std::sqrt(oracles::se_of_mean(sv_quiet) * oracles::se_of_mean(sv_quiet) +
                oracles::se_of_mean(fx_quiet) * oracles::se_of_mean(fx_quiet));

  const bool pass = corr > 0.7 && incl > 0.8 && spike_sv < spike_fx &&
                    quiet_gap <= quiet_se;
  report("sv-recovery", pass,
         "corr " + fmt(corr) + ", incl " + fmt(incl) + ", spike es " +
             fmt(spike_sv) + " vs " + fmt(spike_fx) + ", quiet gap " +
             fmt(quiet_gap) + " vs se " + fmt(quiet_se));
}

// ------------------------------------------------------------------------
// 8. Bit-identical reruns of every subcommand under a fixed seed.

void criterion_reproducibility() {
  const fs::path root = work_dir() / "c8";
  fs::create_directories(root);
  bool pass = true;
  std::string detail;

  auto check_pair = [&](const std::string& what, const fs::path& a,
                        const fs::path& b,
                        const std::vector<std::string>& files) {
    for (const auto& f : files) {
      if (!same_bytes(a / f, b / f)) {
        pass = false;
        detail += what + ":" + f + " differs ";
      }
    }
  };

  {  // search
    const std::string common =
        "search --builtin wangli6 --sampler cl --iters 2000 --burnin 400 "
        "--seed 5 --out ";
    pass = pass && run_cli(common + (root / "s1").string()) == 0;
    pass = pass && run_cli(common + (root / "s2").string()) == 0;
    check_pair("search", root / "s1", root / "s2",
               {"edge_probs.csv", "k_mean.csv"});
  }

  {  // benchmark
    const std::string common =
        "benchmark --builtin wangli6 --iters 400 --burnin 100 --seed 5 --out ";
    pass = pass && run_cli(common + (root / "b1").string()) == 0;
    pass = pass && run_cli(common + (root / "b2").string()) == 0;
    check_pair("benchmark", root / "b1", root / "b2",
               {"edge_probs_cl.csv", "edge_probs_wl.csv", "k_mean_cl.csv",
                "k_mean_wl.csv"});
  }

  {  // sample, both samplers
    std::ofstream g(root / "graph.txt");
    g << "3\n1 2\n2 3\n";
    g.close();
    for (const std::string sampler : {"gibbs", "rwmh"}) {
      const std::string common = "sample --graph " +
                                 (root / "graph.txt").string() +
                                 " --sampler " + sampler +
                                 " --iters 2000 --burnin 200 --thin 5 "
                                 "--seed 9 --out ";
      pass = pass && run_cli(common + (root / ("p1" + sampler)).string()) == 0;
      pass = pass && run_cli(common + (root / ("p2" + sampler)).string()) == 0;
      check_pair("sample-" + sampler, root / ("p1" + sampler),
                 root / ("p2" + sampler), {"trace.csv"});
    }
  }

  {  // sv-forecast (jobs 1 vs jobs 2 must also agree) and score
    Rng rng(701);
    ReturnsSeries series;
    series.y = simulate_returns(Matrix::Identity(2, 2), Vector::Zero(30), rng);
    for (int t = 0; t < 30; ++t)
      series.dates.push_back("day" + std::to_string(101 + t));
    write_returns((root / "returns.csv").string(), series);

    const std::string common =
        "sv-forecast --returns " + (root / "returns.csv").string() +
        " --train-end day125 --forecast-end day129 --iters 300 --burnin 60 "
        "--draws 40 --seed 3 --out ";
    pass = pass &&
           run_cli(common + (root / "f1").string() + " --jobs 1") == 0;
    pass = pass &&
           run_cli(common + (root / "f2").string() + " --jobs 2") == 0;
    const std::vector<std::string> pred_files = {
        "pred_day126.csv", "pred_day127.csv", "pred_day128.csv",
        "pred_day129.csv", "xvol.csv"};
    check_pair("sv-forecast", root / "f1", root / "f2", pred_files);

    const std::string score_common =
        "score --pred " + (root / "f1").string() + " --pred-b " +
        (root / "f2").string() + " --realized " +
        (root / "returns.csv").string() + " --out ";
    pass = pass && run_cli(score_common + (root / "e1").string()) == 0;
    pass = pass && run_cli(score_common + (root / "e2").string()) == 0;
    check_pair("score", root / "e1", root / "e2", {"es.csv"});
  }

  report("reproducibility", pass,
         pass ? "all subcommands bit-identical" : detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite, cli: %s\n", GWSV_CLI_PATH);
  criterion_wangli6_posterior();
  criterion_speedup();
  criterion_p2_analytic();
  criterion_distributional();
  criterion_invariants();
  criterion_energy_score();
  criterion_sv_recovery();
  criterion_reproducibility();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
