#include "gwsv/scoring.hpp"

#include <cmath>

#include "gwsv/errors.hpp"

namespace gwsv {

namespace {

double powed_norm(const Eigen::RowVectorXd& v, double beta) {
  const double n = v.norm();
  return beta == 1.0 ? n : std::pow(n, beta);
}

}  // namespace

double energy_score(const Matrix& draws, const Vector& x, double beta) {
  const int m = static_cast<int>(draws.rows());
  if (m < 1) throw ConfigError("energy_score: empty predictive sample");
  if (draws.cols() != x.size())
    throw ConfigError("energy_score: dimension mismatch");
  if (!(beta > 0.0 && beta < 2.0))
    throw ConfigError("energy_score: beta must lie in (0, 2)");

  double accuracy = 0.0;
  for (int i = 0; i < m; ++i) {
    accuracy += powed_norm(draws.row(i) - x.transpose(), beta);
  }
  accuracy /= m;
  if (m == 1) return accuracy;  // degenerate sample, no spread term

  double spread = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      spread += powed_norm(draws.row(i) - draws.row(j), beta);
    }
  }
  // i<j pairs counted once; the i!=j double sum is twice that
  spread /= static_cast<double>(m) * (m - 1);
  return accuracy - spread;
}

double energy_score(const PredictiveSample& sample, const Vector& x,
                    double beta) {
  return energy_score(sample.draws, x, beta);
}

std::vector<double> score_series(
    const std::vector<PredictiveSample>& pred,
    const std::vector<std::pair<std::string, Vector>>& realized, double beta) {
  if (pred.size() != realized.size())
    throw ConfigError("score_series: series lengths differ");
  std::vector<double> out;
  out.reserve(pred.size());
  for (std::size_t d = 0; d < pred.size(); ++d) {
    if (pred[d].label != realized[d].first)
      throw ConfigError("score_series: label mismatch at '" + pred[d].label +
                        "' vs '" + realized[d].first + "'");
    out.push_back(energy_score(pred[d].draws, realized[d].second, beta));
  }
  return out;
}

}  // namespace gwsv
