#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gwsv/linalg.hpp"

namespace gwsv {

// Predictive sample for one day: draws are m rows of p-dimensional outcomes.
struct PredictiveSample {
  Matrix draws;
  std::string label;
};

// Sample energy score of the predictive against realization x:
//   (1/m) sum_i |x_i - x|^beta
//   - (1/(2 m (m-1))) sum_{i != j} |x_i - x_j|^beta
// with the Euclidean norm and beta in (0, 2).  The second sum pairs distinct
// draws, so the spread term is unbiased.  Lower is better.
double energy_score(const Matrix& draws, const Vector& x, double beta = 1.0);
double energy_score(const PredictiveSample& sample, const Vector& x,
                    double beta = 1.0);

// Per-day scores for label-aligned predictions and realizations.
std::vector<double> score_series(
    const std::vector<PredictiveSample>& pred,
    const std::vector<std::pair<std::string, Vector>>& realized,
    double beta = 1.0);

}  // namespace gwsv
