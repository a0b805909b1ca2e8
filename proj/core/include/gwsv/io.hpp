#pragma once

#include <string>

#include "gwsv/stochvol.hpp"

namespace gwsv {

// Header-free CSV, row-major, shortest round-trip number formatting.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

// Edge-list text format: first line p, then one "i j" pair per line,
// 1-indexed.
Graph read_graph(const std::string& path);
void write_graph(const std::string& path, const Graph& g);

enum class PriceMode { prices, returns };

struct IngestResult {
  ReturnsSeries series;
  int dropped_rows = 0;
};

// Reads a CSV with header "date,<name1>,...,<namep>" and strictly
// increasing dates.  Rows with a missing cell are dropped (counted in
// dropped_rows); in prices mode log-returns are taken between surviving
// consecutive rows.  Fewer than two resulting rows is an error.
IngestResult ingest_prices(const std::string& path, PriceMode mode);

void write_returns(const std::string& path, const ReturnsSeries& series);

// Six-variable benchmark of Wang & Li (2012): U = n A^{-1} with n = 18,
// A unit diagonal, 0.5 on the super/subdiagonal and 0.4 in the corners.
struct Wangli6 {
  Matrix u;
  double n = 18.0;
};
Wangli6 builtin_wangli6();

// Edge inclusion probabilities Wang & Li (2012) report for that example
// from exhaustive evaluation of the graph space.  Their table has one
// asymmetric pair (0.0098 vs 0.098 at (3,5)/(5,3), 1-indexed); the
// symmetric 0.098 is used here.
Matrix wangli6_reference_edge_probs();

// mean squared error over the 15 upper-triangle entries
double edge_prob_mse(const Matrix& probs, const Matrix& reference);

}  // namespace gwsv
