#include "gwsv/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gwsv/errors.hpp"

namespace gwsv {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ConfigError("number formatting failed");
  return std::string(buf, ptr);
}

bool parse_double(std::string_view s, double& out) {
  // from_chars rejects leading whitespace and '+'; be lenient about spaces
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_missing(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s.empty() || s == "NA" || s == "NaN" || s == "nan";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& tok : split_csv(line)) {
      double v;
      if (!parse_double(tok, v))
        throw ConfigError("unparseable number '" + tok + "' in " + path);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("empty matrix file " + path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  int p = 0;
  if (!(in >> p) || p <= 0) throw ConfigError("bad node count in " + path);
  Graph g(p);
  int i, j;
  while (in >> i >> j) {
    if (i < 1 || j < 1 || i > p || j > p || i == j)
      throw ConfigError("bad edge in " + path);
    g.add_edge(i - 1, j - 1);
  }
  return g;
}

void write_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << g.size() << '\n';
  for (auto [i, j] : g.edges()) out << (i + 1) << ' ' << (j + 1) << '\n';
}

IngestResult ingest_prices(const std::string& path, PriceMode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty returns file " + path);
  line = strip_cr(line);
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "date")
    throw ConfigError("expected header 'date,<name>,...' in " + path);
  const int p = static_cast<int>(header.size()) - 1;

  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;
  int dropped = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto tokens = split_csv(line);
    if (static_cast<int>(tokens.size()) != p + 1)
      throw ConfigError("row with wrong field count in " + path);
    bool missing = false;
    std::vector<double> row(p);
    for (int c = 0; c < p; ++c) {
      if (is_missing(tokens[c + 1])) {
        missing = true;
        break;
      }
      if (!parse_double(tokens[c + 1], row[c]))
        throw ConfigError("unparseable value '" + tokens[c + 1] + "' in " + path);
    }
    if (missing) {
      ++dropped;
      continue;
    }
    if (!dates.empty() && tokens[0] <= dates.back())
      throw ConfigError("dates not strictly increasing in " + path);
    dates.push_back(tokens[0]);
    rows.push_back(std::move(row));
  }

  IngestResult res;
  res.dropped_rows = dropped;
  const int t_in = static_cast<int>(rows.size());
  if (mode == PriceMode::returns) {
    if (t_in < 2) throw ConfigError("need at least two complete rows in " + path);
    res.series.dates = std::move(dates);
    res.series.y.resize(t_in, p);
    for (int t = 0; t < t_in; ++t)
      for (int c = 0; c < p; ++c) res.series.y(t, c) = rows[t][c];
    return res;
  }
  // prices mode: log returns between surviving consecutive rows
  const int t_out = t_in - 1;
  if (t_out < 2)
    throw ConfigError("too few complete price rows in " + path +
                      " (need at least three)");
  res.series.y.resize(t_out, p);
  res.series.dates.assign(dates.begin() + 1, dates.end());
  for (int t = 0; t < t_out; ++t) {
    for (int c = 0; c < p; ++c) {
      if (!(rows[t][c] > 0.0) || !(rows[t + 1][c] > 0.0))
        throw ConfigError("nonpositive price in " + path);
      res.series.y(t, c) = std::log(rows[t + 1][c] / rows[t][c]);
    }
  }
  return res;
}

void write_returns(const std::string& path, const ReturnsSeries& series) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "date";
  for (int c = 0; c < series.y.cols(); ++c) out << ",a" << (c + 1);
  out << '\n';
  for (int t = 0; t < series.y.rows(); ++t) {
    out << series.dates[t];
    for (int c = 0; c < series.y.cols(); ++c)
      out << ',' << format_double(series.y(t, c));
    out << '\n';
  }
}

Wangli6 builtin_wangli6() {
  Matrix a = Matrix::Identity(6, 6);
  for (int i = 0; i + 1 < 6; ++i) a(i, i + 1) = a(i + 1, i) = 0.5;
  a(0, 5) = a(5, 0) = 0.4;
  Wangli6 w;
  w.n = 18.0;
  Eigen::LLT<Matrix> llt(a);
  w.u = w.n * llt.solve(Matrix::Identity(6, 6));
  symmetrize(w.u);
  return w;
}

Matrix wangli6_reference_edge_probs() {
  Matrix m(6, 6);
  m << 1.000, 0.969, 0.106, 0.085, 0.113, 0.850,
       0.969, 1.000, 0.980, 0.098, 0.081, 0.115,
       0.106, 0.980, 1.000, 0.982, 0.098, 0.086,
       0.085, 0.098, 0.982, 1.000, 0.980, 0.106,
       0.113, 0.081, 0.098, 0.980, 1.000, 0.970,
       0.850, 0.115, 0.086, 0.106, 0.970, 1.000;
  return m;
}

double edge_prob_mse(const Matrix& probs, const Matrix& reference) {
  if (probs.rows() != reference.rows() || probs.cols() != reference.cols())
    throw ConfigError("edge_prob_mse: dimension mismatch");
  double sse = 0.0;
  int count = 0;
  for (int i = 0; i < probs.rows(); ++i) {
    for (int j = i + 1; j < probs.cols(); ++j) {
      const double d = probs(i, j) - reference(i, j);
      sse += d * d;
      ++count;
    }
  }
  return sse / count;
}

}  // namespace gwsv
