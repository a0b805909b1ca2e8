#include "gwsv/linalg.hpp"

#include <cmath>

#include "gwsv/errors.hpp"

namespace gwsv {

void symmetrize(Matrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
}

bool is_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

Matrix cholesky_upper(const Matrix& k) {
  const int p = static_cast<int>(k.rows());
  if (k.cols() != p) throw NumericError("cholesky: matrix not square");
  Matrix phi = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    double s = k(i, i);
    for (int l = 0; l < i; ++l) s -= phi(l, i) * phi(l, i);
    if (!(s > 0.0)) throw NumericError("cholesky: matrix not positive definite");
    const double d = std::sqrt(s);
    phi(i, i) = d;
    for (int j = i + 1; j < p; ++j) {
      double t = k(i, j);
      for (int l = 0; l < i; ++l) t -= phi(l, i) * phi(l, j);
      phi(i, j) = t / d;
    }
  }
  return phi;
}

CholeskyFactor cholesky(const Matrix& k) {
  CholeskyFactor f{cholesky_upper(k), Graph(static_cast<int>(k.rows()))};
  for (int i = 0; i < k.rows(); ++i)
    for (int j = i + 1; j < k.cols(); ++j)
      if (f.phi(i, j) != 0.0) f.fill.add_edge(i, j);
  return f;
}

void complete_phi(Matrix& phi, const Graph& g, const Graph& fill) {
  const int p = g.size();
  for (int i = 0; i < p; ++i) {
    if (phi(i, i) == 0.0) throw NumericError("complete_phi: zero diagonal entry");
    for (int j = i + 1; j < p; ++j) {
      if (!fill.has_edge(i, j) || g.has_edge(i, j)) continue;
      double s = 0.0;
      for (int l = 0; l < i; ++l) s += phi(l, i) * phi(l, j);
      phi(i, j) = -s / phi(i, i);
    }
  }
}

CholeskyFactor complete_phi(const CholeskyFactor& phi_free, const Graph& g,
                            const Graph& fill) {
  CholeskyFactor out{phi_free.phi, fill};
  complete_phi(out.phi, g, fill);
  return out;
}

Matrix phi_to_precision(const Matrix& phi, const Graph& g) {
  Matrix k = phi.transpose() * phi;
  for (int i = 0; i < k.rows(); ++i) {
    for (int j = i + 1; j < k.cols(); ++j) {
      if (g.has_edge(i, j)) {
        k(j, i) = k(i, j);
      } else {
        k(i, j) = k(j, i) = 0.0;
      }
    }
  }
  return k;
}

Matrix permute_sym(const Matrix& m, const Permutation& perm) {
  const int p = static_cast<int>(m.rows());
  Matrix out(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) out(perm.pos(a), perm.pos(b)) = m(a, b);
  return out;
}

Matrix sample_wishart(double delta, const Matrix& d_c, Rng& rng) {
  const int q = static_cast<int>(d_c.rows());
  if (delta <= 0.0) throw NumericError("sample_wishart: delta must be positive");
  Matrix r;
  try {
    r = cholesky_upper(d_c);
  } catch (const NumericError&) {
    throw NumericError("sample_wishart: scale block not positive definite");
  }
  const double df = delta + q - 1;
  // Bartlett factor, lower triangular
  Matrix a = Matrix::Zero(q, q);
  for (int i = 0; i < q; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // W = R^{-1} A A' R^{-T}
  Matrix b = r.triangularView<Eigen::Upper>().solve(a);
  Matrix w = b * b.transpose();
  symmetrize(w);
  return w;
}

}  // namespace gwsv
