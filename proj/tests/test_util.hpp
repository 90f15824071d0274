#pragma once

// Test-only oracles, kept independent of the library's solve paths: a dense
// LU with partial pivoting plus dense assemblers for the (cyclic) tridiagonal
// operators and their 2D Kronecker products.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "convsplit/grid.hpp"
#include "convsplit/tridiagonal.hpp"

namespace testutil {

using convsplit::GridFunction;
using convsplit::TridiagonalStencil;
using convsplit::TridiagonalTopology;

using Matrix = std::vector<double>;  // n x n, row-major

inline Matrix dense_tridiagonal(const TridiagonalStencil& s, int n,
                                TridiagonalTopology topo) {
  Matrix m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    m[static_cast<size_t>(i) * n + i] = s.diag;
    if (i > 0) m[static_cast<size_t>(i) * n + i - 1] = s.sub;
    if (i < n - 1) m[static_cast<size_t>(i) * n + i + 1] = s.sup;
  }
  if (topo == TridiagonalTopology::Cyclic) {
    m[static_cast<size_t>(0) * n + n - 1] += s.sub;
    m[static_cast<size_t>(n - 1) * n + 0] += s.sup;
  }
  return m;
}

inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[static_cast<size_t>(i) * n + k]) >
          std::abs(a[static_cast<size_t>(p) * n + k]))
        p = i;
    if (std::abs(a[static_cast<size_t>(p) * n + k]) < 1e-300)
      throw std::runtime_error("dense_solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(k) * n + j], a[static_cast<size_t>(p) * n + j]);
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<size_t>(i) * n + k] / a[static_cast<size_t>(k) * n + k];
      a[static_cast<size_t>(i) * n + k] = 0.0;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(k) * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[static_cast<size_t>(i) * n + j] * x[j];
    x[i] = s / a[static_cast<size_t>(i) * n + i];
  }
  return x;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a[static_cast<size_t>(i) * n + j] * x[j];
    y[i] = s;
  }
  return y;
}

// kron(A, B) acting on row-major fields (x fastest): an operator along x is
// kron(I_ny, Sx) and one along y is kron(Sy, I_nx).
inline Matrix kron(const Matrix& a, int na, const Matrix& b, int nb) {
  const int n = na * nb;
  Matrix m(static_cast<size_t>(n) * n, 0.0);
  for (int ia = 0; ia < na; ++ia)
    for (int ja = 0; ja < na; ++ja) {
      const double f = a[static_cast<size_t>(ia) * na + ja];
      if (f == 0.0) continue;
      for (int ib = 0; ib < nb; ++ib)
        for (int jb = 0; jb < nb; ++jb)
          m[static_cast<size_t>(ia * nb + ib) * n + (ja * nb + jb)] +=
              f * b[static_cast<size_t>(ib) * nb + jb];
    }
  return m;
}

inline Matrix identity(int n) {
  Matrix m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 1.0;
  return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b, int n) {
  Matrix c(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double f = a[static_cast<size_t>(i) * n + k];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j)
        c[static_cast<size_t>(i) * n + j] += f * b[static_cast<size_t>(k) * n + j];
    }
  return c;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline std::vector<double> random_vector(int n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace testutil
