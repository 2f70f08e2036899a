// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPHEROIDAL_DENSE_HPP
#define SPHEROIDAL_DENSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spheroidal/core.hpp"
#include "spheroidal/errors.hpp"

namespace spheroidal {

/// Row-major dense matrix, sized for desk-scale problems (n up to a few
/// thousand).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }
  double* row(int i) { return a_.data() + std::size_t(i) * cols_; }
  const double* row(int i) const { return a_.data() + std::size_t(i) * cols_; }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      const double* r = row(i);
      double s = 0;
      for (int j = 0; j < cols_; ++j) s += r[j] * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Intended for small systems (KKT blocks, Hessenberg solves).
inline std::vector<double> solve_linear(DenseMatrix a, std::vector<double> b) {
  const int n = a.rows();
  if (a.cols() != n || int(b.size()) != n) throw std::invalid_argument("solve_linear: shape");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    }
    if (best == 0.0) throw Error("solve_linear: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

/// Singular values by one-sided Jacobi, descending order. Robust and
/// deterministic; cost O(n^3) per sweep which is fine at n <~ 1000.
inline std::vector<double> singular_values(DenseMatrix a) {
  const int m = a.rows(), n = a.cols();
  if (m < n) throw std::invalid_argument("singular_values: needs rows >= cols");
  // Work on columns of a.
  const double tol = 1e-14;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0, aqq = 0, apq = 0;
        for (int i = 0; i < m; ++i) {
          const double* r = a.row(i);
          app += r[p] * r[p];
          aqq += r[q] * r[q];
          apq += r[p] * r[q];
        }
        const double denom = std::sqrt(app * aqq);
        if (denom == 0.0 || std::abs(apq) <= tol * denom) continue;
        off = std::max(off, std::abs(apq) / denom);
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          double* r = a.row(i);
          const double vp = r[p], vq = r[q];
          r[p] = c * vp - s * vq;
          r[q] = s * vp + c * vq;
        }
      }
    }
    if (off < tol) break;
  }
  std::vector<double> sv(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

/// 2-norm condition number via the full singular spectrum.
inline double condition_number(const DenseMatrix& a) {
  const auto sv = singular_values(a);
  if (sv.empty() || sv.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / sv.back();
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_DENSE_HPP
