// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Associated Legendre functions of the first and second kind evaluated off
// the cut: real argument x = u > 1 and imaginary argument x = i*u, u > 0,
// with first derivatives, for all 0 <= m <= n <= N.
//
// P is computed by the forward degree recurrence
//   (n-m+1) P_{n+1}^m(x) = (2n+1) x P_n^m(x) - (n+m) P_{n-1}^m(x)
// seeded by P_m^m(x) = (2m-1)!! (x^2-1)^{m/2}. Q is unstable forward, so the
// top-level ratio H_N^m = Q_N^m / Q_{N-1}^m is computed by a modified Lentz
// continued fraction, Q at the top two degrees is recovered from the
// cross-degree Wronskian
//   P_n^m Q_{n-1}^m - P_{n-1}^m Q_n^m = (-1)^m (n+m-1)!/(n-m)!,
// and the recurrence is run backwards. Derivatives use
//   (1-x^2) f' = (m-n-1) f_{n+1} + (n+1) x f_n  (both families).
//
// Imaginary arguments never require complex arithmetic: the phases factor
// out as
//   P_n^m(iu)  = i^n      * p(n,m)     P_n^m'(iu) = i^(n+1)  * dp(n,m)
//   Q_n^m(iu)  = (-i)^(n+1) * q(n,m)   Q_n^m'(iu) = (-i)^n   * dq(n,m)
// with p, q, dp, dq real. The accessors p(), q(), dp(), dq() return those
// real reduced values (which for a real argument are the functions
// themselves); *_full() accessors reapply the phases.

#ifndef SPHEROIDAL_LEGENDRE_HPP
#define SPHEROIDAL_LEGENDRE_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "spheroidal/core.hpp"
#include "spheroidal/errors.hpp"

namespace spheroidal {

enum class LegendreArg { Real, Imaginary };

inline constexpr int legendre_max_degree_cap = 64;

class LegendreTable {
 public:
  /// Builds tables with values for n <= max_degree + 1 and derivatives for
  /// n <= max_degree. Throws LentzError, WronskianError or OverflowError.
  LegendreTable(LegendreArg kind, double u, int max_degree, bool with_q = true)
      : kind_(kind), u_(u), n_max_(max_degree), with_q_(with_q) {
    if (max_degree < 0 || max_degree > legendre_max_degree_cap)
      throw std::invalid_argument("LegendreTable: max_degree out of range");
    // The second kind needs a strictly off-cut argument; first-kind-only
    // tables extend to the chart boundary (u = 1 real, u = 0 imaginary).
    if (kind == LegendreArg::Real && !(with_q ? u > 1.0 : u >= 1.0))
      throw std::invalid_argument("LegendreTable: real argument requires u > 1");
    if (kind == LegendreArg::Imaginary && !(with_q ? u > 0.0 : u >= 0.0))
      throw std::invalid_argument("LegendreTable: imaginary argument requires u > 0");
    build();
  }

  LegendreArg kind() const { return kind_; }
  double argument() const { return u_; }
  int max_degree() const { return n_max_; }

  // Reduced real values; valid for n <= max_degree + 1.
  double p(int n, int m) const { return p_[tri_index(n, m)]; }
  double q(int n, int m) const { return q_[tri_index(n, m)]; }
  // Derivatives with respect to the argument; valid for n <= max_degree.
  double dp(int n, int m) const { return dp_[tri_index(n, m)]; }
  double dq(int n, int m) const { return dq_[tri_index(n, m)]; }

  complexd p_full(int n, int m) const {
    return kind_ == LegendreArg::Real ? complexd(p(n, m)) : ipow(n) * p(n, m);
  }
  complexd q_full(int n, int m) const {
    return kind_ == LegendreArg::Real ? complexd(q(n, m)) : ipow(-(n + 1)) * q(n, m);
  }
  complexd dp_full(int n, int m) const {
    return kind_ == LegendreArg::Real ? complexd(dp(n, m)) : ipow(n + 1) * dp(n, m);
  }
  complexd dq_full(int n, int m) const {
    return kind_ == LegendreArg::Real ? complexd(dq(n, m)) : ipow(-n) * dq(n, m);
  }

  double max_wronskian_residual() const { return max_wronskian_residual_; }

 private:
  // Modified Lentz evaluation of the ratio Q_top^m / Q_{top-1}^m in reduced
  // form. For a real argument the printed continued fraction is used; for an
  // imaginary argument the phase-reduced fraction has positive terms.
  double lentz_ratio(int m, int top) const {
    const double tiny = 1e-30;
    const double eps = 1e-15;
    const long max_terms = 10000;
    const bool real = kind_ == LegendreArg::Real;
    // H_top = a_1 / (b_1 + a_2 / (b_2 + ...)) with
    //   a_j = -+ (nn+m)/(nn-m+1),  b_j = -+ (2nn+1) u /(nn-m+1),  nn = top+j-1.
    double f = tiny, c = f, d = 0.0;
    for (long j = 1; j <= max_terms; ++j) {
      const double nn = double(top + j - 1);
      const double aj = (real ? -1.0 : 1.0) * (nn + m) / (nn - m + 1);
      const double bj = (real ? -1.0 : 1.0) * (2 * nn + 1) * u_ / (nn - m + 1);
      d = bj + aj * d;
      if (d == 0.0) d = tiny;
      c = bj + aj / c;
      if (c == 0.0) c = tiny;
      d = 1.0 / d;
      const double delta = c * d;
      f *= delta;
      if (j > 1 && std::abs(delta - 1.0) < eps) return f;
    }
    throw LentzError(m, max_terms, "LegendreTable: continued fraction did not converge (m=" +
                                       std::to_string(m) + ", u=" + std::to_string(u_) + ")");
  }

  void build() {
    const int n_tab = n_max_ + 1;  // values stored through this degree
    const int n_top = n_tab + 1;   // backward recursion starts here
    p_.assign(tri_size(n_top), 0.0);
    q_.assign(tri_size(n_top), 0.0);
    dp_.assign(tri_size(n_max_), 0.0);
    dq_.assign(tri_size(n_max_), 0.0);

    const bool imag = kind_ == LegendreArg::Imaginary;
    const double x2m1 = imag ? (u_ * u_ + 1.0) : (u_ * u_ - 1.0);  // |x^2 - 1|
    const double sign_back = imag ? 1.0 : -1.0;  // sign of the P_{n-1} term, reduced

    // First kind, forward in degree. Reduced recurrence:
    //   real:      (n-m+1) p_{n+1} = (2n+1) u p_n - (n+m) p_{n-1}
    //   imaginary: (n-m+1) p_{n+1} = (2n+1) u p_n + (n+m) p_{n-1}
    double seed = 1.0;
    for (int m = 0; m <= n_top; ++m) {
      p_[tri_index(m, m)] = seed;
      if (m + 1 <= n_top) p_[tri_index(m + 1, m)] = u_ * (2 * m + 1) * seed;
      for (int n = m + 1; n < n_top; ++n) {
        p_[tri_index(n + 1, m)] =
            ((2 * n + 1) * u_ * p_[tri_index(n, m)] +
             sign_back * (n + m) * p_[tri_index(n - 1, m)]) /
            double(n - m + 1);
      }
      seed *= (2 * m + 1) * std::sqrt(x2m1);
      if (!std::isfinite(seed))
        throw OverflowError(m + 1, m + 1, "LegendreTable: P seed overflow at m=" +
                                              std::to_string(m + 1));
    }
    for (int n = 0; n <= n_top; ++n)
      for (int m = 0; m <= n; ++m)
        if (!std::isfinite(p_[tri_index(n, m)]))
          throw OverflowError(n, m, "LegendreTable: P overflow at n=" + std::to_string(n) +
                                        ", m=" + std::to_string(m));

    if (with_q_) {
      // Second kind, backward in degree, column by column.
      double fact = 1.0;  // (2m)! accumulated across columns
      double max_res = 0.0;
      for (int m = 0; m <= n_tab; ++m) {
        const double h = lentz_ratio(m, n_top);
        // Cross-degree Wronskian at n = n_top:
        //   K = (n+m-1)!/(n-m)!, reduced value (-1)^m K.
        double k_top = fact;  // (2m)! == K at n = m+1
        for (int n = m + 2; n <= n_top; ++n) k_top *= double(n + m - 1) / double(n - m);
        const double denom_red =
            imag ? p_[tri_index(n_top, m)] + h * p_[tri_index(n_top - 1, m)]
                 : p_[tri_index(n_top, m)] - h * p_[tri_index(n_top - 1, m)];
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        double q_hi = sgn * k_top / denom_red;          // q at n_top - 1
        double q_top = h * q_hi;                        // q at n_top
        if (!std::isfinite(q_hi) || !std::isfinite(q_top))
          throw OverflowError(n_top, m, "LegendreTable: Q seed overflow");
        q_[tri_index(n_top, m)] = q_top;
        q_[tri_index(n_top - 1, m)] = q_hi;
        for (int n = n_top - 1; n > m; --n) {
          // real:      (n+m) q_{n-1} = (2n+1) u q_n - (n-m+1) q_{n+1}
          // imaginary: (n+m) q_{n-1} = (2n+1) u q_n + (n-m+1) q_{n+1}
          q_[tri_index(n - 1, m)] =
              ((2 * n + 1) * u_ * q_[tri_index(n, m)] +
               sign_back * (n - m + 1) * q_[tri_index(n + 1, m)]) /
              double(n + m);
        }
        // Wronskian consistency along the column.
        double k = fact;
        for (int n = m + 1; n <= n_tab; ++n) {
          const double lhs = imag ? p_[tri_index(n, m)] * q_[tri_index(n - 1, m)] +
                                        p_[tri_index(n - 1, m)] * q_[tri_index(n, m)]
                                  : p_[tri_index(n, m)] * q_[tri_index(n - 1, m)] -
                                        p_[tri_index(n - 1, m)] * q_[tri_index(n, m)];
          const double rhs = sgn * k;
          const double res = std::abs(lhs - rhs) / std::abs(rhs);
          max_res = std::max(max_res, res);
          if (res > 1e-8)
            throw WronskianError(n, m, res,
                                 "LegendreTable: Wronskian residual " + std::to_string(res) +
                                     " at n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                                     " (argument too close to the cut for this degree)");
          k *= double(n + m) / double(n - m + 1);
        }
        fact *= double(2 * m + 1) * double(2 * m + 2);
      }
      max_wronskian_residual_ = max_res;
    }

    // Derivatives via the degree-raising relation, reduced:
    //   real:      (1-u^2) dp_n = (m-n-1) p_{n+1} + (n+1) u p_n
    //   imaginary: (1+u^2) dp_n = (m-n-1) p_{n+1} + (n+1) u p_n
    // and identically for q.
    const double denom = imag ? (1.0 + u_ * u_) : (1.0 - u_ * u_);
    if (denom == 0.0) return;  // chart boundary: derivatives left zero, unused
    for (int n = 0; n <= n_max_; ++n) {
      for (int m = 0; m <= n; ++m) {
        dp_[tri_index(n, m)] =
            ((m - n - 1) * p_[tri_index(n + 1, m)] + (n + 1) * u_ * p_[tri_index(n, m)]) / denom;
        if (with_q_) {
          const double num = imag ? (n + 1 - m) * q_[tri_index(n + 1, m)] +
                                        (n + 1) * u_ * q_[tri_index(n, m)]
                                  : (m - n - 1) * q_[tri_index(n + 1, m)] +
                                        (n + 1) * u_ * q_[tri_index(n, m)];
          dq_[tri_index(n, m)] = num / (imag ? (1.0 + u_ * u_) : (1.0 - u_ * u_));
        }
      }
    }
  }

  LegendreArg kind_;
  double u_;
  int n_max_;
  bool with_q_;
  double max_wronskian_residual_ = 0.0;
  std::vector<double> p_, q_, dp_, dq_;
};

/// Kind of off-cut argument matching a spheroid kind: prolate surfaces use
/// real arguments, oblate surfaces imaginary ones.
inline LegendreArg legendre_arg_for(bool oblate) {
  return oblate ? LegendreArg::Imaginary : LegendreArg::Real;
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_LEGENDRE_HPP
