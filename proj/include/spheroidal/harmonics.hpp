// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Surface harmonic basis on spheroids and the discrete transforms between
// grid samples and coefficients.
//
// The basis functions Y_n^m(v, phi) = N_n^m P_n^m(v) e^{i m phi} are
// orthonormal under the plain dv dphi measure. Negative orders are defined by
// Y_n^{-m} = (-1)^m conj(Y_n^m). The grid couples (p+1) Gauss-Legendre nodes
// in v with 2p equispaced azimuthal points; the transform is a discrete
// Fourier sum in phi followed by Gauss-Legendre projection in v, exact for
// band-limited data. With 2p azimuthal points the orders +p and -p alias;
// the forward transform splits that bin evenly, a convention under which
// inverse(forward(samples)) reproduces any band-limited sample vector and
// conjugate symmetry of real fields is preserved.

#ifndef SPHEROIDAL_HARMONICS_HPP
#define SPHEROIDAL_HARMONICS_HPP

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "spheroidal/core.hpp"
#include "spheroidal/geometry.hpp"
#include "spheroidal/quadrature.hpp"

namespace spheroidal {

/// Normalized associated Legendre values N_n^m P_n^m(v) for 0 <= m <= n <=
/// max_degree, triangular layout. No Condon-Shortley phase: the (m,m) seed is
/// positive.
inline std::vector<double> normalized_legendre_table(int max_degree, double v) {
  std::vector<double> t(tri_size(max_degree), 0.0);
  const double s2 = std::sqrt(std::max(0.0, 1.0 - v * v));
  t[tri_index(0, 0)] = 1.0 / std::sqrt(four_pi);
  for (int m = 1; m <= max_degree; ++m)
    t[tri_index(m, m)] =
        t[tri_index(m - 1, m - 1)] * s2 * std::sqrt(double(2 * m + 1) / double(2 * m));
  for (int m = 0; m < max_degree; ++m)
    t[tri_index(m + 1, m)] = v * std::sqrt(double(2 * m + 3)) * t[tri_index(m, m)];
  for (int m = 0; m <= max_degree; ++m) {
    for (int n = m + 2; n <= max_degree; ++n) {
      const double a = std::sqrt(double(4 * n * n - 1) / double(n * n - m * m));
      const double b =
          std::sqrt((double(n - 1) * (n - 1) - m * m) / double(4 * (n - 1) * (n - 1) - 1));
      t[tri_index(n, m)] = a * (v * t[tri_index(n - 1, m)] - b * t[tri_index(n - 2, m)]);
    }
  }
  return t;
}

/// Y_n^m(v, phi) for |m| <= n.
inline complexd eval_sph_harmonic(int n, int m, double v, double phi) {
  const int ma = std::abs(m);
  if (ma > n) throw std::invalid_argument("eval_sph_harmonic: |m| > n");
  const auto t = normalized_legendre_table(n, v);
  const double leg = t[tri_index(n, ma)];
  const complexd az = std::polar(1.0, m * phi);
  const double sign = (m < 0 && (ma % 2 == 1)) ? -1.0 : 1.0;
  return sign * leg * az;
}

/// Sampling grid of order p: (p+1) Gauss-Legendre nodes in v tensored with
/// 2p equispaced azimuthal points, plus the precomputed Legendre plan used
/// by the transforms (through degree p+1 to serve basis-coupling formulas).
class SurfaceGrid {
 public:
  explicit SurfaceGrid(int order) : order_(order) {
    if (order < 1) throw std::invalid_argument("SurfaceGrid: order must be >= 1");
    const auto rule = gauss_legendre(order + 1);
    v_nodes_ = rule.nodes;
    v_weights_ = rule.weights;
    n_phi_ = 2 * order;
    legendre_rows_.resize(v_nodes_.size());
    for (std::size_t j = 0; j < v_nodes_.size(); ++j)
      legendre_rows_[j] = normalized_legendre_table(order + 1, v_nodes_[j]);
    trig_.resize(std::size_t(n_phi_) * (order + 1));
    for (int k = 0; k < n_phi_; ++k)
      for (int m = 0; m <= order; ++m)
        trig_[std::size_t(k) * (order + 1) + m] = std::polar(1.0, m * phi_node(k));
  }

  int order() const { return order_; }
  int n_v() const { return int(v_nodes_.size()); }
  int n_phi() const { return n_phi_; }
  int size() const { return n_v() * n_phi_; }
  const std::vector<double>& v_nodes() const { return v_nodes_; }
  const std::vector<double>& v_weights() const { return v_weights_; }
  double phi_node(int k) const { return 2.0 * pi * k / n_phi_; }

  /// Flat index of the sample at (v_j, phi_k).
  int index(int j, int k) const { return j * n_phi_ + k; }

  /// Normalized Legendre values at node j, degrees through order+1.
  const std::vector<double>& legendre_row(int j) const { return legendre_rows_[j]; }
  /// e^{i m phi_k} for 0 <= m <= order.
  complexd azimuthal(int k, int m) const { return trig_[std::size_t(k) * (order_ + 1) + m]; }

 private:
  int order_;
  int n_phi_;
  std::vector<double> v_nodes_, v_weights_;
  std::vector<std::vector<double>> legendre_rows_;
  std::vector<complexd> trig_;
};

struct HarmonicBasis {
  enum class Kind { Standard, ModifiedWeighted };
  Kind kind = Kind::Standard;
  SpheroidKind shape_kind = SpheroidKind::Prolate;
  double u0 = 0;

  friend bool operator==(const HarmonicBasis&, const HarmonicBasis&) = default;
};

/// Coefficient table indexed by (n, m), 0 <= n <= order, |m| <= n.
struct HarmonicCoeffs {
  int order = 0;
  HarmonicBasis basis;
  std::vector<complexd> c;  // (order+1)^2 entries, nm_index layout

  HarmonicCoeffs() = default;
  HarmonicCoeffs(int p, HarmonicBasis b = {})
      : order(p), basis(b), c(std::size_t(p + 1) * (p + 1), complexd(0)) {}

  complexd& at(int n, int m) { return c[nm_index(n, m)]; }
  complexd at(int n, int m) const { return c[nm_index(n, m)]; }
};

/// Weight sqrt(u0^2 -+ v^2) defining the modified basis Y_n^m / weight.
inline double modified_basis_weight(SpheroidKind kind, double u0, double v) {
  const double s = kind == SpheroidKind::Oblate ? 1.0 : -1.0;
  return std::sqrt(u0 * u0 + s * v * v);
}

/// Grid samples -> coefficients in the standard basis.
inline HarmonicCoeffs forward_transform(const SurfaceGrid& grid,
                                        std::span<const complexd> values) {
  const int p = grid.order();
  if (int(values.size()) != grid.size())
    throw std::invalid_argument("forward_transform: sample count mismatch");
  HarmonicCoeffs out(p);
  const int n_phi = grid.n_phi();
  const double phi_weight = pi / p;  // 2*pi / (2p)
  // Azimuthal analysis per v-row: F(j, m) for 0 <= m <= p and the negative
  // orders via explicit conjugated sums.
  std::vector<complexd> fpos(std::size_t(grid.n_v()) * (p + 1));
  std::vector<complexd> fneg(std::size_t(grid.n_v()) * (p + 1));
  for (int j = 0; j < grid.n_v(); ++j) {
    for (int m = 0; m <= p; ++m) {
      complexd sp = 0, sn = 0;
      for (int k = 0; k < n_phi; ++k) {
        const complexd e = grid.azimuthal(k, m);  // e^{+i m phi_k}
        const complexd f = values[grid.index(j, k)];
        sp += f * std::conj(e);
        sn += f * e;
      }
      fpos[std::size_t(j) * (p + 1) + m] = phi_weight * sp;
      fneg[std::size_t(j) * (p + 1) + m] = phi_weight * sn;
    }
  }
  for (int m = 0; m <= p; ++m) {
    const double msign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int n = m; n <= p; ++n) {
      complexd cp = 0, cn = 0;
      for (int j = 0; j < grid.n_v(); ++j) {
        const double w = grid.v_weights()[j] * grid.legendre_row(j)[tri_index(n, m)];
        cp += w * fpos[std::size_t(j) * (p + 1) + m];
        cn += w * fneg[std::size_t(j) * (p + 1) + m];
      }
      out.at(n, m) = cp;
      if (m > 0) out.at(n, -m) = msign * cn;
    }
  }
  // The +-p azimuthal orders share one bin; split it evenly.
  for (int n = p; n <= p; ++n) {
    out.at(n, p) *= 0.5;
    out.at(n, -p) *= 0.5;
  }
  return out;
}

inline HarmonicCoeffs forward_transform(const SurfaceGrid& grid, std::span<const double> values) {
  std::vector<complexd> tmp(values.begin(), values.end());
  return forward_transform(grid, std::span<const complexd>(tmp));
}

/// Coefficients -> grid samples. Honors the modified basis by dividing the
/// synthesized samples by the basis weight.
inline std::vector<complexd> inverse_transform(const SurfaceGrid& grid,
                                               const HarmonicCoeffs& coeffs) {
  const int p = grid.order();
  if (coeffs.order != p) throw std::invalid_argument("inverse_transform: order mismatch");
  std::vector<complexd> out(grid.size(), complexd(0));
  for (int j = 0; j < grid.n_v(); ++j) {
    const auto& leg = grid.legendre_row(j);
    // Collapse degrees first: g(m) for signed m.
    std::vector<complexd> gpos(p + 1, complexd(0)), gneg(p + 1, complexd(0));
    for (int m = 0; m <= p; ++m) {
      const double msign = (m % 2 == 0) ? 1.0 : -1.0;
      complexd sp = 0, sn = 0;
      for (int n = m; n <= p; ++n) {
        const double b = leg[tri_index(n, m)];
        sp += coeffs.at(n, m) * b;
        if (m > 0) sn += coeffs.at(n, -m) * b;
      }
      gpos[m] = sp;
      gneg[m] = msign * sn;
    }
    for (int k = 0; k < grid.n_phi(); ++k) {
      complexd val = gpos[0];
      for (int m = 1; m <= p; ++m) {
        const complexd e = grid.azimuthal(k, m);
        val += gpos[m] * e + gneg[m] * std::conj(e);
      }
      out[grid.index(j, k)] = val;
    }
  }
  if (coeffs.basis.kind == HarmonicBasis::Kind::ModifiedWeighted) {
    for (int j = 0; j < grid.n_v(); ++j) {
      const double w =
          modified_basis_weight(coeffs.basis.shape_kind, coeffs.basis.u0, grid.v_nodes()[j]);
      for (int k = 0; k < grid.n_phi(); ++k) out[grid.index(j, k)] /= w;
    }
  }
  return out;
}

/// Real-output synthesis for conjugate-symmetric coefficients.
inline std::vector<double> inverse_transform_real(const SurfaceGrid& grid,
                                                  const HarmonicCoeffs& coeffs) {
  const auto z = inverse_transform(grid, coeffs);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

/// Samples of a scalar density -> coefficients in the modified basis
/// Y_n^m / sqrt(u0^2 -+ v^2): multiply by the weight, then analyze.
inline HarmonicCoeffs to_modified_basis(const SurfaceGrid& grid, SpheroidKind kind, double u0,
                                        std::span<const double> values) {
  std::vector<complexd> weighted(values.size());
  for (int j = 0; j < grid.n_v(); ++j) {
    const double w = modified_basis_weight(kind, u0, grid.v_nodes()[j]);
    for (int k = 0; k < grid.n_phi(); ++k)
      weighted[grid.index(j, k)] = values[grid.index(j, k)] * w;
  }
  HarmonicCoeffs out = forward_transform(grid, std::span<const complexd>(weighted));
  out.basis = HarmonicBasis{HarmonicBasis::Kind::ModifiedWeighted, kind, u0};
  return out;
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_HARMONICS_HPP
