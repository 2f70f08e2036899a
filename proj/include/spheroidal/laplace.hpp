// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Laplace layer potentials on a single spheroid: per-(n,m) diagonal factors
// for the single layer, double layer and the normal derivative of the single
// layer, plus interior/exterior solid-harmonic expansions, point evaluation
// and directional derivatives of the single layer.
//
// Conventions. The double layer acts on coefficients in the standard surface
// harmonic basis and returns the same. The single layer and its normal
// derivative act on coefficients in the modified basis Y_n^m/sqrt(u0^2-+v^2);
// the single layer returns standard-basis coefficients while its normal
// derivative returns modified-basis ones. Derivatives of the double layer
// are out of scope here: only the single layer has a gradient evaluator, and
// the adjoint identity <D mu, sigma> = <mu, S' sigma> covers the
// consistency checks that would otherwise need one. All multiplier tables are real:
// for oblate shapes the structural phases of the imaginary-argument Legendre
// functions cancel against the explicit i in the single-layer factor, which
// the reduced LegendreTable values make an identity rather than a rounding
// claim. Jump relations are built in:
//   exterior - interior double-layer factors  = +1,
//   exterior - interior single-layer-derivative factors = -1,
// both following from the Legendre Wronskian.

#ifndef SPHEROIDAL_LAPLACE_HPP
#define SPHEROIDAL_LAPLACE_HPP

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "spheroidal/core.hpp"
#include "spheroidal/errors.hpp"
#include "spheroidal/geometry.hpp"
#include "spheroidal/harmonics.hpp"
#include "spheroidal/legendre.hpp"

namespace spheroidal {

enum class LayerKernel { SingleLayer, DoubleLayer, SingleLayerNormalDeriv };

enum class OperatorSide { Exterior, Interior, SurfaceAvg, SurfacePlus, SurfaceMinus };

struct SpectralMultipliers {
  LayerKernel op{};
  OperatorSide side{};
  int order = 0;
  std::vector<double> values;  // triangular (n, m >= 0); even in the order sign

  double at(int n, int m) const { return values[tri_index(n, m < 0 ? -m : m)]; }
};

namespace detail {

/// (n-m)!/(n+m)! (-1)^m by incremental products.
inline double parity_ratio(int n, int m) {
  double r = 1.0;
  for (int k = 1; k <= m; ++k) r /= -double((n + k) * (n - k + 1));
  return r;
}

struct MultiplierContext {
  const SpheroidShape& shape;
  const LegendreTable& table;  // at u0, degrees through order
  double w0;                   // u0^2 -+ 1
  bool oblate;
};

inline MultiplierContext make_context(const SpheroidShape& shape, const LegendreTable& table) {
  const bool oblate = shape.kind() == SpheroidKind::Oblate;
  return {shape, table, shape.u0() * shape.u0() + shape.sign(), oblate};
}

}  // namespace detail

/// Double-layer diagonal factors. Exterior/Interior sides give the solid
/// expansion coefficient per unit density coefficient (to be paired with the
/// reduced radial function at the target); surface sides give the one-sided
/// or principal-value on-surface factors.
inline SpectralMultipliers double_layer_multipliers(const SpheroidShape& shape,
                                                    const LegendreTable& table, int order,
                                                    OperatorSide side) {
  SpectralMultipliers out{LayerKernel::DoubleLayer, side, order,
                          std::vector<double>(tri_size(order), 0.0)};
  const auto ctx = detail::make_context(shape, table);
  const double kind_sign = ctx.oblate ? -1.0 : 1.0;  // oblate factor carries (-1)^{m+1}
  for (int n = 0; n <= order; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double b = kind_sign * detail::parity_ratio(n, m) * ctx.w0;
      double val = 0;
      switch (side) {
        case OperatorSide::Exterior: val = b * table.dp(n, m); break;
        case OperatorSide::Interior: val = b * table.dq(n, m); break;
        case OperatorSide::SurfacePlus: val = b * table.dp(n, m) * table.q(n, m); break;
        case OperatorSide::SurfaceMinus: val = b * table.dq(n, m) * table.p(n, m); break;
        case OperatorSide::SurfaceAvg:
          val = 0.5 * b * (table.dp(n, m) * table.q(n, m) + table.dq(n, m) * table.p(n, m));
          break;
      }
      out.values[tri_index(n, m)] = val;
    }
  }
  return out;
}

/// Single-layer diagonal factors (input in the modified basis, output in the
/// standard basis). The surface operator is continuous, so all three surface
/// sides coincide.
inline SpectralMultipliers single_layer_multipliers(const SpheroidShape& shape,
                                                    const LegendreTable& table, int order,
                                                    OperatorSide side) {
  SpectralMultipliers out{LayerKernel::SingleLayer, side, order,
                          std::vector<double>(tri_size(order), 0.0)};
  const auto ctx = detail::make_context(shape, table);
  const double root = shape.focal() * std::sqrt(ctx.w0);
  for (int n = 0; n <= order; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double bt = detail::parity_ratio(n, m) * root;
      double val = 0;
      switch (side) {
        case OperatorSide::Exterior: val = bt * table.p(n, m); break;
        case OperatorSide::Interior: val = bt * table.q(n, m); break;
        default: val = bt * table.p(n, m) * table.q(n, m); break;
      }
      out.values[tri_index(n, m)] = val;
    }
  }
  return out;
}

/// Normal-derivative-of-single-layer on-surface factors (modified basis in,
/// modified basis out). Only the surface sides are defined; off-surface
/// directional derivatives go through eval_gradient_single_layer.
inline SpectralMultipliers single_layer_nderiv_multipliers(const SpheroidShape& shape,
                                                           const LegendreTable& table, int order,
                                                           OperatorSide side) {
  if (side == OperatorSide::Exterior || side == OperatorSide::Interior)
    throw std::invalid_argument(
        "single_layer_nderiv_multipliers: off-surface sides are not spectral");
  SpectralMultipliers out{LayerKernel::SingleLayerNormalDeriv, side, order,
                          std::vector<double>(tri_size(order), 0.0)};
  const auto ctx = detail::make_context(shape, table);
  const double kind_sign = ctx.oblate ? -1.0 : 1.0;
  for (int n = 0; n <= order; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double f = kind_sign * detail::parity_ratio(n, m) * ctx.w0;
      const double plus = f * table.p(n, m) * table.dq(n, m);
      const double minus = f * table.q(n, m) * table.dp(n, m);
      double val = 0;
      switch (side) {
        case OperatorSide::SurfacePlus: val = plus; break;
        case OperatorSide::SurfaceMinus: val = minus; break;
        default: val = 0.5 * (plus + minus); break;
      }
      out.values[tri_index(n, m)] = val;
    }
  }
  return out;
}

// Convenience overloads building the surface Legendre table internally.
inline LegendreTable surface_legendre_table(const SpheroidShape& shape, int order) {
  return LegendreTable(legendre_arg_for(shape.kind() == SpheroidKind::Oblate), shape.u0(), order);
}

inline SpectralMultipliers double_layer_multipliers(const SpheroidShape& shape, int order,
                                                    OperatorSide side) {
  return double_layer_multipliers(shape, surface_legendre_table(shape, order), order, side);
}
inline SpectralMultipliers single_layer_multipliers(const SpheroidShape& shape, int order,
                                                    OperatorSide side) {
  return single_layer_multipliers(shape, surface_legendre_table(shape, order), order, side);
}
inline SpectralMultipliers single_layer_nderiv_multipliers(const SpheroidShape& shape, int order,
                                                           OperatorSide side) {
  return single_layer_nderiv_multipliers(shape, surface_legendre_table(shape, order), order,
                                         side);
}

/// Applies a diagonal multiplier table to a coefficient vector.
inline HarmonicCoeffs apply_multipliers(const SpectralMultipliers& mult,
                                        const HarmonicCoeffs& density, HarmonicBasis out_basis) {
  if (density.order != mult.order)
    throw std::invalid_argument("apply_multipliers: order mismatch");
  HarmonicCoeffs out(density.order, out_basis);
  for (int n = 0; n <= density.order; ++n)
    for (int m = -n; m <= n; ++m) out.at(n, m) = mult.at(n, m) * density.at(n, m);
  return out;
}

/// Expected input basis for an operator on a given shape.
inline HarmonicBasis required_density_basis(LayerKernel op, const SpheroidShape& shape) {
  if (op == LayerKernel::DoubleLayer) return HarmonicBasis{};
  return HarmonicBasis{HarmonicBasis::Kind::ModifiedWeighted, shape.kind(), shape.u0()};
}

/// Solid-harmonic expansion of a layer potential off the surface:
/// potential(u, v, phi) = sum coeff(n,m) * f_n^m(u) * Y_n^m(v, phi), with f
/// the reduced second-kind (exterior) or first-kind (interior) radial
/// function at the target.
struct SolidExpansion {
  SpheroidShape shape;
  OperatorSide region = OperatorSide::Exterior;  // Exterior or Interior
  int order = 0;
  std::vector<complexd> coeff;  // nm_index layout

  complexd at(int n, int m) const { return coeff[nm_index(n, m)]; }
};

inline SolidExpansion solid_expansion(const SpheroidShape& shape, const LegendreTable& table,
                                      LayerKernel op, const HarmonicCoeffs& density,
                                      OperatorSide region) {
  if (region != OperatorSide::Exterior && region != OperatorSide::Interior)
    throw std::invalid_argument("solid_expansion: region must be Exterior or Interior");
  if (!(density.basis == required_density_basis(op, shape)))
    throw std::invalid_argument("solid_expansion: density coefficients in the wrong basis");
  if (op == LayerKernel::SingleLayerNormalDeriv)
    throw std::invalid_argument(
        "solid_expansion: use eval_gradient_single_layer for derivative evaluation");
  const auto mult = op == LayerKernel::DoubleLayer
                        ? double_layer_multipliers(shape, table, density.order, region)
                        : single_layer_multipliers(shape, table, density.order, region);
  SolidExpansion exp{shape, region, density.order,
                     std::vector<complexd>(std::size_t(density.order + 1) * (density.order + 1))};
  for (int n = 0; n <= density.order; ++n)
    for (int m = -n; m <= n; ++m) exp.coeff[nm_index(n, m)] = mult.at(n, m) * density.at(n, m);
  return exp;
}

inline SolidExpansion solid_expansion(const SpheroidShape& shape, LayerKernel op,
                                      const HarmonicCoeffs& density, OperatorSide region) {
  return solid_expansion(shape, surface_legendre_table(shape, density.order), op, density,
                         region);
}

namespace detail {

/// Reduced radial function table at a target u (first kind for interior,
/// second kind for exterior).
inline LegendreTable radial_table(const SpheroidShape& shape, double u, int order,
                                  bool need_second_kind) {
  return LegendreTable(legendre_arg_for(shape.kind() == SpheroidKind::Oblate), u, order,
                       need_second_kind);
}

inline void check_region(const SolidExpansion& exp, double u) {
  const double u0 = exp.shape.u0();
  if (exp.region == OperatorSide::Exterior && !(u > u0))
    throw RegionMismatchError("eval_expansion: target not exterior to the source surface");
  if (exp.region == OperatorSide::Interior && !(u < u0))
    throw RegionMismatchError("eval_expansion: target not interior to the source surface");
}

}  // namespace detail

/// Evaluates a solid expansion at body-frame spheroidal points.
inline std::vector<complexd> eval_expansion(const SolidExpansion& exp,
                                            std::span<const SpheroidalPoint> targets) {
  const int p = exp.order;
  const bool exterior = exp.region == OperatorSide::Exterior;
  std::vector<complexd> out(targets.size(), complexd(0));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& pt = targets[t];
    detail::check_region(exp, pt.u);
    const auto radial = detail::radial_table(exp.shape, pt.u, p, exterior);
    const auto leg = normalized_legendre_table(p, pt.v);
    complexd acc = 0;
    for (int m = 0; m <= p; ++m) {
      const complexd e = std::polar(1.0, m * pt.phi);
      const double msign = (m % 2 == 0) ? 1.0 : -1.0;
      complexd gp = 0, gn = 0;
      for (int n = m; n <= p; ++n) {
        const double r = exterior ? radial.q(n, m) : radial.p(n, m);
        const double b = r * leg[tri_index(n, m)];
        gp += exp.at(n, m) * b;
        if (m > 0) gn += exp.at(n, -m) * b;
      }
      acc += gp * e;
      if (m > 0) acc += msign * gn * std::conj(e);
    }
    out[t] = acc;
  }
  return out;
}

inline complexd eval_expansion(const SolidExpansion& exp, SpheroidalPoint target) {
  return eval_expansion(exp, std::span<const SpheroidalPoint>(&target, 1))[0];
}

/// Body-frame Cartesian gradient of the single layer at a body-frame target.
///
/// For off-surface sides the target's u decides the radial functions; for
/// surface sides the target is taken on the surface and the requested
/// one-sided limit (or their average) is returned. Points on the symmetry
/// axis (|v| = 1) are handled by the explicit axis limit, where only the
/// m = 0 and |m| = 1 modes survive.
struct GradientVec {
  complexd x, y, z;
};

inline GradientVec eval_gradient_single_layer_vec(const SpheroidShape& shape,
                                                  const LegendreTable& surface_table,
                                                  const HarmonicCoeffs& sigma_modified,
                                                  SpheroidalPoint target, OperatorSide side) {
  const int p = sigma_modified.order;
  if (!(sigma_modified.basis == required_density_basis(LayerKernel::SingleLayer, shape)))
    throw std::invalid_argument("eval_gradient_single_layer: density must be in modified basis");
  const bool oblate = shape.kind() == SpheroidKind::Oblate;
  const double s_rad = oblate ? -1.0 : 1.0;  // d/du of reduced radial values

  if (side == OperatorSide::SurfaceAvg) {
    const GradientVec plus = eval_gradient_single_layer_vec(shape, surface_table, sigma_modified,
                                                            target, OperatorSide::SurfacePlus);
    const GradientVec minus = eval_gradient_single_layer_vec(shape, surface_table, sigma_modified,
                                                             target, OperatorSide::SurfaceMinus);
    return {0.5 * (plus.x + minus.x), 0.5 * (plus.y + minus.y), 0.5 * (plus.z + minus.z)};
  }

  const bool on_surface =
      side == OperatorSide::SurfacePlus || side == OperatorSide::SurfaceMinus;
  const bool exterior_branch = side == OperatorSide::Exterior || side == OperatorSide::SurfacePlus;
  if (!on_surface) {
    if (side == OperatorSide::Exterior && !(target.u > shape.u0()))
      throw RegionMismatchError("eval_gradient_single_layer: target not exterior");
    if (side == OperatorSide::Interior && !(target.u < shape.u0()))
      throw RegionMismatchError("eval_gradient_single_layer: target not interior");
  }
  const double u = on_surface ? shape.u0() : target.u;

  // Prefactor per mode: single-layer exterior/interior factor times density.
  const auto pref = single_layer_multipliers(
      shape, surface_table, p, exterior_branch ? OperatorSide::Exterior : OperatorSide::Interior);

  const LegendreTable local =
      on_surface ? surface_table : detail::radial_table(shape, u, p, exterior_branch);
  auto radial_f = [&](int n, int m) { return exterior_branch ? local.q(n, m) : local.p(n, m); };
  auto radial_df = [&](int n, int m) {
    return s_rad * (exterior_branch ? local.dq(n, m) : local.dp(n, m));
  };

  const double a = shape.focal();
  const double s = shape.sign();
  const double w_u = u * u + s;
  const double one_v2 = 1.0 - target.v * target.v;

  if (one_v2 < 1e-28) {
    // Axis limit: Cartesian gradient from the m = 0 and |m| = 1 modes.
    const double v_ax = target.v >= 0 ? 1.0 : -1.0;
    GradientVec g{0, 0, 0};
    for (int n = 0; n <= p; ++n) {
      const complexd c0 = pref.at(n, 0) * sigma_modified.at(n, 0);
      const double leg0 =
          std::sqrt((2.0 * n + 1) / four_pi) * (v_ax > 0 ? 1.0 : (n % 2 ? -1.0 : 1.0));
      g.z += c0 * leg0 * radial_df(n, 0) * (v_ax / a);
      if (n >= 1) {
        const complexd cp = pref.at(n, 1) * sigma_modified.at(n, 1);
        const complexd cn = pref.at(n, 1) * sigma_modified.at(n, -1);
        // N_{n,1} P_n'(v_ax) with P_n'(+-1) = (+-1)^{n+1} n(n+1)/2.
        const double dsign = v_ax > 0 ? 1.0 : ((n + 1) % 2 ? -1.0 : 1.0);
        const double np1 = std::sqrt((2.0 * n + 1) / (four_pi * n * (n + 1))) * dsign * 0.5 *
                           double(n) * double(n + 1);
        const double fac = radial_f(n, 1) * np1 / (a * std::sqrt(w_u));
        g.x += (cp - cn) * fac;
        g.y += complexd(0, 1) * (cp + cn) * fac;
      }
    }
    return g;
  }

  const double w_uv = u * u + s * target.v * target.v;
  const auto frame = local_frame_body(shape.kind(), a, {u, target.v, target.phi});

  const auto leg = normalized_legendre_table(p + 1, target.v);
  const double inv_sq_uv = 1.0 / std::sqrt(w_uv);
  const double inv_sq_1v2 = 1.0 / std::sqrt(one_v2);
  const double fac_u = std::sqrt(w_u) * inv_sq_uv;
  const double fac_phi = inv_sq_1v2 / std::sqrt(w_u);
  const double fac_v1 = target.v * inv_sq_uv * inv_sq_1v2;
  const double fac_v2 = -inv_sq_uv * inv_sq_1v2;

  // Frame components of the gradient, linear in the direction resolution.
  complexd g_u = 0, g_v = 0, g_phi = 0;
  for (int m = 0; m <= p; ++m) {
    const complexd e = std::polar(1.0, m * target.phi);
    const double msign = (m % 2 == 0) ? 1.0 : -1.0;
    complexd up = 0, un = 0, vp = 0, vn = 0, pp = 0, pn = 0;
    for (int n = m; n <= p; ++n) {
      const double f = radial_f(n, m);
      const double df = radial_df(n, m);
      const double y_n = leg[tri_index(n, m)];
      const double y_n1 = leg[tri_index(n + 1, m)];
      const double couple = std::sqrt((2.0 * n + 1) * (n + m + 1) * (n - m + 1) / (2.0 * n + 3));
      const complexd cp = pref.at(n, m) * sigma_modified.at(n, m);
      const complexd u_term = fac_u * df * y_n;
      const complexd v_term = fac_v1 * double(n + 1) * f * y_n + fac_v2 * couple * f * y_n1;
      const complexd p_term = complexd(0, double(m)) * fac_phi * f * y_n;
      up += cp * u_term;
      vp += cp * v_term;
      pp += cp * p_term;
      if (m > 0) {
        const complexd cn = pref.at(n, m) * sigma_modified.at(n, -m);
        un += cn * u_term;
        vn += cn * v_term;
        pn += cn * (-p_term);
      }
    }
    g_u += up * e;
    g_v += vp * e;
    g_phi += pp * e;
    if (m > 0) {
      g_u += msign * un * std::conj(e);
      g_v += msign * vn * std::conj(e);
      g_phi += msign * pn * std::conj(e);
    }
  }
  g_u /= a;
  g_v /= a;
  g_phi /= a;
  return {g_u * frame.e_u.x + g_v * frame.e_v.x + g_phi * frame.e_phi.x,
          g_u * frame.e_u.y + g_v * frame.e_v.y + g_phi * frame.e_phi.y,
          g_u * frame.e_u.z + g_v * frame.e_v.z + g_phi * frame.e_phi.z};
}

/// Directional derivative (direction is a body-frame Cartesian vector).
inline complexd eval_gradient_single_layer(const SpheroidShape& shape,
                                           const LegendreTable& surface_table,
                                           const HarmonicCoeffs& sigma_modified,
                                           SpheroidalPoint target, vec3 direction_body,
                                           OperatorSide side) {
  const GradientVec g =
      eval_gradient_single_layer_vec(shape, surface_table, sigma_modified, target, side);
  return g.x * direction_body.x + g.y * direction_body.y + g.z * direction_body.z;
}

inline complexd eval_gradient_single_layer(const SpheroidShape& shape,
                                           const HarmonicCoeffs& sigma_modified,
                                           SpheroidalPoint target, vec3 direction_body,
                                           OperatorSide side) {
  return eval_gradient_single_layer(shape, surface_legendre_table(shape, sigma_modified.order),
                                    sigma_modified, target, direction_body, side);
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_LAPLACE_HPP
