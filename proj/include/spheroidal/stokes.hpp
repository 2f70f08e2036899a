// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Stokes single-layer velocity and pressure on spheroid suspensions via the
// Laplace reduction: each velocity component is assembled from Laplace
// single-layer values and gradients,
//   2 mu u_k = S[sigma_k] - sum_j x_j d_k S[sigma_j] + d_k S[y . sigma],
// with the Stokeslet kernel used directly in the far field (the reduction is
// an identity at quadrature level, not an approximation). The pressure is
//   p(x) = -sum_j e_j . grad S[sigma_j](x),
// equal to the integral of the standard pressure kernel r/(4 pi |r|^3).

#ifndef SPHEROIDAL_STOKES_HPP
#define SPHEROIDAL_STOKES_HPP

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "spheroidal/engine.hpp"

namespace spheroidal {

/// Cartesian vector field sampled on a particle grid.
struct VectorSurfaceField {
  std::vector<double> x, y, z;

  static VectorSurfaceField zeros(int n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
            std::vector<double>(n, 0.0)};
  }
  vec3 at(int q) const { return {x[q], y[q], z[q]}; }
};

inline vec3 stokeslet(vec3 x, vec3 y, vec3 f, double viscosity) {
  const vec3 r = x - y;
  const double d = norm(r);
  return (1.0 / (8.0 * pi * viscosity)) * (f / d + (dot(r, f) / (d * d * d)) * r);
}

inline double pressure_kernel(vec3 x, vec3 y, vec3 f) {
  const vec3 r = x - y;
  const double d = norm(r);
  return dot(r, f) / (four_pi * d * d * d);
}

enum class CurvatureConvention { Average, SumOfPrincipal };

/// Mean curvature of the spheroid surface at a surface point, from the
/// implicit ellipsoid form (positive everywhere for these convex surfaces).
inline double mean_curvature(const SpheroidShape& shape, SpheroidalPoint p,
                             CurvatureConvention convention = CurvatureConvention::Average) {
  const vec3 b = to_cartesian_body(shape.kind(), shape.focal(), {shape.u0(), p.v, p.phi});
  const double a2 = shape.semi_axis_equatorial() * shape.semi_axis_equatorial();
  const double c2 = shape.semi_axis_polar() * shape.semi_axis_polar();
  const double rho2 = b.x * b.x + b.y * b.y;
  const double g2 = rho2 / (a2 * a2) + b.z * b.z / (c2 * c2);
  const double g = std::sqrt(g2);
  const double h =
      ((2.0 / a2 + 1.0 / c2) * g2 - (rho2 / (a2 * a2 * a2) + b.z * b.z / (c2 * c2 * c2))) /
      (2.0 * g2 * g);
  return convention == CurvatureConvention::Average ? h : 2.0 * h;
}

/// Interfacial forcing H * n sampled on the grid of one particle.
inline VectorSurfaceField interfacial_forcing(const SpheroidShape& shape, const SurfaceGrid& grid,
                                              CurvatureConvention convention =
                                                  CurvatureConvention::Average) {
  VectorSurfaceField f = VectorSurfaceField::zeros(grid.size());
  for (int j = 0; j < grid.n_v(); ++j)
    for (int k = 0; k < grid.n_phi(); ++k) {
      const SpheroidalPoint sp{shape.u0(), grid.v_nodes()[j], grid.phi_node(k)};
      const double h = mean_curvature(shape, sp, convention);
      const vec3 n = surface_normal(shape, sp);
      const int q = grid.index(j, k);
      f.x[q] = h * n.x;
      f.y[q] = h * n.y;
      f.z[q] = h * n.z;
    }
  return f;
}

namespace detail {

/// Zero-pads coefficients to a higher order.
inline HarmonicCoeffs pad_coeffs(const HarmonicCoeffs& c, int order) {
  HarmonicCoeffs out(order, c.basis);
  for (int n = 0; n <= c.order; ++n)
    for (int m = -n; m <= n; ++m) out.at(n, m) = c.at(n, m);
  return out;
}

/// Per-particle Laplace data for the Stokes reduction, prepared at one order
/// above the input grids to absorb the band growth of y . sigma.
struct StokesParticle {
  std::array<HarmonicCoeffs, 3> comp;  // modified coeffs of sigma_x, sigma_y, sigma_z
  HarmonicCoeffs dot;                  // modified coeffs of y . sigma (global y)
  std::array<std::vector<double>, 3> comp_values;  // on the internal grid
  std::vector<double> dot_values;
  std::vector<SolidExpansion> comp_exp;  // exterior expansions of S[sigma_k]
};

}  // namespace detail

/// Velocity and pressure of the Stokes single layer over a suspension.
/// Input tractions are sampled on the problem's grids (order p); evaluation
/// runs internally at order p+1. Targets must lie in the fluid (outside all
/// particles).
class StokesSingleLayer {
 public:
  StokesSingleLayer(const SuspensionProblem& problem,
                    const std::vector<VectorSurfaceField>& tractions, double viscosity)
      : viscosity_(viscosity),
        inner_(problem.shapes(), problem.order() + 1, problem.eta()) {
    if (int(tractions.size()) != problem.size())
      throw std::invalid_argument("StokesSingleLayer: one traction field per particle");
    if (!(viscosity > 0)) throw std::invalid_argument("StokesSingleLayer: viscosity must be > 0");
    const auto& g0 = problem.grid();
    const auto& g1 = inner_.grid();
    particles_.resize(problem.size());
    for (int i = 0; i < problem.size(); ++i) {
      const auto& shape = problem.shape(i);
      detail::StokesParticle sp;
      for (int k = 0; k < 3; ++k) {
        const auto& vals = k == 0 ? tractions[i].x : (k == 1 ? tractions[i].y : tractions[i].z);
        if (int(vals.size()) != g0.size())
          throw std::invalid_argument("StokesSingleLayer: traction grid size mismatch");
        const auto c0 = forward_transform(g0, std::span<const double>(vals));
        sp.comp_values[k] = inverse_transform_real(g1, detail::pad_coeffs(c0, g1.order()));
        sp.comp[k] =
            to_modified_basis(g1, shape.kind(), shape.u0(), sp.comp_values[k]);
      }
      sp.dot_values.resize(g1.size());
      for (int q = 0; q < g1.size(); ++q) {
        const vec3 y = inner_.particle(i).nodes[q];
        sp.dot_values[q] = y.x * sp.comp_values[0][q] + y.y * sp.comp_values[1][q] +
                           y.z * sp.comp_values[2][q];
      }
      sp.dot = to_modified_basis(g1, shape.kind(), shape.u0(), sp.dot_values);
      for (int k = 0; k < 3; ++k)
        sp.comp_exp.push_back(solid_expansion(shape, inner_.particle(i).surface_table,
                                              LayerKernel::SingleLayer, sp.comp[k],
                                              OperatorSide::Exterior));
      particles_[i] = std::move(sp);
    }
  }

  /// Velocity at fluid targets.
  std::vector<vec3> velocity(std::span<const vec3> targets) const {
    std::vector<vec3> out(targets.size());
    for (int i = 0; i < inner_.size(); ++i) {
      const auto& src = inner_.particle(i);
      const double near_radius = inner_.eta() * src.shape.diameter();
      parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
        const vec3 x = targets[t];
        const auto proj = project_to_surface(src.shape, x);
        if (proj.inside)
          throw TargetInsideError(i, "stokes velocity: target inside particle " +
                                         std::to_string(i));
        if (proj.distance < near_radius) {
          out[t] += near_velocity(i, x);
        } else {
          vec3 acc{};
          for (std::size_t q = 0; q < src.nodes.size(); ++q)
            acc += src.qweights[q] * stokeslet(x, src.nodes[q], traction_at(i, int(q)),
                                               viscosity_);
          out[t] += acc;
        }
      });
    }
    return out;
  }

  /// Pressure at fluid targets.
  std::vector<double> pressure(std::span<const vec3> targets) const {
    std::vector<double> out(targets.size(), 0.0);
    for (int i = 0; i < inner_.size(); ++i) {
      const auto& src = inner_.particle(i);
      const double near_radius = inner_.eta() * src.shape.diameter();
      parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
        const vec3 x = targets[t];
        const auto proj = project_to_surface(src.shape, x);
        if (proj.inside)
          throw TargetInsideError(i, "stokes pressure: target inside particle " +
                                         std::to_string(i));
        if (proj.distance < near_radius) {
          const auto g = component_gradients(i, x);
          out[t] += -(g[0].x + g[1].y + g[2].z);
        } else {
          double acc = 0;
          for (std::size_t q = 0; q < src.nodes.size(); ++q)
            acc += src.qweights[q] * pressure_kernel(x, src.nodes[q], traction_at(i, int(q)));
          out[t] += acc;
        }
      });
    }
    return out;
  }

  const SuspensionProblem& inner_problem() const { return inner_; }

  /// Traction resampled onto the internal grid (diagnostics and tests).
  vec3 inner_traction(int i, int q) const { return traction_at(i, q); }

 private:
  vec3 traction_at(int i, int q) const {
    const auto& d = particles_[i];
    return {d.comp_values[0][q], d.comp_values[1][q], d.comp_values[2][q]};
  }

  /// Global-frame gradients of the three component potentials at x.
  std::array<vec3, 3> component_gradients(int i, vec3 x) const {
    const auto& src = inner_.particle(i);
    const auto sp = to_spheroidal(src.shape, x);
    std::array<vec3, 3> out;
    for (int k = 0; k < 3; ++k) {
      const auto g = eval_gradient_single_layer_vec(src.shape, src.surface_table,
                                                    particles_[i].comp[k], sp,
                                                    OperatorSide::Exterior);
      out[k] = src.shape.to_global_dir({g.x.real(), g.y.real(), g.z.real()});
    }
    return out;
  }

  vec3 near_velocity(int i, vec3 x) const {
    const auto& src = inner_.particle(i);
    const auto sp = to_spheroidal(src.shape, x);
    const auto grads = component_gradients(i, x);
    const auto gdot = eval_gradient_single_layer_vec(src.shape, src.surface_table,
                                                     particles_[i].dot, sp,
                                                     OperatorSide::Exterior);
    const vec3 grad_dot = src.shape.to_global_dir({gdot.x.real(), gdot.y.real(), gdot.z.real()});
    vec3 u{};
    for (int k = 0; k < 3; ++k) {
      const double s_k = eval_expansion(particles_[i].comp_exp[k], sp).real();
      const double grad_term = x.x * grads[0][k] + x.y * grads[1][k] + x.z * grads[2][k];
      const double val = 0.5 * (s_k - grad_term + grad_dot[k]) / viscosity_;
      if (k == 0)
        u.x = val;
      else if (k == 1)
        u.y = val;
      else
        u.z = val;
    }
    return u;
  }

  double viscosity_;
  SuspensionProblem inner_;
  std::vector<detail::StokesParticle> particles_;
};

}  // namespace spheroidal

#endif  // SPHEROIDAL_STOKES_HPP
