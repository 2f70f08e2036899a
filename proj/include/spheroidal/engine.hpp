// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Multi-particle evaluation of Laplace layer operators on spheroid
// suspensions: all-surfaces matvec and particle-to-target evaluation.
// Targets in a source's far field (distance >= eta * diam of the source) are
// handled by the smooth tensor quadrature; near and on-surface targets go
// through the analytical expansions. Far sums are direct; the kernel loops
// are isolated so a fast summation backend could replace them.

#ifndef SPHEROIDAL_ENGINE_HPP
#define SPHEROIDAL_ENGINE_HPP

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spheroidal/core.hpp"
#include "spheroidal/errors.hpp"
#include "spheroidal/geometry.hpp"
#include "spheroidal/harmonics.hpp"
#include "spheroidal/laplace.hpp"
#include "spheroidal/legendre.hpp"

namespace spheroidal {

// Free-space Laplace kernels.
inline double kernel_single(vec3 x, vec3 y) { return 1.0 / (four_pi * norm(x - y)); }
inline double kernel_double(vec3 x, vec3 y, vec3 n_y) {
  const vec3 r = x - y;
  const double d = norm(r);
  return dot(r, n_y) / (four_pi * d * d * d);
}
inline vec3 kernel_grad_single(vec3 x, vec3 y) {
  const vec3 r = x - y;
  const double d = norm(r);
  return (-1.0 / (four_pi * d * d * d)) * r;
}

/// Quadrature and operator data of one particle at a fixed order.
struct ParticleData {
  SpheroidShape shape;
  std::vector<vec3> nodes;        // global frame, grid layout
  std::vector<vec3> normals;      // outward, global frame
  std::vector<double> qweights;   // ds_weight * gauss_weight * pi/p
  LegendreTable surface_table;    // at u0
};

using Fields = std::vector<std::vector<double>>;

class SuspensionProblem {
 public:
  SuspensionProblem(std::vector<SpheroidShape> shapes, int order, double eta = 1.0)
      : order_(order), eta_(eta), grid_(order) {
    if (shapes.empty()) throw std::invalid_argument("SuspensionProblem: no particles");
    if (eta < 0) throw std::invalid_argument("SuspensionProblem: eta must be >= 0");
    particles_.reserve(shapes.size());
    for (const auto& s : shapes) {
      ParticleData pd{s, {}, {}, {}, surface_legendre_table(s, order)};
      pd.nodes.resize(grid_.size());
      pd.normals.resize(grid_.size());
      pd.qweights.resize(grid_.size());
      for (int j = 0; j < grid_.n_v(); ++j) {
        const double v = grid_.v_nodes()[j];
        const double ds = metric(s, {s.u0(), v, 0.0}).ds_weight;
        for (int k = 0; k < grid_.n_phi(); ++k) {
          const SpheroidalPoint sp{s.u0(), v, grid_.phi_node(k)};
          const int idx = grid_.index(j, k);
          pd.nodes[idx] = to_cartesian(s, sp);
          pd.normals[idx] = surface_normal(s, sp);
          pd.qweights[idx] = ds * grid_.v_weights()[j] * (pi / order);
        }
      }
      particles_.push_back(std::move(pd));
    }
  }

  int order() const { return order_; }
  double eta() const { return eta_; }
  int size() const { return int(particles_.size()); }
  const SurfaceGrid& grid() const { return grid_; }
  const ParticleData& particle(int i) const { return particles_[i]; }
  const SpheroidShape& shape(int i) const { return particles_[i].shape; }

  std::vector<SpheroidShape> shapes() const {
    std::vector<SpheroidShape> out;
    out.reserve(particles_.size());
    for (const auto& p : particles_) out.push_back(p.shape);
    return out;
  }

 private:
  int order_;
  double eta_;
  SurfaceGrid grid_;
  std::vector<ParticleData> particles_;
};

/// Near/far classification per source particle: particle j is far from
/// source i when d(Gamma_i, Gamma_j) >= eta * diam(Gamma_i). Distances come
/// from the circumsphere bound when that alone proves both sides far (the
/// refinement cutoff is twice the near radius); otherwise from the iterative
/// pair solver.
struct InteractionPlan {
  std::vector<std::vector<int>> far;   // per source
  std::vector<std::vector<int>> near;  // per source, excluding self
  std::vector<double> distances;       // raw surface-to-surface, M*M row-major
};

inline InteractionPlan plan_interactions(const SuspensionProblem& problem) {
  const int m = problem.size();
  InteractionPlan plan;
  plan.far.assign(m, {});
  plan.near.assign(m, {});
  plan.distances.assign(std::size_t(m) * m, 0.0);
  std::vector<std::pair<int, int>> overlaps;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const auto& si = problem.shape(i);
      const auto& sj = problem.shape(j);
      const double lb = pair_distance_lower_bound(si, sj);
      const double cutoff =
          2.0 * problem.eta() * std::max(si.diameter(), sj.diameter());
      double d = lb;
      if (lb <= 0.0 || lb < cutoff) d = pair_distance(si, sj);
      if (d <= 0.0) overlaps.emplace_back(i, j);
      plan.distances[std::size_t(i) * m + j] = d;
      plan.distances[std::size_t(j) * m + i] = d;
    }
  }
  if (!overlaps.empty()) {
    std::string what = "plan_interactions: overlapping particles:";
    for (auto [i, j] : overlaps)
      what += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
    throw OverlapError(std::move(overlaps), what);
  }
  for (int i = 0; i < m; ++i) {
    const double near_radius = problem.eta() * problem.shape(i).diameter();
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      if (plan.distances[std::size_t(i) * m + j] >= near_radius)
        plan.far[i].push_back(j);
      else
        plan.near[i].push_back(j);
    }
  }
  return plan;
}

namespace detail {

inline HarmonicCoeffs analyze_density(const SuspensionProblem& problem, int i, LayerKernel op,
                                      std::span<const double> values) {
  const auto& shape = problem.shape(i);
  if (op == LayerKernel::DoubleLayer)
    return forward_transform(problem.grid(), values);
  return to_modified_basis(problem.grid(), shape.kind(), shape.u0(), values);
}

/// Smooth-quadrature contribution of source i at arbitrary targets.
inline void far_field_add(const SuspensionProblem& problem, int i, LayerKernel op,
                          std::span<const double> density, std::span<const vec3> targets,
                          std::span<const vec3> target_normals, std::span<double> out) {
  const auto& src = problem.particle(i);
  parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
    double acc = 0;
    switch (op) {
      case LayerKernel::SingleLayer:
        for (std::size_t q = 0; q < src.nodes.size(); ++q)
          acc += kernel_single(targets[t], src.nodes[q]) * density[q] * src.qweights[q];
        break;
      case LayerKernel::DoubleLayer:
        for (std::size_t q = 0; q < src.nodes.size(); ++q)
          acc += kernel_double(targets[t], src.nodes[q], src.normals[q]) * density[q] *
                 src.qweights[q];
        break;
      case LayerKernel::SingleLayerNormalDeriv:
        for (std::size_t q = 0; q < src.nodes.size(); ++q)
          acc += dot(kernel_grad_single(targets[t], src.nodes[q]), target_normals[t]) *
                 density[q] * src.qweights[q];
        break;
    }
    out[t] += acc;
  });
}

/// Analytical near-field contribution of source i at exterior targets.
inline void near_field_add(const SuspensionProblem& problem, int i, LayerKernel op,
                           const HarmonicCoeffs& coeffs, std::span<const vec3> targets,
                           std::span<const vec3> target_normals, std::span<double> out) {
  const auto& src = problem.particle(i);
  const auto& shape = src.shape;
  if (op == LayerKernel::SingleLayerNormalDeriv) {
    parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
      const auto sp = to_spheroidal(shape, targets[t]);
      if (!(sp.u > shape.u0()))
        throw RegionMismatchError("matvec: neighbor grid point inside source particle");
      const vec3 dir = shape.to_body_dir(target_normals[t]);
      out[t] += eval_gradient_single_layer(shape, src.surface_table, coeffs, sp, dir,
                                           OperatorSide::Exterior)
                    .real();
    });
    return;
  }
  const auto exp = solid_expansion(shape, src.surface_table, op, coeffs, OperatorSide::Exterior);
  parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
    const auto sp = to_spheroidal(shape, targets[t]);
    if (!(sp.u > shape.u0()))
      throw RegionMismatchError("matvec: neighbor grid point inside source particle");
    out[t] += eval_expansion(exp, sp).real();
  });
}

/// Self contribution: diagonal multipliers in coefficient space.
inline void self_add(const SuspensionProblem& problem, int i, LayerKernel op,
                     const HarmonicCoeffs& coeffs, std::span<double> out) {
  const auto& src = problem.particle(i);
  const int p = problem.order();
  SpectralMultipliers mult;
  HarmonicBasis out_basis{};
  switch (op) {
    case LayerKernel::DoubleLayer:
      mult = double_layer_multipliers(src.shape, src.surface_table, p, OperatorSide::SurfaceAvg);
      break;
    case LayerKernel::SingleLayer:
      mult = single_layer_multipliers(src.shape, src.surface_table, p, OperatorSide::SurfaceAvg);
      break;
    case LayerKernel::SingleLayerNormalDeriv:
      mult = single_layer_nderiv_multipliers(src.shape, src.surface_table, p,
                                             OperatorSide::SurfaceAvg);
      out_basis =
          HarmonicBasis{HarmonicBasis::Kind::ModifiedWeighted, src.shape.kind(), src.shape.u0()};
      break;
  }
  const auto result = apply_multipliers(mult, coeffs, out_basis);
  const auto values = inverse_transform_real(problem.grid(), result);
  for (std::size_t q = 0; q < values.size(); ++q) out[q] += values[q];
}

}  // namespace detail

/// Smooth tensor-quadrature evaluation of one particle's layer potential at
/// far targets (caller enforces the distance contract). The normal-derivative
/// kernel needs one unit direction per target.
inline std::vector<double> smooth_quadrature_eval(const SuspensionProblem& problem, int source,
                                                  LayerKernel op, std::span<const double> density,
                                                  std::span<const vec3> targets,
                                                  std::span<const vec3> target_normals = {}) {
  if (op == LayerKernel::SingleLayerNormalDeriv && target_normals.size() != targets.size())
    throw std::invalid_argument("smooth_quadrature_eval: one normal per target required");
  std::vector<double> out(targets.size(), 0.0);
  detail::far_field_add(problem, source, op, density, targets, target_normals, out);
  return out;
}

/// Applies a layer operator to densities sampled on all particle grids,
/// returning the on-surface values (principal value for the double layer and
/// the single-layer normal derivative). One density grid per particle.
inline Fields matvec(const SuspensionProblem& problem, LayerKernel op, const Fields& densities,
                     const InteractionPlan* plan_in = nullptr) {
  const int m = problem.size();
  if (int(densities.size()) != m) throw std::invalid_argument("matvec: density count mismatch");
  for (const auto& d : densities)
    if (int(d.size()) != problem.grid().size())
      throw std::invalid_argument("matvec: density grid size mismatch");
  InteractionPlan local_plan;
  const InteractionPlan* plan = plan_in;
  if (!plan) {
    local_plan = plan_interactions(problem);
    plan = &local_plan;
  }
  Fields out(m, std::vector<double>(problem.grid().size(), 0.0));
  for (int i = 0; i < m; ++i) {
    const auto coeffs = detail::analyze_density(problem, i, op, densities[i]);
    detail::self_add(problem, i, op, coeffs, out[i]);
    for (int j : plan->near[i])
      detail::near_field_add(problem, i, op, coeffs, problem.particle(j).nodes,
                             problem.particle(j).normals, out[j]);
    for (int j : plan->far[i])
      detail::far_field_add(problem, i, op, densities[i], problem.particle(j).nodes,
                            problem.particle(j).normals, out[j]);
  }
  return out;
}

/// Potential field of a layer operator (single or double layer) at arbitrary
/// points. Near/far classification happens per target; targets inside a
/// particle use its interior expansion unless `require_exterior` is set, in
/// which case they raise TargetInsideError.
inline std::vector<double> eval_at_targets(const SuspensionProblem& problem, LayerKernel op,
                                           const Fields& densities, std::span<const vec3> targets,
                                           bool require_exterior = false) {
  if (op == LayerKernel::SingleLayerNormalDeriv)
    throw std::invalid_argument("eval_at_targets: use the gradient evaluator for derivatives");
  const int m = problem.size();
  std::vector<double> out(targets.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto& src = problem.particle(i);
    const auto coeffs = detail::analyze_density(problem, i, op, densities[i]);
    const auto ext =
        solid_expansion(src.shape, src.surface_table, op, coeffs, OperatorSide::Exterior);
    const auto inn =
        solid_expansion(src.shape, src.surface_table, op, coeffs, OperatorSide::Interior);
    const double near_radius = problem.eta() * src.shape.diameter();
    parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
      const vec3 x = targets[t];
      const auto proj = project_to_surface(src.shape, x);
      if (proj.inside) {
        if (require_exterior)
          throw TargetInsideError(i, "eval_at_targets: target inside particle " +
                                         std::to_string(i));
        // The chart may degenerate on the focal set; the potential does not.
        out[t] += eval_expansion(inn, to_spheroidal_clamped(src.shape, x)).real();
      } else if (proj.distance < near_radius) {
        out[t] += eval_expansion(ext, to_spheroidal(src.shape, x)).real();
      } else {
        double acc = 0;
        if (op == LayerKernel::SingleLayer) {
          for (std::size_t q = 0; q < src.nodes.size(); ++q)
            acc += kernel_single(x, src.nodes[q]) * densities[i][q] * src.qweights[q];
        } else {
          for (std::size_t q = 0; q < src.nodes.size(); ++q)
            acc += kernel_double(x, src.nodes[q], src.normals[q]) * densities[i][q] *
                   src.qweights[q];
        }
        out[t] += acc;
      }
    });
  }
  return out;
}

/// Gradient of the single layer summed over particles, at exterior targets.
inline std::vector<vec3> eval_gradient_at_targets(const SuspensionProblem& problem,
                                                  const Fields& densities,
                                                  std::span<const vec3> targets) {
  const int m = problem.size();
  std::vector<vec3> out(targets.size());
  for (int i = 0; i < m; ++i) {
    const auto& src = problem.particle(i);
    const auto coeffs =
        detail::analyze_density(problem, i, LayerKernel::SingleLayer, densities[i]);
    const double near_radius = problem.eta() * src.shape.diameter();
    parallel_for(std::int64_t(targets.size()), [&](std::int64_t t) {
      const vec3 x = targets[t];
      const auto proj = project_to_surface(src.shape, x);
      if (proj.inside)
        throw TargetInsideError(i, "eval_gradient_at_targets: target inside particle " +
                                       std::to_string(i));
      if (proj.distance < near_radius) {
        const auto sp = to_spheroidal(src.shape, x);
        const auto g = eval_gradient_single_layer_vec(src.shape, src.surface_table, coeffs, sp,
                                                      OperatorSide::Exterior);
        out[t] += src.shape.to_global_dir({g.x.real(), g.y.real(), g.z.real()});
      } else {
        vec3 acc{};
        for (std::size_t q = 0; q < src.nodes.size(); ++q)
          acc += (densities[i][q] * src.qweights[q]) * kernel_grad_single(x, src.nodes[q]);
        out[t] += acc;
      }
    });
  }
  return out;
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_ENGINE_HPP
