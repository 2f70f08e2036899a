// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Boundary integral formulations and their iterative solution on spheroid
// suspensions:
//   exterior Dirichlet:  (1/2) sigma + D[sigma] + C[sigma] = f, with a
//     completion term C that removes the null space: either point sources at
//     the particle centers carrying the surface integrals of sigma, or a
//     (scaled) single-layer term;
//   exterior Neumann:   -(1/2) rho + S'[rho] = g, solved with the
//     single-layer representation u = S[rho].
// The linear systems are matrix-free over density values on the composite
// grid and solved by full-orthogonalization GMRES (no restart). Dense
// condition-number studies assemble the single-particle operator explicitly
// and scan the completion scale for the conditioning minimum.

#ifndef SPHEROIDAL_SOLVER_HPP
#define SPHEROIDAL_SOLVER_HPP

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spheroidal/dense.hpp"
#include "spheroidal/engine.hpp"

namespace spheroidal {

struct PointCharge {
  vec3 location;
  double strength = 0;
};

enum class CompletionKind {
  PointSourceRankOne,        // sum_i q_i / |x - c_i|, q_i = integral of sigma_i
  ScaledPointSourceRankOne,  // eta * the above
  SingleLayerTerm,           // S[sigma]
  ScaledSingleLayerTerm,     // eta * S[sigma]
};

inline bool completion_is_rank_one(CompletionKind c) {
  return c == CompletionKind::PointSourceRankOne ||
         c == CompletionKind::ScaledPointSourceRankOne;
}
inline bool completion_is_scaled(CompletionKind c) {
  return c == CompletionKind::ScaledPointSourceRankOne ||
         c == CompletionKind::ScaledSingleLayerTerm;
}

struct GmresSettings {
  double tol = 1e-10;
  long max_iter = 1000000;  // also capped at the system size
};

struct BvpSpec {
  enum class Kind { DirichletExterior, NeumannExterior };
  Kind kind = Kind::DirichletExterior;
  std::vector<PointCharge> sources;
  CompletionKind completion = CompletionKind::PointSourceRankOne;
  double completion_scale = 1.0;  // used by the scaled variants
  GmresSettings gmres;
};

struct BieSolution {
  Fields densities;
  long iterations = 0;
  std::vector<double> residual_history;  // relative residuals per iteration
  std::vector<double> completion_charges;  // per-particle integral of sigma
};

// ---------------------------------------------------------------------------
// Reference harmonic data generated by interior point charges.

inline double reference_potential(std::span<const PointCharge> sources, vec3 x) {
  double f = 0;
  for (const auto& s : sources) f += s.strength / (four_pi * norm(x - s.location));
  return f;
}

inline vec3 reference_gradient(std::span<const PointCharge> sources, vec3 x) {
  vec3 g{};
  for (const auto& s : sources) {
    const vec3 r = x - s.location;
    const double d = norm(r);
    g += (-s.strength / (four_pi * d * d * d)) * r;
  }
  return g;
}

inline std::vector<double> reference_potential(std::span<const PointCharge> sources,
                                               std::span<const vec3> targets) {
  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t)
    out[t] = reference_potential(sources, targets[t]);
  return out;
}

// ---------------------------------------------------------------------------
// GMRES (full orthogonalization, Givens least squares, no restart).

struct GmresResult {
  std::vector<double> x;
  long iterations = 0;
  std::vector<double> residuals;
  bool converged = false;
};

inline GmresResult gmres(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                         const std::vector<double>& b, double tol, long max_iter) {
  const std::size_t n = b.size();
  GmresResult res;
  res.x.assign(n, 0.0);
  double beta = 0;
  for (double v : b) beta += v * v;
  beta = std::sqrt(beta);
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  const long cap = std::min<long>(max_iter, long(n));
  std::vector<std::vector<double>> basis;
  basis.reserve(cap + 1);
  {
    std::vector<double> v0(b);
    for (double& x : v0) x /= beta;
    basis.push_back(std::move(v0));
  }
  std::vector<std::vector<double>> hess;  // hess[j] holds column j (j+2 entries)
  std::vector<double> cs, sn;
  std::vector<double> g{beta};
  long j = 0;
  for (; j < cap; ++j) {
    std::vector<double> w = apply(basis[j]);
    std::vector<double> hcol(j + 2, 0.0);
    for (long i = 0; i <= j; ++i) {
      double h = 0;
      for (std::size_t k = 0; k < n; ++k) h += w[k] * basis[i][k];
      hcol[i] = h;
      for (std::size_t k = 0; k < n; ++k) w[k] -= h * basis[i][k];
    }
    double wn = 0;
    for (double v : w) wn += v * v;
    wn = std::sqrt(wn);
    hcol[j + 1] = wn;
    // Apply accumulated rotations, then create the new one.
    for (long i = 0; i < j; ++i) {
      const double t = cs[i] * hcol[i] + sn[i] * hcol[i + 1];
      hcol[i + 1] = -sn[i] * hcol[i] + cs[i] * hcol[i + 1];
      hcol[i] = t;
    }
    const double denom = std::hypot(hcol[j], hcol[j + 1]);
    const double c = denom == 0 ? 1.0 : hcol[j] / denom;
    const double s = denom == 0 ? 0.0 : hcol[j + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    hcol[j] = denom;
    hcol[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    hess.push_back(std::move(hcol));
    const double rel = std::abs(g[j + 1]) / beta;
    res.residuals.push_back(rel);
    if (rel <= tol || wn == 0.0) {
      ++j;
      res.converged = true;
      break;
    }
    for (double& x : w) x /= wn;
    basis.push_back(std::move(w));
  }
  res.iterations = j;
  // Back substitution on the rotated Hessenberg system.
  std::vector<double> y(j, 0.0);
  for (long i = j - 1; i >= 0; --i) {
    double s = g[i];
    for (long k = i + 1; k < j; ++k) s -= hess[k][i] * y[k];
    y[i] = s / hess[i][i];
  }
  for (long i = 0; i < j; ++i)
    for (std::size_t k = 0; k < n; ++k) res.x[k] += y[i] * basis[i][k];
  return res;
}

// ---------------------------------------------------------------------------
// Matrix-free BIE applies over stacked grid values.

inline std::vector<double> stack_fields(const Fields& f) {
  std::vector<double> out;
  for (const auto& fi : f) out.insert(out.end(), fi.begin(), fi.end());
  return out;
}

inline Fields unstack_fields(const SuspensionProblem& problem, const std::vector<double>& x) {
  Fields out(problem.size());
  const int per = problem.grid().size();
  for (int i = 0; i < problem.size(); ++i)
    out[i].assign(x.begin() + std::size_t(i) * per, x.begin() + std::size_t(i + 1) * per);
  return out;
}

/// Per-particle surface integrals of a density (the rank-one charges).
inline std::vector<double> completion_charges(const SuspensionProblem& problem,
                                              const Fields& densities) {
  std::vector<double> q(problem.size(), 0.0);
  for (int i = 0; i < problem.size(); ++i) {
    const auto& pd = problem.particle(i);
    for (std::size_t k = 0; k < pd.qweights.size(); ++k)
      q[i] += densities[i][k] * pd.qweights[k];
  }
  return q;
}

/// Rank-one completion field sum_i scale * q_i / |x - c_i|.
inline double rank_one_completion_field(const SuspensionProblem& problem,
                                        std::span<const double> charges, double scale, vec3 x) {
  double acc = 0;
  for (int i = 0; i < problem.size(); ++i)
    acc += scale * charges[i] / norm(x - problem.shape(i).center());
  return acc;
}

/// Matrix-free application of (1/2) I + D + C over stacked values.
inline std::function<std::vector<double>(const std::vector<double>&)> make_dirichlet_apply(
    const SuspensionProblem& problem, CompletionKind completion, double completion_scale,
    const InteractionPlan* plan) {
  const double scale = completion_is_scaled(completion) ? completion_scale : 1.0;
  return [&problem, completion, scale, plan](const std::vector<double>& x) {
    const Fields sigma = unstack_fields(problem, x);
    Fields out = matvec(problem, LayerKernel::DoubleLayer, sigma, plan);
    if (completion_is_rank_one(completion)) {
      const auto q = completion_charges(problem, sigma);
      for (int j = 0; j < problem.size(); ++j) {
        const auto& nodes = problem.particle(j).nodes;
        for (std::size_t t = 0; t < nodes.size(); ++t)
          out[j][t] += rank_one_completion_field(problem, q, scale, nodes[t]);
      }
    } else {
      const Fields s = matvec(problem, LayerKernel::SingleLayer, sigma, plan);
      for (int j = 0; j < problem.size(); ++j)
        for (std::size_t t = 0; t < s[j].size(); ++t) out[j][t] += scale * s[j][t];
    }
    for (int j = 0; j < problem.size(); ++j)
      for (std::size_t t = 0; t < out[j].size(); ++t) out[j][t] += 0.5 * sigma[j][t];
    return stack_fields(out);
  };
}

/// Matrix-free application of -(1/2) I + S' over stacked values.
inline std::function<std::vector<double>(const std::vector<double>&)> make_neumann_apply(
    const SuspensionProblem& problem, const InteractionPlan* plan) {
  return [&problem, plan](const std::vector<double>& x) {
    const Fields rho = unstack_fields(problem, x);
    Fields out = matvec(problem, LayerKernel::SingleLayerNormalDeriv, rho, plan);
    for (int j = 0; j < problem.size(); ++j)
      for (std::size_t t = 0; t < out[j].size(); ++t) out[j][t] -= 0.5 * rho[j][t];
    return stack_fields(out);
  };
}

/// Boundary data on the composite grid.
inline std::vector<double> boundary_data(const SuspensionProblem& problem, const BvpSpec& spec) {
  std::vector<double> b;
  b.reserve(std::size_t(problem.size()) * problem.grid().size());
  for (int i = 0; i < problem.size(); ++i) {
    const auto& pd = problem.particle(i);
    for (std::size_t t = 0; t < pd.nodes.size(); ++t) {
      if (spec.kind == BvpSpec::Kind::DirichletExterior)
        b.push_back(reference_potential(spec.sources, pd.nodes[t]));
      else
        b.push_back(dot(reference_gradient(spec.sources, pd.nodes[t]), pd.normals[t]));
    }
  }
  return b;
}

/// Solves the boundary integral equation for the given problem and spec.
inline BieSolution solve(const SuspensionProblem& problem, const BvpSpec& spec) {
  const auto plan = plan_interactions(problem);
  const auto apply = spec.kind == BvpSpec::Kind::DirichletExterior
                         ? make_dirichlet_apply(problem, spec.completion, spec.completion_scale,
                                                &plan)
                         : make_neumann_apply(problem, &plan);
  const auto b = boundary_data(problem, spec);
  const auto res = gmres(apply, b, spec.gmres.tol, spec.gmres.max_iter);
  if (!res.converged)
    throw GmresStagnationError(res.residuals,
                               "solve: GMRES did not reach tolerance " +
                                   std::to_string(spec.gmres.tol) + " in " +
                                   std::to_string(res.iterations) + " iterations");
  BieSolution sol;
  sol.densities = unstack_fields(problem, res.x);
  sol.iterations = res.iterations;
  sol.residual_history = res.residuals;
  sol.completion_charges = completion_charges(problem, sol.densities);
  return sol;
}

/// Evaluates the solved representation at exterior targets.
inline std::vector<double> solution_at(const SuspensionProblem& problem, const BvpSpec& spec,
                                       const BieSolution& sol, std::span<const vec3> targets) {
  if (spec.kind == BvpSpec::Kind::NeumannExterior)
    return eval_at_targets(problem, LayerKernel::SingleLayer, sol.densities, targets,
                           /*require_exterior=*/true);
  auto out = eval_at_targets(problem, LayerKernel::DoubleLayer, sol.densities, targets,
                             /*require_exterior=*/true);
  const double scale = completion_is_scaled(spec.completion) ? spec.completion_scale : 1.0;
  if (completion_is_rank_one(spec.completion)) {
    for (std::size_t t = 0; t < targets.size(); ++t)
      out[t] += rank_one_completion_field(problem, sol.completion_charges, scale, targets[t]);
  } else {
    const auto s = eval_at_targets(problem, LayerKernel::SingleLayer, sol.densities, targets,
                                   /*require_exterior=*/true);
    for (std::size_t t = 0; t < targets.size(); ++t) out[t] += scale * s[t];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditioning studies and the completion-scale heuristics.

enum class CompletionFamily { RankOnePointSource, SingleLayerTerm };

/// Surface area of the spheroid rescaled to unit major semi-axis, as a
/// function of the inverse aspect ratio.
inline double unit_major_axis_area(SpheroidKind kind, double inv_aspect) {
  const double big_r = 1.0 / inv_aspect;
  if (kind == SpheroidKind::Prolate) {
    const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
    return surface_area(SpheroidShape(kind, u0, 1.0 / u0));
  }
  const double u0 = 1.0 / std::sqrt(big_r * big_r - 1.0);
  return surface_area(SpheroidShape(kind, u0, 1.0 / std::sqrt(u0 * u0 + 1.0)));
}

/// Piecewise completion-scale heuristic matched to the conditioning
/// minimizer: rank-one completions scale with the inverse surface area;
/// single-layer completions follow the slender-body scaling for elongated
/// prolates and saturate at 1 for flattened oblates.
inline double heuristic_completion_scale(const SpheroidShape& shape, CompletionFamily family) {
  const double big_r = shape.aspect_ratio();
  const double eps = 1.0 / big_r;
  if (family == CompletionFamily::RankOnePointSource) {
    if (shape.kind() == SpheroidKind::Oblate && big_r > 3.0) return 0.06;
    return eps / unit_major_axis_area(shape.kind(), eps);
  }
  if (shape.kind() == SpheroidKind::Prolate)
    return big_r <= 3.0 ? 0.5 : 1.0 / (2.0 * eps * std::log(1.0 / eps));
  return big_r <= 3.0 ? 0.25 / eps + 0.25 : 1.0;
}

/// Unit-major-axis single-particle shape at a given aspect ratio.
inline SpheroidShape unit_major_shape(SpheroidKind kind, double big_r) {
  if (kind == SpheroidKind::Prolate) {
    const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
    return SpheroidShape(kind, u0, 1.0 / u0);
  }
  const double u0 = 1.0 / std::sqrt(big_r * big_r - 1.0);
  return SpheroidShape(kind, u0, 1.0 / std::sqrt(u0 * u0 + 1.0));
}

/// Dense assembly of a matrix-free apply.
inline DenseMatrix assemble_dense(
    const std::function<std::vector<double>(const std::vector<double>&)>& apply, int n) {
  DenseMatrix a(n, n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = apply(e);
    e[j] = 0.0;
    for (int i = 0; i < n; ++i) a(i, j) = col[i];
  }
  return a;
}

struct ConditionStudyPoint {
  double aspect_ratio = 0;
  double scale_star = 0;      // conditioning-minimizing completion scale
  double cond_at_star = 0;    // condition number at the minimizer
  double cond_unscaled = 0;   // condition number at scale 1
  double heuristic_scale = 0;
};

/// Conditioning of the completed Dirichlet operator on one particle, with a
/// positivity-constrained search for the scale minimizing the dense 2-norm
/// condition number. The operator is linear in the scale, so only two dense
/// assemblies are needed per shape.
inline ConditionStudyPoint condition_study_point(SpheroidKind kind, double big_r,
                                                 CompletionFamily family, int order) {
  const SpheroidShape shape = unit_major_shape(kind, big_r);
  SuspensionProblem problem({shape}, order);
  const auto plan = plan_interactions(problem);
  const int n = problem.grid().size();
  const CompletionKind ck = family == CompletionFamily::RankOnePointSource
                                ? CompletionKind::ScaledPointSourceRankOne
                                : CompletionKind::ScaledSingleLayerTerm;
  const auto apply0 = make_dirichlet_apply(problem, ck, 0.0, &plan);
  const auto apply1 = make_dirichlet_apply(problem, ck, 1.0, &plan);
  const DenseMatrix k0 = assemble_dense(apply0, n);
  DenseMatrix c1 = assemble_dense(apply1, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c1(i, j) -= k0(i, j);

  auto cond_at = [&](double scale) {
    DenseMatrix k = k0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) += scale * c1(i, j);
    return condition_number(k);
  };

  // Coarse logarithmic scan, then golden-section refinement.
  const double lo = std::log(1e-4), hi = std::log(50.0);
  double best_t = lo, best_c = std::numeric_limits<double>::infinity();
  const int coarse = 13;
  for (int k = 0; k < coarse; ++k) {
    const double t = lo + (hi - lo) * k / (coarse - 1);
    const double c = cond_at(std::exp(t));
    if (c < best_c) {
      best_c = c;
      best_t = t;
    }
  }
  const double step = (hi - lo) / (coarse - 1);
  double a = best_t - step, b = best_t + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = cond_at(std::exp(x1)), f2 = cond_at(std::exp(x2));
  for (int it = 0; it < 24 && (b - a) > 1e-3; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = cond_at(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = cond_at(std::exp(x2));
    }
  }
  const double t_star = f1 < f2 ? x1 : x2;
  ConditionStudyPoint out;
  out.aspect_ratio = big_r;
  out.scale_star = std::exp(t_star);
  out.cond_at_star = std::min(f1, f2);
  out.cond_unscaled = cond_at(1.0);
  out.heuristic_scale = heuristic_completion_scale(shape, family);
  return out;
}

inline std::vector<ConditionStudyPoint> condition_study(SpheroidKind kind,
                                                        CompletionFamily family,
                                                        std::span<const double> aspect_ratios,
                                                        int order) {
  std::vector<ConditionStudyPoint> out;
  for (double big_r : aspect_ratios)
    out.push_back(condition_study_point(kind, big_r, family, order));
  return out;
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_SOLVER_HPP
