// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "spheroidal/solver.hpp"

using namespace spheroidal;

namespace {

SpheroidShape near_sphere(double radius, vec3 center, double ecc = 1e-6) {
  const double big_r = 1.0 + ecc;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  return SpheroidShape(SpheroidKind::Prolate, u0, radius / u0, center, {});
}

}  // namespace

TEST_CASE("reference potential: direct value, gradient, superposition") {
  std::vector<PointCharge> one{{vec3{0, 0, 0}, 1.0}};
  CHECK(reference_potential(one, vec3{0, 0, 2}) == doctest::Approx(1.0 / (8.0 * pi)));

  Rng rng(12);
  std::vector<PointCharge> many;
  for (int i = 0; i < 6; ++i)
    many.push_back({rng.in_ball(0.5), rng.uniform(-0.5, 0.5)});
  const vec3 x{1.7, -0.3, 0.9};
  auto f = [&](vec3 y) { return reference_potential(many, y); };
  const vec3 g_fd = oracle::fd_gradient(f, x, 1e-6);
  CHECK(norm(reference_gradient(many, x) - g_fd) < 1e-8 * (norm(g_fd) + 1));

  double sum = 0;
  for (const auto& s : many) {
    std::vector<PointCharge> single{s};
    sum += reference_potential(single, x);
  }
  CHECK(reference_potential(many, x) == doctest::Approx(sum).epsilon(1e-15));
}

TEST_CASE("Dirichlet apply: rank deficiency without completion, restored with it") {
  const SpheroidShape shape(SpheroidKind::Prolate, 1.5, 1.0, {0.4, 0.2, -0.1});
  SuspensionProblem prob({shape}, 8);
  const auto plan = plan_interactions(prob);
  const int n = prob.grid().size();
  std::vector<double> ones(n, 1.0);

  // No completion (scale 0): (1/2) * 1 + D[1] = 0 on the surface.
  const auto apply0 =
      make_dirichlet_apply(prob, CompletionKind::ScaledPointSourceRankOne, 0.0, &plan);
  for (double v : apply0(ones)) CHECK(std::abs(v) < 1e-12);

  // Rank-one completion: area / |x - c| on the surface, with the integral
  // of the constant density taken by the native grid quadrature.
  const auto apply1 = make_dirichlet_apply(prob, CompletionKind::PointSourceRankOne, 1.0, &plan);
  const auto vals = apply1(ones);
  double area = 0;
  for (double w : prob.particle(0).qweights) area += w;
  CHECK(area == doctest::Approx(surface_area(shape)).epsilon(1e-7));
  for (int t = 0; t < n; ++t) {
    const double expect = area / norm(prob.particle(0).nodes[t] - shape.center());
    CHECK(vals[t] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("gmres: small dense system, monotone residuals") {
  Rng rng(9);
  const int n = 40;
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = 0.05 * rng.uniform(-1, 1);
    a(i, i) += 2.0;
  }
  std::vector<double> xt(n);
  for (auto& v : xt) v = rng.uniform(-1, 1);
  const auto b = a.apply(xt);
  const auto res = gmres([&](const std::vector<double>& v) { return a.apply(v); }, b, 1e-12, 1000);
  CHECK(res.converged);
  for (int i = 0; i < n; ++i) CHECK(res.x[i] == doctest::Approx(xt[i]).epsilon(1e-9));
  for (std::size_t k = 1; k < res.residuals.size(); ++k)
    CHECK(res.residuals[k] <= res.residuals[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("Neumann on a near-sphere: constant data and the jump identity") {
  const double radius = 1.3;
  const auto shape = near_sphere(radius, {0, 0, 0});
  const int p = 12;
  SuspensionProblem prob({shape}, p);
  const auto plan = plan_interactions(prob);

  // Constant flux data g: the sphere solution is rho = -g (constant).
  const double g = 0.75;
  const auto apply = make_neumann_apply(prob, &plan);
  std::vector<double> b(std::size_t(prob.grid().size()), g);
  const auto res = gmres(apply, b, 1e-10, 1000);
  CHECK(res.converged);
  for (double v : res.x) CHECK(v == doctest::Approx(-g).epsilon(1e-6));

  // Solved density satisfies the exterior-limit identity S'+[rho] = data.
  const Fields rho = unstack_fields(prob, res.x);
  Fields snd = matvec(prob, LayerKernel::SingleLayerNormalDeriv, rho, &plan);
  for (int t = 0; t < prob.grid().size(); ++t) {
    const double splus = snd[0][t] - 0.5 * rho[0][t];
    CHECK(std::abs(splus - g) < 1e-9);
  }

  // Zero data gives the zero density.
  const auto zero = gmres(apply, std::vector<double>(b.size(), 0.0), 1e-10, 1000);
  for (double v : zero.x) CHECK(v == 0.0);
}

TEST_CASE("Dirichlet and Neumann solves reproduce the reference potential") {
  Rng rng(77);
  const auto shape = near_sphere(1.0, {0, 0, 0}, 1e-6);
  const int p = 16;
  SuspensionProblem prob({shape}, p);
  BvpSpec spec;
  spec.sources = {{vec3{0.05, -0.1, 0.2}, 0.8}, {vec3{-0.15, 0.02, -0.1}, -0.45}};
  spec.completion = CompletionKind::PointSourceRankOne;

  std::vector<vec3> targets;
  for (int t = 0; t < 24; ++t) {
    const vec3 dir = normalized(vec3{rng.normal(), rng.normal(), rng.normal()});
    targets.push_back((1.0 + 0.4 + 1.1 * rng.uniform()) * dir);
  }
  const auto f_ref = reference_potential(spec.sources, targets);

  const auto sol = solve(prob, spec);
  CHECK(sol.residual_history.back() <= spec.gmres.tol);
  const auto f_d = solution_at(prob, spec, sol, targets);
  double fscale = 0;
  for (double v : f_ref) fscale = std::max(fscale, std::abs(v));
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(std::abs(f_d[t] - f_ref[t]) < 1e-10 * fscale + 1e-12);

  BvpSpec nspec = spec;
  nspec.kind = BvpSpec::Kind::NeumannExterior;
  const auto nsol = solve(prob, nspec);
  const auto f_n = solution_at(prob, nspec, nsol, targets);
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(std::abs(f_n[t] - f_ref[t]) < 1e-9 * fscale + 1e-12);
}

TEST_CASE("completion choice does not change the solution field") {
  Rng rng(5);
  std::vector<SpheroidShape> shapes;
  shapes.emplace_back(SpheroidKind::Prolate, 1.4, 0.9, vec3{0, 0, 0}, rng.unit_quaternion());
  shapes.emplace_back(SpheroidKind::Oblate, 0.9, 0.7, vec3{3.2, 0.6, 0.4},
                      rng.unit_quaternion());
  // The order must resolve the fields below the comparison threshold.
  SuspensionProblem prob(shapes, 18);
  BvpSpec spec;
  spec.sources = {{shapes[0].center() + vec3{0.05, 0, 0.1}, 0.6},
                  {shapes[1].center() + vec3{-0.04, 0.08, 0}, -0.3}};
  spec.completion = CompletionKind::PointSourceRankOne;
  const auto sol_ci = solve(prob, spec);

  BvpSpec spec_s = spec;
  spec_s.completion = CompletionKind::ScaledSingleLayerTerm;
  spec_s.completion_scale = 0.5;
  const auto sol_s = solve(prob, spec_s);

  std::vector<vec3> targets{{1.5, 1.2, 0.7}, {4.8, 1.5, 0.2}, {-1.3, -0.8, 0.5}};
  const auto u_ci = solution_at(prob, spec, sol_ci, targets);
  const auto u_s = solution_at(prob, spec_s, sol_s, targets);
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(std::abs(u_ci[t] - u_s[t]) < 10.0 * spec.gmres.tol);
}

TEST_CASE("completion scale heuristics") {
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Prolate, 2.0),
                                   CompletionFamily::SingleLayerTerm) == doctest::Approx(0.5));
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Prolate, 8.0),
                                   CompletionFamily::SingleLayerTerm) ==
        doctest::Approx(4.0 / std::log(8.0)).epsilon(1e-12));
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Oblate, 10.0),
                                   CompletionFamily::RankOnePointSource) ==
        doctest::Approx(0.06));
  // Oblate single-layer heuristic is continuous at R = 3 and equals 1 above.
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Oblate, 3.0),
                                   CompletionFamily::SingleLayerTerm) == doctest::Approx(1.0));
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Oblate, 5.0),
                                   CompletionFamily::SingleLayerTerm) == doctest::Approx(1.0));
  // Rank-one prolate heuristic: inverse-area scaling.
  const double eps = 0.25;
  const double area = unit_major_axis_area(SpheroidKind::Prolate, eps);
  CHECK(heuristic_completion_scale(unit_major_shape(SpheroidKind::Prolate, 4.0),
                                   CompletionFamily::RankOnePointSource) ==
        doctest::Approx(eps / area).epsilon(1e-12));
}

TEST_CASE("conditioning: oblate single-layer completion minimizer approaches 1") {
  const auto pt =
      condition_study_point(SpheroidKind::Oblate, 4.0, CompletionFamily::SingleLayerTerm, 10);
  CHECK(pt.scale_star == doctest::Approx(1.0).epsilon(0.25));
  CHECK(pt.cond_at_star <= pt.cond_unscaled * (1.0 + 1e-12));
}
