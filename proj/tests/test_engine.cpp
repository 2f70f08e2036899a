// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "spheroidal/engine.hpp"

using namespace spheroidal;

namespace {

SpheroidShape near_sphere(double radius, vec3 center) {
  const double big_r = 1.0 + 1e-9;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  return SpheroidShape(SpheroidKind::Prolate, u0, radius / u0, center, {});
}

Fields constant_fields(const SuspensionProblem& prob, double value) {
  return Fields(prob.size(), std::vector<double>(prob.grid().size(), value));
}

Fields random_fields(const SuspensionProblem& prob, Rng& rng) {
  Fields f(prob.size(), std::vector<double>(prob.grid().size()));
  for (auto& fi : f)
    for (auto& x : fi) x = rng.uniform(-1, 1);
  return f;
}

}  // namespace

TEST_CASE("interaction plan: far, near, eta = 0, overlap") {
  const auto s1 = near_sphere(1.0, {0, 0, 0});
  {
    SuspensionProblem prob({s1, near_sphere(1.0, {10, 0, 0})}, 4, 1.0);
    const auto plan = plan_interactions(prob);
    CHECK(plan.far[0] == std::vector<int>{1});
    CHECK(plan.near[0].empty());
    CHECK(plan.far[1] == std::vector<int>{0});
  }
  {
    SuspensionProblem prob({s1, near_sphere(1.0, {3, 0, 0})}, 4, 1.0);
    const auto plan = plan_interactions(prob);
    CHECK(plan.near[0] == std::vector<int>{1});
    CHECK(plan.far[0].empty());
    CHECK(plan.distances[1] == doctest::Approx(1.0).epsilon(1e-8));
  }
  {
    SuspensionProblem prob({s1, near_sphere(1.0, {3, 0, 0})}, 4, 0.0);
    const auto plan = plan_interactions(prob);
    CHECK(plan.far[0] == std::vector<int>{1});
    CHECK(plan.near[0].empty());
  }
  {
    SuspensionProblem prob({s1, near_sphere(1.0, {1.5, 0, 0})}, 4, 1.0);
    CHECK_THROWS_AS(plan_interactions(prob), OverlapError);
  }
}

TEST_CASE("matvec with one particle reduces to the self path") {
  const SpheroidShape shape(SpheroidKind::Prolate, 1.4, 1.0, {0.2, -0.1, 0.3});
  const int p = 10;
  SuspensionProblem prob({shape}, p);
  Rng rng(42);
  const auto dens = random_fields(prob, rng);
  for (auto op : {LayerKernel::DoubleLayer, LayerKernel::SingleLayer,
                  LayerKernel::SingleLayerNormalDeriv}) {
    const auto out = matvec(prob, op, dens);
    // Reference: coefficient-space application of the surface spectra.
    HarmonicCoeffs c = op == LayerKernel::DoubleLayer
                           ? forward_transform(prob.grid(), std::span<const double>(dens[0]))
                           : to_modified_basis(prob.grid(), shape.kind(), shape.u0(), dens[0]);
    SpectralMultipliers mult;
    HarmonicBasis out_basis{};
    if (op == LayerKernel::DoubleLayer)
      mult = double_layer_multipliers(shape, p, OperatorSide::SurfaceAvg);
    else if (op == LayerKernel::SingleLayer)
      mult = single_layer_multipliers(shape, p, OperatorSide::SurfaceAvg);
    else {
      mult = single_layer_nderiv_multipliers(shape, p, OperatorSide::SurfaceAvg);
      out_basis = HarmonicBasis{HarmonicBasis::Kind::ModifiedWeighted, shape.kind(), shape.u0()};
    }
    const auto ref = inverse_transform_real(prob.grid(), apply_multipliers(mult, c, out_basis));
    for (int q = 0; q < prob.grid().size(); ++q)
      CHECK(out[0][q] == doctest::Approx(ref[q]).epsilon(1e-13));
  }
}

TEST_CASE("matvec far pair equals the direct quadrature sums") {
  Rng rng(7);
  const SpheroidShape s1(SpheroidKind::Prolate, 1.5, 1.0, {0, 0, 0}, rng.unit_quaternion());
  const SpheroidShape s2(SpheroidKind::Oblate, 0.8, 0.9, {7, 1, -2}, rng.unit_quaternion());
  const int p = 12;
  SuspensionProblem prob({s1, s2}, p);
  const auto dens = random_fields(prob, rng);
  for (auto op : {LayerKernel::DoubleLayer, LayerKernel::SingleLayer,
                  LayerKernel::SingleLayerNormalDeriv}) {
    const auto out = matvec(prob, op, dens);
    // Self part of particle 1, from the spectra.
    const auto c1 = op == LayerKernel::DoubleLayer
                        ? forward_transform(prob.grid(), std::span<const double>(dens[1]))
                        : to_modified_basis(prob.grid(), s2.kind(), s2.u0(), dens[1]);
    SpectralMultipliers mult;
    HarmonicBasis ob{};
    if (op == LayerKernel::DoubleLayer)
      mult = double_layer_multipliers(s2, p, OperatorSide::SurfaceAvg);
    else if (op == LayerKernel::SingleLayer)
      mult = single_layer_multipliers(s2, p, OperatorSide::SurfaceAvg);
    else {
      mult = single_layer_nderiv_multipliers(s2, p, OperatorSide::SurfaceAvg);
      ob = HarmonicBasis{HarmonicBasis::Kind::ModifiedWeighted, s2.kind(), s2.u0()};
    }
    const auto self1 = inverse_transform_real(prob.grid(), apply_multipliers(mult, c1, ob));
    // Cross contribution 0 -> 1 recomputed directly.
    const auto& src = prob.particle(0);
    const auto& trg = prob.particle(1);
    for (int t = 0; t < prob.grid().size(); t += 17) {
      double acc = 0;
      for (std::size_t q = 0; q < src.nodes.size(); ++q) {
        if (op == LayerKernel::DoubleLayer)
          acc += kernel_double(trg.nodes[t], src.nodes[q], src.normals[q]) * dens[0][q] *
                 src.qweights[q];
        else if (op == LayerKernel::SingleLayer)
          acc += kernel_single(trg.nodes[t], src.nodes[q]) * dens[0][q] * src.qweights[q];
        else
          acc += dot(kernel_grad_single(trg.nodes[t], src.nodes[q]), trg.normals[t]) *
                 dens[0][q] * src.qweights[q];
      }
      CHECK(out[1][t] == doctest::Approx(acc + self1[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("matvec near pair agrees with an adaptive quadrature oracle") {
  // Two prolates with aspect ratio 2 and a surface gap of 0.01 * diam.
  const double big_r = 2.0;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  const double a = 1.0 / u0;  // polar semi-axis 1
  const double gap = 0.02;    // 0.01 * diam, diam = 2
  const double a_eq = a * std::sqrt(u0 * u0 - 1.0);
  const SpheroidShape s1(SpheroidKind::Prolate, u0, a, {0, 0, 0});
  const SpheroidShape s2(SpheroidKind::Prolate, u0, a, {2 * a_eq + gap, 0, 0});
  const int p = 24;
  SuspensionProblem prob({s1, s2}, p);

  // Sparse band-limited density on particle 0: a handful of modes.
  Rng rng(99);
  HarmonicCoeffs mu(p);
  for (auto [n, m] : {std::pair{0, 0}, {1, 1}, {3, 2}, {5, 0}, {7, 4}}) {
    const complexd z{rng.uniform(-1, 1), m == 0 ? 0.0 : rng.uniform(-1, 1)};
    mu.at(n, m) = z;
    if (m > 0) mu.at(n, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(z);
  }
  Fields dens = constant_fields(prob, 0.0);
  dens[0] = inverse_transform_real(prob.grid(), mu);
  const auto out = matvec(prob, LayerKernel::DoubleLayer, dens);

  // Oracle at a few nodes of particle 2.
  for (int t : {0, prob.grid().index(prob.grid().n_v() / 2, prob.grid().n_phi() / 2),
                prob.grid().index(prob.grid().n_v() / 2, 0)}) {
    const vec3 x = prob.particle(1).nodes[t];
    complexd ref = 0;
    for (int n = 0; n <= p; ++n)
      for (int m = -n; m <= n; ++m) {
        if (std::abs(mu.at(n, m)) == 0.0) continue;
        const complexd integral = oracle::integrate_adaptive_2d(
            [&](double v, double phi) -> complexd {
              const SpheroidalPoint yp{u0, v, phi};
              const vec3 y = to_cartesian(s1, yp);
              const vec3 ny = surface_normal(s1, yp);
              return kernel_double(x, y, ny) * eval_sph_harmonic(n, m, v, phi) *
                     metric(s1, yp).ds_weight;
            },
            -1.0, 1.0, 0.0, 2 * pi, 1e-10);
        ref += mu.at(n, m) * integral;
      }
    CHECK(std::abs(out[1][t] - ref.real()) < 1e-7 * (std::abs(ref) + 1.0));
  }
}

TEST_CASE("smooth quadrature wrapper matches the explicit kernel sums") {
  Rng rng(12);
  const SpheroidShape s1(SpheroidKind::Prolate, 1.5, 1.0, {0, 0, 0}, rng.unit_quaternion());
  SuspensionProblem prob({s1}, 8);
  std::vector<double> dens(prob.grid().size());
  for (auto& v : dens) v = rng.uniform(-1, 1);
  const std::vector<vec3> targets{{4, 1, 0.5}, {-3, 2, 1}};
  const std::vector<vec3> normals{normalized(vec3{1, 1, 0}), normalized(vec3{0, 0.2, 1})};
  const auto s_val = smooth_quadrature_eval(prob, 0, LayerKernel::SingleLayer, dens, targets);
  const auto d_val = smooth_quadrature_eval(prob, 0, LayerKernel::DoubleLayer, dens, targets);
  const auto n_val = smooth_quadrature_eval(prob, 0, LayerKernel::SingleLayerNormalDeriv, dens,
                                            targets, normals);
  const auto& src = prob.particle(0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double es = 0, ed = 0, en = 0;
    for (std::size_t q = 0; q < src.nodes.size(); ++q) {
      es += kernel_single(targets[t], src.nodes[q]) * dens[q] * src.qweights[q];
      ed += kernel_double(targets[t], src.nodes[q], src.normals[q]) * dens[q] * src.qweights[q];
      en += dot(kernel_grad_single(targets[t], src.nodes[q]), normals[t]) * dens[q] *
            src.qweights[q];
    }
    CHECK(s_val[t] == doctest::Approx(es).epsilon(1e-14));
    CHECK(d_val[t] == doctest::Approx(ed).epsilon(1e-14));
    CHECK(n_val[t] == doctest::Approx(en).epsilon(1e-14));
  }
  CHECK_THROWS_AS(
      smooth_quadrature_eval(prob, 0, LayerKernel::SingleLayerNormalDeriv, dens, targets),
      std::invalid_argument);
}

TEST_CASE("matvec is linear") {
  Rng rng(31);
  SuspensionProblem prob({near_sphere(1.0, {0, 0, 0}), near_sphere(0.8, {2.6, 0.4, 0})}, 8);
  const auto f1 = random_fields(prob, rng);
  const auto f2 = random_fields(prob, rng);
  const double al = 0.7, be = -1.3;
  Fields mix(prob.size());
  for (int i = 0; i < prob.size(); ++i) {
    mix[i].resize(prob.grid().size());
    for (int q = 0; q < prob.grid().size(); ++q) mix[i][q] = al * f1[i][q] + be * f2[i][q];
  }
  for (auto op : {LayerKernel::DoubleLayer, LayerKernel::SingleLayer}) {
    const auto y1 = matvec(prob, op, f1);
    const auto y2 = matvec(prob, op, f2);
    const auto ym = matvec(prob, op, mix);
    double scale = 0;
    for (int i = 0; i < prob.size(); ++i)
      for (int q = 0; q < prob.grid().size(); ++q)
        scale = std::max(scale, std::abs(y1[i][q]) + std::abs(y2[i][q]));
    for (int i = 0; i < prob.size(); ++i)
      for (int q = 0; q < prob.grid().size(); ++q)
        CHECK(std::abs(ym[i][q] - (al * y1[i][q] + be * y2[i][q])) < 1e-13 * scale);
  }
}

TEST_CASE("global Gauss identity for a suspension") {
  Rng rng(2);
  std::vector<SpheroidShape> shapes;
  shapes.emplace_back(SpheroidKind::Prolate, 1.3, 1.0, vec3{0, 0, 0}, rng.unit_quaternion());
  shapes.emplace_back(SpheroidKind::Oblate, 0.9, 0.8, vec3{4, 0.5, 0}, rng.unit_quaternion());
  shapes.emplace_back(SpheroidKind::Prolate, 2.0, 0.5, vec3{1.5, 3.5, 1}, rng.unit_quaternion());
  SuspensionProblem prob(shapes, 16);
  const auto ones = constant_fields(prob, 1.0);

  // Exterior target: zero. Interior targets: -1.
  const std::vector<vec3> targets{{8, 8, 6}, shapes[0].center(), shapes[1].center(),
                                  shapes[2].center()};
  const auto vals = eval_at_targets(prob, LayerKernel::DoubleLayer, ones, targets);
  CHECK(std::abs(vals[0]) < 1e-10);
  for (int k = 1; k <= 3; ++k) CHECK(vals[k] == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("superposition: suspension field equals the sum of single-particle fields") {
  Rng rng(17);
  const SpheroidShape s1(SpheroidKind::Prolate, 1.6, 0.9, {0, 0, 0}, rng.unit_quaternion());
  const SpheroidShape s2(SpheroidKind::Oblate, 1.1, 0.7, {3.5, 1, 0.5}, rng.unit_quaternion());
  const int p = 10;
  SuspensionProblem both({s1, s2}, p);
  SuspensionProblem only1({s1}, p);
  SuspensionProblem only2({s2}, p);
  const auto dens = random_fields(both, rng);
  const std::vector<vec3> targets{{1.8, 1.2, 0.4}, {-2, 0.3, 1}, {5.5, 2, -1}};
  const auto v_both = eval_at_targets(both, LayerKernel::SingleLayer, dens, targets);
  const auto v_1 = eval_at_targets(only1, LayerKernel::SingleLayer, {dens[0]}, targets);
  const auto v_2 = eval_at_targets(only2, LayerKernel::SingleLayer, {dens[1]}, targets);
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(v_both[t] == doctest::Approx(v_1[t] + v_2[t]).epsilon(1e-13));
}

TEST_CASE("no jump across the near/far classification boundary") {
  Rng rng(5);
  const SpheroidShape src(SpheroidKind::Prolate, 2.0 / std::sqrt(3.0), std::sqrt(3.0) / 2.0,
                          {0, 0, 0}, rng.unit_quaternion());  // aspect ratio 2
  const int p = 24;
  SuspensionProblem prob({src}, p);
  const auto dens = random_fields(prob, rng);
  const double diam = src.diameter();
  // Walk a ray through d = eta * diam.
  auto value_at = [&](double dist) {
    const vec3 dir = normalized(vec3{0.3, 0.84, 0.45});
    double lo = 0.5 * diam, hi = 4.0 * diam;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (distance_to_surface(src, mid * dir) < dist ? lo : hi) = mid;
    }
    const vec3 x = 0.5 * (lo + hi) * dir;
    return eval_at_targets(prob, LayerKernel::DoubleLayer, dens, std::vector<vec3>{x})[0];
  };
  const double below = value_at(diam * (1.0 - 1e-7));
  const double above = value_at(diam * (1.0 + 1e-7));
  CHECK(std::abs(below - above) < 1e-9);

  // Shrinking eta from 1 to 0.5 barely changes well-separated evaluations.
  SuspensionProblem prob_half({src}, p, 0.5);
  const std::vector<vec3> targets{{1.9 * diam, 0.2, 0.1}, {0, 1.4 * diam, 0.3 * diam}};
  const auto v1 = eval_at_targets(prob, LayerKernel::DoubleLayer, dens, targets);
  const auto v2 = eval_at_targets(prob_half, LayerKernel::DoubleLayer, dens, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) CHECK(std::abs(v1[t] - v2[t]) < 1e-10);
}

TEST_CASE("gradient at targets: paths agree across the boundary, errors propagate") {
  Rng rng(23);
  const SpheroidShape src(SpheroidKind::Oblate, 0.9, 1.0, {0, 0, 0}, rng.unit_quaternion());
  const int p = 16;
  SuspensionProblem prob({src}, p);
  const auto dens = random_fields(prob, rng);
  const double diam = src.diameter();
  const vec3 dir = normalized(vec3{0.5, -0.3, 0.81});
  // Two nearby points straddling the near/far boundary.
  const vec3 x_near = (diam * 1.35) * dir;
  const vec3 x_far = (diam * 1.62) * dir;
  const auto g = eval_gradient_at_targets(prob, dens, std::vector<vec3>{x_near, x_far});
  // Far value against the direct sum.
  vec3 acc{};
  for (std::size_t q = 0; q < prob.particle(0).nodes.size(); ++q)
    acc += (dens[0][q] * prob.particle(0).qweights[q]) *
           kernel_grad_single(x_far, prob.particle(0).nodes[q]);
  CHECK(norm(g[1] - acc) < 1e-13 * (norm(acc) + 1));
  // Near value against the expansion-side directional derivative oracle: the
  // same point evaluated with a problem whose eta makes it far.
  SuspensionProblem prob_tight({src}, p, 0.3);
  const auto g_far_path = eval_gradient_at_targets(prob_tight, dens, std::vector<vec3>{x_near});
  CHECK(norm(g[0] - g_far_path[0]) < 1e-11 * (norm(g[0]) + 1));

  CHECK_THROWS_AS(eval_gradient_at_targets(prob, dens, std::vector<vec3>{vec3{0, 0, 0}}),
                  TargetInsideError);
  CHECK_THROWS_AS(eval_at_targets(prob, LayerKernel::DoubleLayer, dens,
                                  std::vector<vec3>{vec3{0, 0, 0}},
                                  /*require_exterior=*/true),
                  TargetInsideError);
}

TEST_CASE("double layer and single-layer normal derivative are adjoint") {
  // <D[mu], sigma> = <mu, S'[sigma]> under the surface measure.
  Rng rng(444);
  for (auto kind : {SpheroidKind::Prolate, SpheroidKind::Oblate}) {
    const double u0 = kind == SpheroidKind::Prolate ? 1.35 : 0.85;
    const SpheroidShape shape(kind, u0, 1.1, {0, 0, 0}, rng.unit_quaternion());
    const int p = 12;
    SuspensionProblem prob({shape}, p);
    Fields mu(1, std::vector<double>(prob.grid().size()));
    Fields sg = mu;
    for (int q = 0; q < prob.grid().size(); ++q) {
      mu[0][q] = rng.uniform(-1, 1);
      sg[0][q] = rng.uniform(-1, 1);
    }
    const auto d_mu = matvec(prob, LayerKernel::DoubleLayer, mu);
    const auto nd_sg = matvec(prob, LayerKernel::SingleLayerNormalDeriv, sg);
    double lhs = 0, rhs = 0, scale = 0;
    const auto& w = prob.particle(0).qweights;
    for (int q = 0; q < prob.grid().size(); ++q) {
      lhs += w[q] * d_mu[0][q] * sg[0][q];
      rhs += w[q] * mu[0][q] * nd_sg[0][q];
      scale += w[q] * std::abs(d_mu[0][q] * sg[0][q]);
    }
    CHECK(std::abs(lhs - rhs) < 1e-10 * scale);
  }
}
