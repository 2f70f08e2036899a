// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "spheroidal/stokes.hpp"

using namespace spheroidal;

namespace {

SpheroidShape near_sphere(double radius, vec3 center, double ecc = 1e-6) {
  const double big_r = 1.0 + ecc;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  return SpheroidShape(SpheroidKind::Prolate, u0, radius / u0, center, {});
}

std::vector<VectorSurfaceField> random_tractions(const SuspensionProblem& prob, Rng& rng) {
  std::vector<VectorSurfaceField> f(prob.size());
  for (auto& fi : f) {
    fi = VectorSurfaceField::zeros(prob.grid().size());
    for (int q = 0; q < prob.grid().size(); ++q) {
      fi.x[q] = rng.uniform(-1, 1);
      fi.y[q] = rng.uniform(-1, 1);
      fi.z[q] = rng.uniform(-1, 1);
    }
  }
  return f;
}

/// Band-limited scalar test profile, exactly representable at order >= 4.
double smooth_profile(double v, double phi, int which) {
  const complexd y21 = eval_sph_harmonic(2, 1, v, phi);
  const complexd y43 = eval_sph_harmonic(4, 3, v, phi);
  const complexd y10 = eval_sph_harmonic(1, 0, v, phi);
  switch (which) {
    case 0: return 0.6 + y21.real() - 0.4 * y43.imag();
    case 1: return y10.real() + 0.3 * y21.imag();
    default: return 0.8 * y43.real() - 0.2;
  }
}

VectorSurfaceField sample_tractions(const SpheroidShape&, const SurfaceGrid& g) {
  VectorSurfaceField f = VectorSurfaceField::zeros(g.size());
  for (int j = 0; j < g.n_v(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const int q = g.index(j, k);
      f.x[q] = smooth_profile(g.v_nodes()[j], g.phi_node(k), 0);
      f.y[q] = smooth_profile(g.v_nodes()[j], g.phi_node(k), 1);
      f.z[q] = smooth_profile(g.v_nodes()[j], g.phi_node(k), 2);
    }
  return f;
}

}  // namespace

TEST_CASE("zero traction gives zero velocity and pressure") {
  SuspensionProblem prob({near_sphere(1.0, {0, 0, 0})}, 8);
  std::vector<VectorSurfaceField> zeros{VectorSurfaceField::zeros(prob.grid().size())};
  StokesSingleLayer op(prob, zeros, 1.7);
  const std::vector<vec3> targets{{3, 0.2, 0.1}, {1.1, 0.9, 0.3}};
  for (auto u : op.velocity(targets)) CHECK(norm(u) == 0.0);
  for (auto p : op.pressure(targets)) CHECK(p == 0.0);
}

TEST_CASE("far field: Laplace-route assembly is an identity for the Stokeslet sums") {
  Rng rng(101);
  const SpheroidShape s1(SpheroidKind::Prolate, 1.4, 1.0, {0, 0, 0}, rng.unit_quaternion());
  const SpheroidShape s2(SpheroidKind::Oblate, 0.9, 0.8, {4.5, 0.5, -0.3}, rng.unit_quaternion());
  const int p = 10;
  const double mu = 2.3;
  SuspensionProblem prob({s1, s2}, p);
  const auto tr = random_tractions(prob, rng);
  StokesSingleLayer op(prob, tr, mu);
  const auto& inner = op.inner_problem();

  Rng trng(55);
  std::vector<vec3> targets;
  while (targets.size() < 20) {
    const vec3 x{trng.uniform(-12, 16), trng.uniform(-12, 12), trng.uniform(-12, 12)};
    if (distance_to_surface(s1, x) > s1.diameter() && distance_to_surface(s2, x) > s2.diameter())
      targets.push_back(x);
  }
  const auto u = op.velocity(targets);
  const auto pr = op.pressure(targets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const vec3 x = targets[t];
    vec3 u_ref{};
    double p_ref = 0;
    for (int i = 0; i < inner.size(); ++i) {
      const auto& src = inner.particle(i);
      double s_comp[3] = {0, 0, 0};
      vec3 grad_comp[3] = {};
      vec3 grad_dot{};
      for (std::size_t q = 0; q < src.nodes.size(); ++q) {
        const vec3 y = src.nodes[q];
        const vec3 f = op.inner_traction(i, int(q));
        const double w = src.qweights[q];
        const double g = kernel_single(x, y);
        const vec3 gg = kernel_grad_single(x, y);
        const double fa[3] = {f.x, f.y, f.z};
        for (int k = 0; k < 3; ++k) {
          s_comp[k] += w * g * fa[k];
          grad_comp[k] += (w * fa[k]) * gg;
        }
        grad_dot += (w * dot(y, f)) * gg;
      }
      const double xa[3] = {x.x, x.y, x.z};
      double add[3];
      for (int k = 0; k < 3; ++k) {
        double grad_term = 0;
        for (int j = 0; j < 3; ++j) grad_term += xa[j] * grad_comp[j][k];
        add[k] = 0.5 * (s_comp[k] - grad_term + grad_dot[k]) / mu;
      }
      u_ref += vec3{add[0], add[1], add[2]};
      p_ref += -(grad_comp[0].x + grad_comp[1].y + grad_comp[2].z);
    }
    CHECK(norm(u[t] - u_ref) < 1e-12 * (norm(u_ref) + 1.0));
    CHECK(std::abs(pr[t] - p_ref) < 1e-12 * (std::abs(p_ref) + 1.0));

    // The pressure also matches the direct pressure-kernel quadrature.
    double p_kernel = 0;
    for (int i = 0; i < inner.size(); ++i) {
      const auto& src = inner.particle(i);
      for (std::size_t q = 0; q < src.nodes.size(); ++q)
        p_kernel += src.qweights[q] * pressure_kernel(x, src.nodes[q], op.inner_traction(i, int(q)));
    }
    CHECK(std::abs(pr[t] - p_kernel) < 1e-12 * (std::abs(p_kernel) + 1.0));
  }
}

TEST_CASE("near-surface velocity matches heavily oversampled Stokeslet quadrature") {
  // Aspect ratio 2, band-limited traction, target at gap 0.05 * diam.
  const double big_r = 2.0;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  const SpheroidShape shape(SpheroidKind::Prolate, u0, 1.0 / u0, {0, 0, 0});
  const int p = 24;
  const double mu = 1.0;
  SuspensionProblem prob({shape}, p);
  std::vector<VectorSurfaceField> tr{sample_tractions(shape, prob.grid())};
  StokesSingleLayer op(prob, tr, mu);

  std::vector<vec3> targets;
  for (double v : {0.0, 0.55, 0.98}) {
    const SpheroidalPoint sp{shape.u0(), v, 1.2};
    targets.push_back(to_cartesian(shape, sp) +
                      0.05 * shape.diameter() * surface_normal(shape, sp));
  }
  const auto u = op.velocity(targets);

  // Oracle: direct Stokeslet quadrature on an 8x-order grid of the same
  // band-limited traction.
  const SurfaceGrid big(8 * p);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    vec3 ref{};
    for (int j = 0; j < big.n_v(); ++j) {
      const double v = big.v_nodes()[j];
      const double ds = metric(shape, {shape.u0(), v, 0.0}).ds_weight;
      for (int k = 0; k < big.n_phi(); ++k) {
        const SpheroidalPoint yp{shape.u0(), v, big.phi_node(k)};
        const vec3 f{smooth_profile(v, big.phi_node(k), 0), smooth_profile(v, big.phi_node(k), 1),
                     smooth_profile(v, big.phi_node(k), 2)};
        ref += (ds * big.v_weights()[j] * (pi / big.order())) *
               stokeslet(targets[t], to_cartesian(shape, yp), f, mu);
      }
    }
    CHECK(norm(u[t] - ref) < 1e-6 * (norm(ref) + 1.0));
  }
}

TEST_CASE("viscosity scaling and linearity") {
  Rng rng(3);
  SuspensionProblem prob({near_sphere(1.0, {0, 0, 0})}, 8);
  const auto tr = random_tractions(prob, rng);
  const std::vector<vec3> targets{{2.5, 0.4, -0.2}, {0.3, 3.0, 0.8}};
  StokesSingleLayer op1(prob, tr, 1.0);
  StokesSingleLayer op5(prob, tr, 5.0);
  const auto u1 = op1.velocity(targets);
  const auto u5 = op5.velocity(targets);
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(norm(u5[t] - u1[t] / 5.0) < 1e-15 * norm(u1[t]) + 1e-300);

  auto tr2 = tr;
  for (int q = 0; q < prob.grid().size(); ++q) {
    tr2[0].x[q] *= -2.0;
    tr2[0].y[q] *= -2.0;
    tr2[0].z[q] *= -2.0;
  }
  StokesSingleLayer op2(prob, tr2, 1.0);
  const auto u2 = op2.velocity(targets);
  for (std::size_t t = 0; t < targets.size(); ++t)
    CHECK(norm(u2[t] + 2.0 * u1[t]) < 1e-12 * norm(u1[t]));
}

TEST_CASE("velocity is divergence-free and pressure is harmonic (FD checks)") {
  Rng rng(77);
  const SpheroidShape shape(SpheroidKind::Oblate, 0.8, 1.0, {0, 0, 0}, rng.unit_quaternion());
  const int p = 12;
  SuspensionProblem prob({shape}, p);
  const auto tr = random_tractions(prob, rng);
  StokesSingleLayer op(prob, tr, 1.0);
  const double d = shape.diameter();
  auto vel = [&](vec3 x) { return op.velocity(std::vector<vec3>{x})[0]; };
  auto prs = [&](vec3 x) { return op.pressure(std::vector<vec3>{x})[0]; };
  for (int t = 0; t < 3; ++t) {
    const vec3 x{rng.uniform(1.2, 2.0) * d, rng.uniform(0.3, 0.8) * d, rng.uniform(-0.6, 0.6) * d};
    const double h1 = 1e-3 * d;
    const double div1 = std::abs(oracle::fd_divergence(vel, x, h1));
    const double div2 = std::abs(oracle::fd_divergence(vel, x, h1 / 2));
    const double uscale = norm(vel(x)) + 1e-9;
    CHECK(div1 < 1e-5 * uscale / d);
    CHECK(div2 < div1 / 2.0 + 1e-11 * uscale / h1);
    const double lap1 = std::abs(oracle::fd_laplacian(prs, x, h1));
    const double lap2 = std::abs(oracle::fd_laplacian(prs, x, h1 / 2));
    const double pscale = std::abs(prs(x)) + 1e-9;
    CHECK(lap2 < lap1 / 2.5 + 64.0 * 1e-16 * pscale / (h1 * h1 / 4.0));
  }
}

TEST_CASE("uniform traction on a near-sphere produces the Stokeslet monopole far field") {
  const double radius = 0.5;
  const SpheroidShape shape = near_sphere(radius, {0, 0, 0});
  const int p = 12;
  const double mu = 1.3;
  SuspensionProblem prob({shape}, p);
  std::vector<VectorSurfaceField> tr{VectorSurfaceField::zeros(prob.grid().size())};
  const vec3 traction{0.3, -0.7, 1.1};
  for (int q = 0; q < prob.grid().size(); ++q) {
    tr[0].x[q] = traction.x;
    tr[0].y[q] = traction.y;
    tr[0].z[q] = traction.z;
  }
  StokesSingleLayer op(prob, tr, mu);
  const vec3 force = surface_area(shape) * traction;
  const vec3 ray = normalized(vec3{0.48, 0.6, 0.64});
  for (double r : {10.0 * shape.diameter(), 14.0 * shape.diameter()}) {
    const vec3 x = r * ray;
    const vec3 u = op.velocity(std::vector<vec3>{x})[0];
    const vec3 mono = (1.0 / (8.0 * pi * mu)) * (force / r + (dot(ray, force)) * ray / r);
    CHECK(norm(u - mono) < 1e-3 * norm(mono));
  }
}

TEST_CASE("mean curvature: sphere, ordering, convention, FD oracle") {
  // Sphere limit: H = 1/r (average) or 2/r (sum).
  const auto sph = near_sphere(2.0, {0, 0, 0});
  CHECK(mean_curvature(sph, {sph.u0(), 0.3, 1.0}) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(mean_curvature(sph, {sph.u0(), 0.3, 1.0}, CurvatureConvention::SumOfPrincipal) ==
        doctest::Approx(1.0).epsilon(1e-5));

  // Elongated prolate: pole curvature exceeds equator curvature.
  const double big_r = 4.0;
  const double u0 = big_r / std::sqrt(big_r * big_r - 1.0);
  const SpheroidShape pro(SpheroidKind::Prolate, u0, 1.0 / u0);
  CHECK(mean_curvature(pro, {u0, 1.0, 0.0}) > mean_curvature(pro, {u0, 0.0, 0.0}));

  // Closed form vs finite differences of the fundamental forms.
  for (auto kind : {SpheroidKind::Prolate, SpheroidKind::Oblate}) {
    const double uu = kind == SpheroidKind::Prolate ? 1.25 : 0.8;
    const SpheroidShape s(kind, uu, 1.1);
    for (auto [v, phi] : {std::pair{0.31, 0.7}, {-0.62, 2.2}}) {
      auto pos = [&](double vv, double pp) {
        return to_cartesian_body(s.kind(), s.focal(), {s.u0(), vv, pp});
      };
      auto h_from_forms = [&](double hv) {
        const vec3 xv = (pos(v + hv, phi) - pos(v - hv, phi)) / (2 * hv);
        const vec3 xp = (pos(v, phi + hv) - pos(v, phi - hv)) / (2 * hv);
        const vec3 xvv = (pos(v + hv, phi) - 2.0 * pos(v, phi) + pos(v - hv, phi)) / (hv * hv);
        const vec3 xpp = (pos(v, phi + hv) - 2.0 * pos(v, phi) + pos(v, phi - hv)) / (hv * hv);
        const vec3 xvp =
            (pos(v + hv, phi + hv) - pos(v + hv, phi - hv) - pos(v - hv, phi + hv) +
             pos(v - hv, phi - hv)) /
            (4 * hv * hv);
        const vec3 n = local_frame_body(s.kind(), s.focal(), {s.u0(), v, phi}).e_u;
        const double e1 = dot(xv, xv), f1 = dot(xv, xp), g1 = dot(xp, xp);
        const double l2 = dot(xvv, n), m2 = dot(xvp, n), n2v = dot(xpp, n);
        // Second form taken against the inward normal to keep convex
        // surfaces at positive curvature.
        return -(e1 * n2v - 2 * f1 * m2 + g1 * l2) / (2 * (e1 * g1 - f1 * f1));
      };
      // Richardson-extrapolated O(h^4) oracle keeps the roundoff floor low.
      const double h1 = 2e-3;
      const double h_fd = (4.0 * h_from_forms(h1 / 2) - h_from_forms(h1)) / 3.0;
      CHECK(mean_curvature(s, {s.u0(), v, phi}) == doctest::Approx(h_fd).epsilon(1e-8));
    }
  }
}
