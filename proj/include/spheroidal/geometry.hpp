// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Prolate/oblate spheroid shapes: coordinate maps, metric factors, surface
// area, point projection and surface-to-surface distances.
//
// Body-frame coordinates (u, v, phi):
//   prolate:  x = a*sqrt(u^2-1)*sqrt(1-v^2)*(cos phi, sin phi), z = a*u*v,
//             u >= 1
//   oblate:   x = a*sqrt(u^2+1)*sqrt(1-v^2)*(cos phi, sin phi), z = a*u*v,
//             u >= 0
// The surface u = u0 has equatorial semi-axis A = a*sqrt(u0^2 -+ 1) and polar
// semi-axis C = a*u0.

#ifndef SPHEROIDAL_GEOMETRY_HPP
#define SPHEROIDAL_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spheroidal/core.hpp"
#include "spheroidal/dense.hpp"
#include "spheroidal/errors.hpp"

namespace spheroidal {

enum class SpheroidKind { Prolate, Oblate };

struct SpheroidalPoint {
  double u = 1;
  double v = 0;    // in [-1, 1]
  double phi = 0;  // in [0, 2*pi)
};

struct MetricCoeffs {
  double h_u = 0, h_v = 0, h_phi = 0;
  double ds_weight = 0;  // surface element factor: dS = ds_weight * dv * dphi
};

class SpheroidShape {
 public:
  SpheroidShape(SpheroidKind kind, double u0, double focal, vec3 center = {},
                quat orientation = {})
      : kind_(kind), u0_(u0), focal_(focal), center_(center), orientation_(orientation) {
    if (!(focal > 0)) throw std::invalid_argument("SpheroidShape: focal scale must be positive");
    if (kind == SpheroidKind::Prolate && !(u0 > 1))
      throw std::invalid_argument("SpheroidShape: prolate requires u0 > 1");
    if (kind == SpheroidKind::Oblate && !(u0 > 0))
      throw std::invalid_argument("SpheroidShape: oblate requires u0 > 0");
    if (std::abs(orientation.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("SpheroidShape: orientation quaternion must be unit");
  }

  SpheroidKind kind() const { return kind_; }
  double u0() const { return u0_; }
  double focal() const { return focal_; }
  vec3 center() const { return center_; }
  quat orientation() const { return orientation_; }

  /// +1 for oblate (u^2+1 family), -1 for prolate (u^2-1 family).
  double sign() const { return kind_ == SpheroidKind::Oblate ? 1.0 : -1.0; }

  /// Equatorial semi-axis A.
  double semi_axis_equatorial() const { return focal_ * std::sqrt(u0_ * u0_ + sign()); }
  /// Polar semi-axis C.
  double semi_axis_polar() const { return focal_ * u0_; }

  /// Major over minor semi-axis; >= 1 for both kinds.
  double aspect_ratio() const {
    const double a_eq = semi_axis_equatorial(), c_pol = semi_axis_polar();
    return kind_ == SpheroidKind::Prolate ? c_pol / a_eq : a_eq / c_pol;
  }

  double diameter() const { return 2.0 * std::max(semi_axis_equatorial(), semi_axis_polar()); }

  vec3 to_global(vec3 body) const { return orientation_.rotate(body) + center_; }
  vec3 to_body(vec3 global) const { return orientation_.conj().rotate(global - center_); }
  vec3 to_global_dir(vec3 body) const { return orientation_.rotate(body); }
  vec3 to_body_dir(vec3 global) const { return orientation_.conj().rotate(global); }

  /// Implicit body-frame function g with g < 1 inside, = 1 on the surface.
  double implicit_value(vec3 global) const {
    const vec3 b = to_body(global);
    const double a_eq = semi_axis_equatorial(), c_pol = semi_axis_polar();
    return (b.x * b.x + b.y * b.y) / (a_eq * a_eq) + b.z * b.z / (c_pol * c_pol);
  }
  bool contains(vec3 global) const { return implicit_value(global) <= 1.0; }

 private:
  SpheroidKind kind_;
  double u0_;
  double focal_;
  vec3 center_;
  quat orientation_;
};

/// Body-frame coordinate map (no pose applied).
inline vec3 to_cartesian_body(SpheroidKind kind, double focal, SpheroidalPoint p) {
  const double s = kind == SpheroidKind::Oblate ? 1.0 : -1.0;
  const double rho = focal * std::sqrt(p.u * p.u + s) * std::sqrt(std::max(0.0, 1.0 - p.v * p.v));
  return {rho * std::cos(p.phi), rho * std::sin(p.phi), focal * p.u * p.v};
}

inline vec3 to_cartesian(const SpheroidShape& shape, SpheroidalPoint p) {
  return shape.to_global(to_cartesian_body(shape.kind(), shape.focal(), p));
}

/// Distance from a body-frame point to the focal set (segment for prolate,
/// ring for oblate).
inline double focal_set_distance(SpheroidKind kind, double focal, vec3 body) {
  const double rho = std::hypot(body.x, body.y);
  if (kind == SpheroidKind::Prolate) {
    const double over = std::max(0.0, std::abs(body.z) - focal);
    return std::hypot(rho, over);
  }
  return std::hypot(rho - focal, body.z);
}

/// Inverse coordinate map without the focal-set guard; on the focal set it
/// returns the chart-limit coordinates (u at its lower bound), which is
/// what potential evaluation needs there.
inline SpheroidalPoint to_spheroidal_clamped(const SpheroidShape& shape, vec3 x) {
  const vec3 b = shape.to_body(x);
  const double a = shape.focal();
  const double alpha = (b.x * b.x + b.y * b.y) / (a * a);
  const double beta = b.z * b.z / (a * a);
  SpheroidalPoint p;
  double t;  // v^2
  if (shape.kind() == SpheroidKind::Prolate) {
    // (s - 1)(1 - t) = alpha, s t = beta with s = u^2.
    const double c1 = alpha + beta + 1.0;
    const double disc = std::sqrt(std::max(0.0, c1 * c1 - 4.0 * beta));
    const double s_big = 0.5 * (c1 + disc);
    p.u = std::sqrt(s_big);
    t = s_big > 0 ? beta / s_big : 0.0;
  } else {
    // (s + 1)(1 - t) = alpha, s t = beta.
    const double c1 = alpha + beta - 1.0;
    const double disc = std::sqrt(c1 * c1 + 4.0 * beta);
    const double s_big = c1 <= 0 ? (2.0 * beta) / (disc - c1) : 0.5 * (c1 + disc);
    p.u = std::sqrt(std::max(0.0, s_big));
    t = s_big > 1e-300 ? std::min(1.0, beta / s_big) : 1.0 - alpha;
  }
  t = std::clamp(t, 0.0, 1.0);
  p.v = std::copysign(std::sqrt(t), b.z);
  if (b.z == 0.0) p.v = 0.0;
  if (shape.kind() == SpheroidKind::Prolate && p.u < 1.0) p.u = 1.0;
  p.phi = std::atan2(b.y, b.x);
  if (p.phi < 0) p.phi += 2.0 * pi;
  return p;
}

/// Inverse coordinate map. Solves the biquadratic for u^2 in closed form,
/// taking the larger root first and recovering the smaller factor from the
/// root product to avoid cancellation. Exact away from the focal set, where
/// it raises FocalDegeneracyError instead of degrading.
inline SpheroidalPoint to_spheroidal(const SpheroidShape& shape, vec3 x) {
  const vec3 b = shape.to_body(x);
  const double a = shape.focal();
  if (focal_set_distance(shape.kind(), a, b) < 1e-12 * a)
    throw FocalDegeneracyError("to_spheroidal: point on the focal set");
  return to_spheroidal_clamped(shape, x);
}

inline MetricCoeffs metric(const SpheroidShape& shape, SpheroidalPoint p) {
  const double a = shape.focal(), s = shape.sign();
  const double uu = p.u * p.u + s;              // u^2 -+ 1
  const double uv = p.u * p.u + s * p.v * p.v;  // u^2 -+ v^2
  const double one_v2 = 1.0 - p.v * p.v;
  MetricCoeffs m;
  m.h_phi = a * std::sqrt(uu * one_v2);
  m.h_v = a * std::sqrt(uv / one_v2);
  m.h_u = a * std::sqrt(uv / uu);
  m.ds_weight = a * a * std::sqrt(uv * uu);
  return m;
}

/// Body-frame orthonormal coordinate frame (e_u, e_v, e_phi) at p.
struct LocalFrame {
  vec3 e_u, e_v, e_phi;
};

inline LocalFrame local_frame_body(SpheroidKind kind, double focal, SpheroidalPoint p) {
  const double s = kind == SpheroidKind::Oblate ? 1.0 : -1.0;
  const double uu = p.u * p.u + s;
  const double one_v2 = std::max(0.0, 1.0 - p.v * p.v);
  const double cphi = std::cos(p.phi), sphi = std::sin(p.phi);
  const double ru = std::sqrt(uu), rv = std::sqrt(one_v2);
  (void)focal;
  // d(x)/du ~ (u/ru * rv * cphi, u/ru * rv * sphi, v); normalize.
  vec3 eu{p.u * rv * cphi, p.u * rv * sphi, p.v * ru};
  // d(x)/dv ~ (-ru * v/rv * cphi, -ru * v/rv * sphi, u); normalize.
  vec3 ev{-ru * p.v * cphi, -ru * p.v * sphi, p.u * rv};
  vec3 ep{-sphi, cphi, 0};
  return {normalized(eu), normalized(ev), ep};
}

/// Outward unit normal at a surface point (u = u0), in global coordinates.
inline vec3 surface_normal(const SpheroidShape& shape, SpheroidalPoint p) {
  return shape.to_global_dir(local_frame_body(shape.kind(), shape.focal(), p).e_u);
}

/// Closed-form surface area.
inline double surface_area(const SpheroidShape& shape) {
  const double a_eq = shape.semi_axis_equatorial(), c_pol = shape.semi_axis_polar();
  if (shape.kind() == SpheroidKind::Prolate) {
    const double e2 = 1.0 - (a_eq * a_eq) / (c_pol * c_pol);
    if (e2 <= 0) return four_pi * a_eq * a_eq;
    const double e = std::sqrt(e2);
    return 2.0 * pi * a_eq * a_eq * (1.0 + c_pol / (a_eq * e) * std::asin(e));
  }
  const double e2 = 1.0 - (c_pol * c_pol) / (a_eq * a_eq);
  if (e2 <= 0) return four_pi * a_eq * a_eq;
  const double e = std::sqrt(e2);
  const double atanh_e = 0.5 * (std::log1p(e) - std::log1p(-e));
  return 2.0 * pi * a_eq * a_eq + 2.0 * pi * c_pol * c_pol / (2.0 * e) * 2.0 * atanh_e;
}

// ---------------------------------------------------------------------------
// Point projection and distances.

namespace detail {

/// Closest point on the ellipse (x/e0)^2 + (y/e1)^2 = 1, e0 >= e1 > 0, to the
/// first-quadrant query (y0, y1). Robust bisection on the standard rational
/// equation; handles on-axis queries explicitly.
inline void project_to_ellipse(double e0, double e1, double y0, double y1, double& x0,
                               double& x1) {
  if (y1 > 0) {
    if (y0 > 0) {
      const double z0 = y0 / e0, z1 = y1 / e1;
      const double g0 = z0 * z0 + z1 * z1 - 1.0;
      if (std::abs(g0) < 1e-16) {  // already on the ellipse
        x0 = y0;
        x1 = y1;
        return;
      }
      const double r0 = e0 * y0, r1 = e1 * y1;
      double tlo = -e1 * e1 + r1;
      double thi = -e1 * e1 + std::sqrt(r0 * r0 + r1 * r1);
      if (thi < tlo) thi = tlo;
      auto f = [&](double t) {
        const double a0 = r0 / (t + e0 * e0), a1 = r1 / (t + e1 * e1);
        return a0 * a0 + a1 * a1 - 1.0;
      };
      while (f(thi) > 0) thi = tlo + 2.0 * (thi - tlo) + 1.0;
      for (int it = 0; it < 200; ++it) {
        const double t = 0.5 * (tlo + thi);
        if (t == tlo || t == thi) break;
        (f(t) > 0 ? tlo : thi) = t;
      }
      const double t = 0.5 * (tlo + thi);
      x0 = e0 * e0 * y0 / (t + e0 * e0);
      x1 = e1 * e1 * y1 / (t + e1 * e1);
    } else {
      x0 = 0;
      x1 = e1;
    }
  } else {
    const double cusp = (e0 * e0 - e1 * e1) / e0;
    if (y0 < cusp) {
      x0 = e0 * e0 * y0 / (e0 * e0 - e1 * e1);
      const double f = x0 / e0;
      x1 = e1 * std::sqrt(std::max(0.0, 1.0 - f * f));
    } else {
      x0 = e0;
      x1 = 0;
    }
  }
}

}  // namespace detail

struct SurfaceProjection {
  vec3 point;       // closest point on the surface, global coordinates
  double distance;  // unsigned distance from the query to the surface
  bool inside;      // query lies in the closed solid spheroid
};

/// Closest surface point to an arbitrary point, via the meridian-plane
/// ellipse projection.
inline SurfaceProjection project_to_surface(const SpheroidShape& shape, vec3 x) {
  const vec3 b = shape.to_body(x);
  const double a_eq = shape.semi_axis_equatorial(), c_pol = shape.semi_axis_polar();
  const double rho = std::hypot(b.x, b.y);
  const double zq = std::abs(b.z);
  double pr = 0, pz = 0;  // projected meridian coordinates (rho, |z|)
  if (a_eq >= c_pol) {
    detail::project_to_ellipse(a_eq, c_pol, rho, zq, pr, pz);
  } else {
    detail::project_to_ellipse(c_pol, a_eq, zq, rho, pz, pr);
  }
  vec3 dir{1, 0, 0};
  if (rho > 0) dir = vec3{b.x / rho, b.y / rho, 0};
  vec3 pb{pr * dir.x, pr * dir.y, std::copysign(pz, b.z == 0 ? 1.0 : b.z)};
  SurfaceProjection out;
  out.point = shape.to_global(pb);
  out.distance = norm(x - out.point);
  out.inside = shape.implicit_value(x) <= 1.0;
  return out;
}

inline double distance_to_surface(const SpheroidShape& shape, vec3 x) {
  return project_to_surface(shape, x).distance;
}

/// Circumsphere-based lower bound on the surface-to-surface distance.
inline double pair_distance_lower_bound(const SpheroidShape& s1, const SpheroidShape& s2) {
  const double r1 = 0.5 * s1.diameter(), r2 = 0.5 * s2.diameter();
  return norm(s1.center() - s2.center()) - r1 - r2;
}

namespace detail {

inline bool shape_order_before(const SpheroidShape& a, const SpheroidShape& b) {
  const vec3 ca = a.center(), cb = b.center();
  if (ca.x != cb.x) return ca.x < cb.x;
  if (ca.y != cb.y) return ca.y < cb.y;
  if (ca.z != cb.z) return ca.z < cb.z;
  if (a.u0() != b.u0()) return a.u0() < b.u0();
  if (a.focal() != b.focal()) return a.focal() < b.focal();
  return int(a.kind()) < int(b.kind());
}

/// Gradient and (constant) Hessian of the global-frame implicit function.
inline vec3 implicit_gradient(const SpheroidShape& s, vec3 x) {
  const vec3 b = s.to_body(x);
  const double a2 = s.semi_axis_equatorial() * s.semi_axis_equatorial();
  const double c2 = s.semi_axis_polar() * s.semi_axis_polar();
  return s.to_global_dir({2.0 * b.x / a2, 2.0 * b.y / a2, 2.0 * b.z / c2});
}

inline std::array<double, 9> implicit_hessian(const SpheroidShape& s) {
  // H = sum_k d_k r_k r_k^T with r_k the rotated body axes and
  // d = (2/A^2, 2/A^2, 2/C^2).
  const double a2 = s.semi_axis_equatorial() * s.semi_axis_equatorial();
  const double c2 = s.semi_axis_polar() * s.semi_axis_polar();
  const vec3 rx = s.to_global_dir({1, 0, 0});
  const vec3 ry = s.to_global_dir({0, 1, 0});
  const vec3 rz = s.to_global_dir({0, 0, 1});
  std::array<double, 9> h{};
  auto add = [&](vec3 r, double d) {
    const double rr[3] = {r.x, r.y, r.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h[i * 3 + j] += d * rr[i] * rr[j];
  };
  add(rx, 2.0 / a2);
  add(ry, 2.0 / a2);
  add(rz, 2.0 / c2);
  return h;
}

}  // namespace detail

/// Euclidean surface-to-surface distance between two spheroids. Nonpositive
/// return signals overlap or contact. Two stages: alternating projections
/// between the solid bodies for a warm start, then Newton on the first-order
/// closest-pair system to tolerance 1e-10 * diam.
inline double pair_distance(const SpheroidShape& s1_in, const SpheroidShape& s2_in) {
  const bool swap_args = !detail::shape_order_before(s1_in, s2_in);
  const SpheroidShape& s1 = swap_args ? s2_in : s1_in;
  const SpheroidShape& s2 = swap_args ? s1_in : s2_in;

  const double diam = std::max(s1.diameter(), s2.diameter());
  const double tol = 1e-10 * diam;
  const int iter_cap = 200;
  int used = 0;

  // Quick containment screens.
  if (s1.contains(s2.center()) || s2.contains(s1.center())) {
    const vec3 q = s1.contains(s2.center()) ? s2.center() : s1.center();
    const double depth =
        std::min(distance_to_surface(s1, q), distance_to_surface(s2, q));
    return -std::max(depth, 1e-300);
  }

  // Stage 1: alternating projections between the solids.
  vec3 x = project_to_surface(s1, s2.center()).point;
  vec3 y{};
  double prev_gap = std::numeric_limits<double>::infinity();
  for (;; ++used) {
    if (used > iter_cap)
      throw NoConvergenceError("pair_distance: alternating projections exceeded iteration cap");
    const auto py = project_to_surface(s2, x);
    if (py.inside) {  // x on S1 lies inside S2: overlap
      return -std::max(distance_to_surface(s2, x), 1e-300);
    }
    y = py.point;
    const auto px = project_to_surface(s1, y);
    if (px.inside) {
      return -std::max(distance_to_surface(s1, y), 1e-300);
    }
    x = px.point;
    const double gap = norm(x - y);
    if (prev_gap - gap < 1e-6 * diam) break;  // hand off to Newton
    prev_gap = gap;
  }

  // Stage 2: Newton on the closest-pair optimality system
  //   x - y + lam * grad g1(x) = 0,  y - x + mu * grad g2(y) = 0,
  //   g1(x) = 1,  g2(y) = 1.
  const auto h1 = detail::implicit_hessian(s1);
  const auto h2 = detail::implicit_hessian(s2);
  vec3 g1 = detail::implicit_gradient(s1, x);
  vec3 g2 = detail::implicit_gradient(s2, y);
  double lam = norm(x - y) / std::max(norm(g1), 1e-300);
  double mu = norm(x - y) / std::max(norm(g2), 1e-300);
  for (; used < iter_cap; ++used) {
    g1 = detail::implicit_gradient(s1, x);
    g2 = detail::implicit_gradient(s2, y);
    const vec3 d = x - y;
    const double r[8] = {d.x + lam * g1.x, d.y + lam * g1.y, d.z + lam * g1.z,
                         -d.x + mu * g2.x, -d.y + mu * g2.y, -d.z + mu * g2.z,
                         s1.implicit_value(x) - 1.0,         s2.implicit_value(y) - 1.0};
    double r_pos = 0, r_con = 0;
    for (int i = 0; i < 6; ++i) r_pos = std::max(r_pos, std::abs(r[i]));
    r_con = std::max(std::abs(r[6]), std::abs(r[7]));
    if (r_pos < tol && r_con < 1e-12) break;

    DenseMatrix jac(8, 8);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        jac(i, j) = (i == j ? 1.0 : 0.0) + lam * h1[i * 3 + j];
        jac(i, 3 + j) = (i == j ? -1.0 : 0.0);
        jac(3 + i, j) = (i == j ? -1.0 : 0.0);
        jac(3 + i, 3 + j) = (i == j ? 1.0 : 0.0) + mu * h2[i * 3 + j];
      }
    }
    const double g1a[3] = {g1.x, g1.y, g1.z}, g2a[3] = {g2.x, g2.y, g2.z};
    for (int i = 0; i < 3; ++i) {
      jac(i, 6) = g1a[i];
      jac(3 + i, 7) = g2a[i];
      jac(6, i) = g1a[i];
      jac(7, 3 + i) = g2a[i];
    }
    std::vector<double> rhs(8);
    for (int i = 0; i < 8; ++i) rhs[i] = -r[i];
    std::vector<double> delta;
    try {
      delta = solve_linear(jac, rhs);
    } catch (const Error&) {
      break;  // singular system: keep the projection answer
    }
    double step = 1.0;
    // Limit the step to keep the iterates sane.
    double dmax = 0;
    for (int i = 0; i < 6; ++i) dmax = std::max(dmax, std::abs(delta[i]));
    if (dmax > 0.25 * diam) step = 0.25 * diam / dmax;
    x += step * vec3{delta[0], delta[1], delta[2]};
    y += step * vec3{delta[3], delta[4], delta[5]};
    lam += step * delta[6];
    mu += step * delta[7];
  }
  if (used >= iter_cap) throw NoConvergenceError("pair_distance: iteration cap exceeded");

  // Snap both points to their surfaces and report the gap.
  x = project_to_surface(s1, x).point;
  y = project_to_surface(s2, y).point;
  if (s2.contains(x) || s1.contains(y)) {
    const double depth = std::max(s2.contains(x) ? distance_to_surface(s2, x) : 0.0,
                                  s1.contains(y) ? distance_to_surface(s1, y) : 0.0);
    return -std::max(depth, 1e-300);
  }
  return norm(x - y);
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_GEOMETRY_HPP
