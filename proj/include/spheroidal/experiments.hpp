// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Experiment drivers behind the CLI subcommands: convergence studies on
// boundary value problems, aspect-ratio stress tests, iteration-count
// sweeps over completion terms, and Stokes scene sampling. Each driver is a
// pure function of its config so the acceptance suite can call it directly.

#ifndef SPHEROIDAL_EXPERIMENTS_HPP
#define SPHEROIDAL_EXPERIMENTS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spheroidal/io.hpp"
#include "spheroidal/solver.hpp"
#include "spheroidal/stokes.hpp"

namespace spheroidal {

// ---------------------------------------------------------------------------
// Shape and data fixtures.

/// Three prolates, unit focal scale, centers (0,0,0), (5,0,0), (3.2,3.2,3.2),
/// seeded random orientations.
inline std::vector<SpheroidShape> three_prolate_suspension(std::uint64_t seed) {
  Rng rng(seed);
  const vec3 centers[3] = {{0, 0, 0}, {5, 0, 0}, {3.2, 3.2, 3.2}};
  const double u0s[3] = {1.1, 1.2, 1.3};
  std::vector<SpheroidShape> shapes;
  for (int i = 0; i < 3; ++i)
    shapes.emplace_back(SpheroidKind::Prolate, u0s[i], 1.0, centers[i], rng.unit_quaternion());
  return shapes;
}

/// Two oblates (u0 = 1.1 at the origin, 1.3 at (3.2,3.2,3.2)) and one
/// prolate (u0 = 1.2 at (5,0,0)).
inline std::vector<SpheroidShape> mixed_suspension(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SpheroidShape> shapes;
  shapes.emplace_back(SpheroidKind::Oblate, 1.1, 1.0, vec3{0, 0, 0}, rng.unit_quaternion());
  shapes.emplace_back(SpheroidKind::Prolate, 1.2, 1.0, vec3{5, 0, 0}, rng.unit_quaternion());
  shapes.emplace_back(SpheroidKind::Oblate, 1.3, 1.0, vec3{3.2, 3.2, 3.2},
                      rng.unit_quaternion());
  return shapes;
}

/// Upright two-by-two lattice of identical prolates with unit polar
/// semi-axis; the surface gap in both lattice directions is `gap_minor_axes`
/// minor axes (2A).
inline std::vector<SpheroidShape> lattice_suspension(double aspect_ratio,
                                                     double gap_minor_axes) {
  const double u0 = aspect_ratio / std::sqrt(aspect_ratio * aspect_ratio - 1.0);
  const double a = 1.0 / u0;
  const double a_eq = a * std::sqrt(u0 * u0 - 1.0);
  const double gap = gap_minor_axes * 2.0 * a_eq;
  const double sx = 2.0 * a_eq + gap;
  const double sz = 2.0 + gap;  // polar semi-axis is 1
  std::vector<SpheroidShape> shapes;
  for (double x : {0.0, sx})
    for (double z : {0.0, sz})
      shapes.emplace_back(SpheroidKind::Prolate, u0, a, vec3{x, 0, z}, quat{});
  return shapes;
}

/// Random point charges near each particle's center, strengths in
/// [-0.5, 0.5], placed within radius_frac of the smallest semi-axis.
inline std::vector<PointCharge> charges_in_particles(const std::vector<SpheroidShape>& shapes,
                                                     int per_particle, std::uint64_t seed,
                                                     double radius_frac = 0.25) {
  Rng rng(seed);
  std::vector<PointCharge> out;
  for (const auto& s : shapes) {
    const double r =
        radius_frac * std::min(s.semi_axis_equatorial(), s.semi_axis_polar());
    for (int k = 0; k < per_particle; ++k) {
      const vec3 offset = s.to_global_dir(rng.in_ball(r));
      out.push_back({s.center() + offset, rng.uniform(-0.5, 0.5)});
    }
  }
  return out;
}

/// Probe shell around one particle: grid points displaced along the outward
/// normal by the given distance.
inline std::vector<vec3> shell_targets(const SpheroidShape& shape, int probe_order,
                                       double distance) {
  const SurfaceGrid g(probe_order);
  std::vector<vec3> out;
  out.reserve(g.size());
  for (int j = 0; j < g.n_v(); ++j)
    for (int k = 0; k < g.n_phi(); ++k) {
      const SpheroidalPoint sp{shape.u0(), g.v_nodes()[j], g.phi_node(k)};
      out.push_back(to_cartesian(shape, sp) + distance * surface_normal(shape, sp));
    }
  return out;
}

/// Maximum relative error of values against a reference, normalized by the
/// largest reference magnitude over the set.
inline double max_relative_error(const std::vector<double>& values,
                                 const std::vector<double>& reference) {
  double scale = 0;
  for (double f : reference) scale = std::max(scale, std::abs(f));
  double err = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    err = std::max(err, std::abs(values[i] - reference[i]));
  return scale > 0 ? err / scale : err;
}

// ---------------------------------------------------------------------------
// Completion-term naming shared by configs and CSVs.

inline CompletionKind completion_from_name(const std::string& name) {
  if (name == "ci") return CompletionKind::PointSourceRankOne;
  if (name == "eta_ci") return CompletionKind::ScaledPointSourceRankOne;
  if (name == "s") return CompletionKind::SingleLayerTerm;
  if (name == "eta_s") return CompletionKind::ScaledSingleLayerTerm;
  throw ConfigError("unknown completion '" + name + "' (expected ci, eta_ci, s, eta_s)");
}

inline std::string completion_name(CompletionKind c) {
  switch (c) {
    case CompletionKind::PointSourceRankOne: return "ci";
    case CompletionKind::ScaledPointSourceRankOne: return "eta_ci";
    case CompletionKind::SingleLayerTerm: return "s";
    default: return "eta_s";
  }
}

/// Completion scale for a spec: explicit number, or the conditioning
/// heuristic evaluated on the largest-aspect particle.
inline double auto_completion_scale(const std::vector<SpheroidShape>& shapes,
                                    CompletionKind completion) {
  if (!completion_is_scaled(completion)) return 1.0;
  const CompletionFamily family = completion_is_rank_one(completion)
                                      ? CompletionFamily::RankOnePointSource
                                      : CompletionFamily::SingleLayerTerm;
  double scale = 0;
  double worst = 0;
  for (const auto& s : shapes)
    if (s.aspect_ratio() > worst) {
      worst = s.aspect_ratio();
      scale = heuristic_completion_scale(s, family);
    }
  return scale;
}

// ---------------------------------------------------------------------------
// Convergence experiment (exterior Dirichlet / Neumann).

struct ConvergeConfig {
  std::vector<SpheroidShape> shapes;
  BvpSpec::Kind kind = BvpSpec::Kind::DirichletExterior;
  CompletionKind completion = CompletionKind::PointSourceRankOne;
  std::optional<double> completion_scale;  // heuristic when unset
  int charges_per_particle = 2;
  std::uint64_t seed = 1;
  std::vector<int> orders{8, 12, 16, 20, 24, 28, 32};
  int shell_decades = 6;  // shells at 10^{-k} * diam, k = 1..decades
  int probe_order = 16;
  double gmres_tol = 1e-10;
};

struct ConvergeRow {
  int order;
  double shell_frac;  // shell distance in units of the particle diameter
  double max_rel_err;
  long iterations;
};

/// Progress hook: called with all rows produced so far after each completed
/// order, so callers can persist partial sweeps.
template <class Row>
using SweepProgress = std::function<void(const std::vector<Row>&)>;

inline std::vector<ConvergeRow> run_converge(const ConvergeConfig& cfg,
                                             const SweepProgress<ConvergeRow>& progress = {}) {
  BvpSpec spec;
  spec.kind = cfg.kind;
  spec.completion = cfg.completion;
  spec.completion_scale =
      cfg.completion_scale ? *cfg.completion_scale
                           : auto_completion_scale(cfg.shapes, cfg.completion);
  spec.gmres.tol = cfg.gmres_tol;
  spec.sources = charges_in_particles(cfg.shapes, cfg.charges_per_particle, cfg.seed);

  // Shell targets and reference values, fixed across orders.
  std::vector<double> shell_fracs;
  for (int k = 1; k <= cfg.shell_decades; ++k) shell_fracs.push_back(std::pow(10.0, -k));
  std::vector<std::vector<vec3>> targets(shell_fracs.size());
  std::vector<std::vector<double>> reference(shell_fracs.size());
  for (std::size_t s = 0; s < shell_fracs.size(); ++s) {
    for (const auto& shape : cfg.shapes) {
      const auto pts = shell_targets(shape, cfg.probe_order, shell_fracs[s] * shape.diameter());
      targets[s].insert(targets[s].end(), pts.begin(), pts.end());
    }
    reference[s] = reference_potential(spec.sources, targets[s]);
  }

  // Ascending sweep so a failure at high order arrives after the earlier
  // rows have been handed to the progress hook.
  std::vector<int> orders = cfg.orders;
  std::sort(orders.begin(), orders.end());
  std::vector<ConvergeRow> rows;
  for (int p : orders) {
    SuspensionProblem problem(cfg.shapes, p);
    const auto sol = solve(problem, spec);
    for (std::size_t s = 0; s < shell_fracs.size(); ++s) {
      const auto vals = solution_at(problem, spec, sol, targets[s]);
      rows.push_back({p, shell_fracs[s], max_relative_error(vals, reference[s]),
                      sol.iterations});
    }
    if (progress) progress(rows);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Aspect-ratio stress test: single prolate, probe shell at a fixed distance.

struct StressConfig {
  std::vector<double> aspect_ratios{1.1, 2.0, 4.0, 8.0};
  std::vector<int> orders{8, 12, 16, 20, 24, 28, 32};
  double probe_distance = 0.5;
  int charges_per_particle = 2;
  std::uint64_t seed = 1;
  int probe_order = 16;
  CompletionKind completion = CompletionKind::PointSourceRankOne;
  double gmres_tol = 1e-10;
};

struct StressRow {
  double aspect_ratio;
  int order;
  double max_rel_err;
  long iterations;
};

inline std::vector<StressRow> run_stress(const StressConfig& cfg,
                                         const SweepProgress<StressRow>& progress = {}) {
  std::vector<int> orders = cfg.orders;
  std::sort(orders.begin(), orders.end());
  std::vector<StressRow> rows;
  for (double big_r : cfg.aspect_ratios) {
    const SpheroidShape shape = unit_major_shape(SpheroidKind::Prolate, big_r);
    BvpSpec spec;
    spec.completion = cfg.completion;
    spec.completion_scale = auto_completion_scale({shape}, cfg.completion);
    spec.gmres.tol = cfg.gmres_tol;
    spec.sources = charges_in_particles({shape}, cfg.charges_per_particle, cfg.seed);
    const auto targets = shell_targets(shape, cfg.probe_order, cfg.probe_distance);
    const auto reference = reference_potential(spec.sources, targets);
    for (int p : orders) {
      SuspensionProblem problem({shape}, p);
      const auto sol = solve(problem, spec);
      const auto vals = solution_at(problem, spec, sol, targets);
      rows.push_back({big_r, p, max_relative_error(vals, reference), sol.iterations});
      if (progress) progress(rows);
    }
  }
  return rows;
}

/// Plane-sampled relative error field for the two-by-two lattice fixture.
struct LatticeFieldConfig {
  double aspect_ratio = 4.0;
  double gap_minor_axes = 1.0;
  int order = 16;
  int charges_per_particle = 21;
  std::uint64_t seed = 1;
  int plane_n = 24;         // samples per direction on the x-z plane
  double margin_frac = 0.5; // plane margin around the lattice, in diameters
  double gmres_tol = 1e-10;
};

struct LatticeFieldRow {
  double x, z;
  double rel_err;  // -1 marks points excluded as inside or too close
};

inline std::vector<LatticeFieldRow> run_lattice_field(const LatticeFieldConfig& cfg) {
  const auto shapes = lattice_suspension(cfg.aspect_ratio, cfg.gap_minor_axes);
  BvpSpec spec;
  spec.completion = CompletionKind::PointSourceRankOne;
  spec.gmres.tol = cfg.gmres_tol;
  spec.sources = charges_in_particles(shapes, cfg.charges_per_particle, cfg.seed);
  SuspensionProblem problem(shapes, cfg.order);
  const auto sol = solve(problem, spec);

  double xlo = 1e300, xhi = -1e300, zlo = 1e300, zhi = -1e300;
  for (const auto& s : shapes) {
    xlo = std::min(xlo, s.center().x - s.diameter());
    xhi = std::max(xhi, s.center().x + s.diameter());
    zlo = std::min(zlo, s.center().z - s.diameter());
    zhi = std::max(zhi, s.center().z + s.diameter());
  }
  const double mx = cfg.margin_frac * (xhi - xlo), mz = cfg.margin_frac * (zhi - zlo);
  xlo -= mx;
  xhi += mx;
  zlo -= mz;
  zhi += mz;

  std::vector<LatticeFieldRow> rows;
  double fscale = 0;
  std::vector<vec3> pts;
  for (int i = 0; i < cfg.plane_n; ++i)
    for (int j = 0; j < cfg.plane_n; ++j) {
      const double x = xlo + (xhi - xlo) * (i + 0.5) / cfg.plane_n;
      const double z = zlo + (zhi - zlo) * (j + 0.5) / cfg.plane_n;
      pts.push_back({x, 0, z});
    }
  std::vector<bool> valid(pts.size(), true);
  for (std::size_t t = 0; t < pts.size(); ++t)
    for (const auto& s : shapes)
      if (s.contains(pts[t]) || distance_to_surface(s, pts[t]) < 1e-3) valid[t] = false;
  std::vector<vec3> live;
  for (std::size_t t = 0; t < pts.size(); ++t)
    if (valid[t]) live.push_back(pts[t]);
  const auto vals = solution_at(problem, spec, sol, live);
  std::vector<double> ref(live.size());
  for (std::size_t t = 0; t < live.size(); ++t) {
    ref[t] = reference_potential(spec.sources, live[t]);
    fscale = std::max(fscale, std::abs(ref[t]));
  }
  std::size_t k = 0;
  for (std::size_t t = 0; t < pts.size(); ++t) {
    if (!valid[t]) {
      rows.push_back({pts[t].x, pts[t].z, -1.0});
    } else {
      rows.push_back({pts[t].x, pts[t].z, std::abs(vals[k] - ref[k]) / fscale});
      ++k;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Iteration-count sweep over aspect ratio, separation and completion.

struct IterationTableConfig {
  std::vector<double> aspect_ratios{1.1, 2.0, 4.0, 8.0};
  std::vector<double> gaps{2.0, 1.0, 0.01};  // in minor axes
  std::vector<CompletionKind> completions{
      CompletionKind::PointSourceRankOne, CompletionKind::ScaledPointSourceRankOne,
      CompletionKind::SingleLayerTerm, CompletionKind::ScaledSingleLayerTerm};
  int order = 16;
  int charges_per_particle = 2;
  std::uint64_t seed = 1;
  double gmres_tol = 1e-10;
};

struct IterationRow {
  double aspect_ratio;
  double gap;
  CompletionKind completion;
  double completion_scale;
  long iterations;
};

inline std::vector<IterationRow> run_iteration_table(const IterationTableConfig& cfg) {
  std::vector<IterationRow> rows;
  for (double big_r : cfg.aspect_ratios) {
    for (double gap : cfg.gaps) {
      const auto shapes = lattice_suspension(big_r, gap);
      SuspensionProblem problem(shapes, cfg.order);
      const auto sources =
          charges_in_particles(shapes, cfg.charges_per_particle, cfg.seed);
      for (auto completion : cfg.completions) {
        BvpSpec spec;
        spec.completion = completion;
        spec.completion_scale = auto_completion_scale(shapes, completion);
        spec.gmres.tol = cfg.gmres_tol;
        spec.sources = sources;
        const auto sol = solve(problem, spec);
        rows.push_back({big_r, gap, completion, spec.completion_scale, sol.iterations});
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Stokes scene: interfacial curvature forcing evaluated on a plane.

struct StokesSceneConfig {
  std::vector<SpheroidShape> shapes;
  double viscosity = 1.0;
  CurvatureConvention convention = CurvatureConvention::Average;
  double forcing_scale = 1.0;  // 0 gives the zero-field control
  int order = 16;
  vec3 plane_origin{0, 0, 0};
  vec3 plane_axis_u{1, 0, 0};
  vec3 plane_axis_v{0, 1, 0};
  double extent_u = 4.0, extent_v = 4.0;
  int n_u = 20, n_v = 20;
};

struct StokesSceneRow {
  vec3 position;
  vec3 velocity;
  double pressure;
  bool inside;
};

inline std::vector<StokesSceneRow> run_stokes_scene(const StokesSceneConfig& cfg) {
  SuspensionProblem problem(cfg.shapes, cfg.order);
  std::vector<VectorSurfaceField> tractions;
  for (const auto& s : cfg.shapes) {
    auto f = interfacial_forcing(s, problem.grid(), cfg.convention);
    for (auto* c : {&f.x, &f.y, &f.z})
      for (double& v : *c) v *= cfg.forcing_scale;
    tractions.push_back(std::move(f));
  }
  StokesSingleLayer op(problem, tractions, cfg.viscosity);

  std::vector<StokesSceneRow> rows;
  std::vector<vec3> fluid_pts;
  std::vector<std::size_t> fluid_idx;
  const vec3 eu = normalized(cfg.plane_axis_u), ev = normalized(cfg.plane_axis_v);
  for (int i = 0; i < cfg.n_u; ++i)
    for (int j = 0; j < cfg.n_v; ++j) {
      const double su = cfg.extent_u * (-1.0 + 2.0 * (i + 0.5) / cfg.n_u);
      const double sv = cfg.extent_v * (-1.0 + 2.0 * (j + 0.5) / cfg.n_v);
      const vec3 x = cfg.plane_origin + su * eu + sv * ev;
      bool inside = false;
      for (const auto& s : cfg.shapes)
        if (s.contains(x) || distance_to_surface(s, x) < 1e-9) inside = true;
      rows.push_back({x, vec3{}, 0.0, inside});
      if (!inside) {
        fluid_pts.push_back(x);
        fluid_idx.push_back(rows.size() - 1);
      }
    }
  const auto u = op.velocity(fluid_pts);
  const auto pr = op.pressure(fluid_pts);
  for (std::size_t k = 0; k < fluid_pts.size(); ++k) {
    rows[fluid_idx[k]].velocity = u[k];
    rows[fluid_idx[k]].pressure = pr[k];
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Self-test battery: fast invariants runnable from the CLI.

struct SelfTestReport {
  std::vector<std::pair<std::string, bool>> checks;
  bool all_passed() const {
    for (const auto& [name, ok] : checks)
      if (!ok) return false;
    return true;
  }
};

inline SelfTestReport run_selftest(std::uint64_t seed = 1) {
  SelfTestReport report;
  auto check = [&](const std::string& name, bool ok) { report.checks.emplace_back(name, ok); };
  Rng rng(seed);

  // Coordinate roundtrips.
  {
    bool ok = true;
    for (auto kind : {SpheroidKind::Prolate, SpheroidKind::Oblate}) {
      const double u0 = kind == SpheroidKind::Prolate ? 1.3 : 0.7;
      const SpheroidShape shape(kind, u0, 0.8, {0.3, -0.2, 0.1}, rng.unit_quaternion());
      for (int i = 0; i < 500; ++i) {
        vec3 x{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
        if (focal_set_distance(kind, shape.focal(), shape.to_body(x)) < 1e-3) continue;
        const vec3 back = to_cartesian(shape, to_spheroidal(shape, x));
        ok = ok && norm(back - x) <= 1e-12 * (norm(x) + shape.focal());
      }
    }
    check("coordinate roundtrip", ok);
  }

  // Legendre Wronskian sweep.
  {
    bool ok = true;
    for (double u : {1.01, 1.5, 5.0}) ok = ok && LegendreTable(LegendreArg::Real, u, 32).max_wronskian_residual() < 1e-10;
    for (double u : {0.1, 1.0, 5.0}) ok = ok && LegendreTable(LegendreArg::Imaginary, u, 32).max_wronskian_residual() < 1e-10;
    check("legendre wronskian", ok);
  }

  // Transform roundtrip.
  {
    const int p = 12;
    const SurfaceGrid g(p);
    HarmonicCoeffs c(p);
    for (int n = 0; n <= p; ++n)
      for (int m = -n; m <= n; ++m) c.at(n, m) = complexd(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto f = inverse_transform(g, c);
    const auto f2 = inverse_transform(g, forward_transform(g, std::span<const complexd>(f)));
    bool ok = true;
    for (int i = 0; i < g.size(); ++i) ok = ok && std::abs(f2[i] - f[i]) < 1e-12;
    check("transform roundtrip", ok);
  }

  // Jump conditions at the multiplier level.
  {
    bool ok = true;
    for (auto kind : {SpheroidKind::Prolate, SpheroidKind::Oblate}) {
      const SpheroidShape shape(kind, kind == SpheroidKind::Prolate ? 1.2 : 0.8, 1.0);
      const int p = 16;
      const auto table = surface_legendre_table(shape, p);
      const auto dp = double_layer_multipliers(shape, table, p, OperatorSide::SurfacePlus);
      const auto dm = double_layer_multipliers(shape, table, p, OperatorSide::SurfaceMinus);
      const auto sp = single_layer_nderiv_multipliers(shape, table, p, OperatorSide::SurfacePlus);
      const auto sm = single_layer_nderiv_multipliers(shape, table, p, OperatorSide::SurfaceMinus);
      for (int n = 0; n <= p; ++n)
        for (int m = 0; m <= n; ++m) {
          ok = ok && std::abs(dp.at(n, m) - dm.at(n, m) - 1.0) < 1e-10;
          ok = ok && std::abs(sp.at(n, m) - sm.at(n, m) + 1.0) < 1e-10;
        }
    }
    check("jump conditions", ok);
  }

  // Gauss identity through the engine.
  {
    std::vector<SpheroidShape> shapes;
    shapes.emplace_back(SpheroidKind::Prolate, 1.3, 1.0, vec3{0, 0, 0}, rng.unit_quaternion());
    shapes.emplace_back(SpheroidKind::Oblate, 0.9, 0.8, vec3{4, 0.5, 0}, rng.unit_quaternion());
    SuspensionProblem prob(shapes, 12);
    const Fields ones(prob.size(), std::vector<double>(prob.grid().size(), 1.0));
    const std::vector<vec3> targets{{8, 8, 6}, shapes[0].center(), shapes[1].center()};
    const auto vals = eval_at_targets(prob, LayerKernel::DoubleLayer, ones, targets);
    check("gauss identity", std::abs(vals[0]) < 1e-10 && std::abs(vals[1] + 1) < 1e-10 &&
                                std::abs(vals[2] + 1) < 1e-10);
  }

  // Linearity of the matvec.
  {
    std::vector<SpheroidShape> shapes;
    shapes.emplace_back(SpheroidKind::Prolate, 1.5, 1.0, vec3{0, 0, 0}, rng.unit_quaternion());
    shapes.emplace_back(SpheroidKind::Prolate, 1.5, 1.0, vec3{3.4, 0, 0}, rng.unit_quaternion());
    SuspensionProblem prob(shapes, 8);
    Fields f1(prob.size(), std::vector<double>(prob.grid().size()));
    Fields f2 = f1, mix = f1;
    for (int i = 0; i < prob.size(); ++i)
      for (int q = 0; q < prob.grid().size(); ++q) {
        f1[i][q] = rng.uniform(-1, 1);
        f2[i][q] = rng.uniform(-1, 1);
        mix[i][q] = 0.3 * f1[i][q] - 1.7 * f2[i][q];
      }
    const auto y1 = matvec(prob, LayerKernel::DoubleLayer, f1);
    const auto y2 = matvec(prob, LayerKernel::DoubleLayer, f2);
    const auto ym = matvec(prob, LayerKernel::DoubleLayer, mix);
    bool ok = true;
    double scale = 1e-300;
    for (int i = 0; i < prob.size(); ++i)
      for (int q = 0; q < prob.grid().size(); ++q)
        scale = std::max(scale, std::abs(y1[i][q]) + std::abs(y2[i][q]));
    for (int i = 0; i < prob.size(); ++i)
      for (int q = 0; q < prob.grid().size(); ++q)
        ok = ok && std::abs(ym[i][q] - (0.3 * y1[i][q] - 1.7 * y2[i][q])) < 1e-13 * scale;
    check("matvec linearity", ok);
  }

  // Harmonicity of an exterior expansion (finite-difference Laplacian).
  {
    const SpheroidShape shape(SpheroidKind::Oblate, 0.8, 1.0);
    HarmonicCoeffs mu(8);
    for (int n = 0; n <= 8; ++n)
      for (int m = 0; m <= n; ++m) {
        const complexd z{rng.uniform(-1, 1), m == 0 ? 0.0 : rng.uniform(-1, 1)};
        mu.at(n, m) = z;
        mu.at(n, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(z);
      }
    const auto ext = solid_expansion(shape, LayerKernel::DoubleLayer, mu, OperatorSide::Exterior);
    auto field = [&](vec3 x) { return eval_expansion(ext, to_spheroidal(shape, x)).real(); };
    const double d = shape.diameter();
    bool ok = true;
    for (int t = 0; t < 3; ++t) {
      const vec3 x{rng.uniform(1.2, 2.0) * d, rng.uniform(-0.5, 0.5) * d,
                   rng.uniform(-0.5, 0.5) * d};
      const double h = 1e-3 * d;
      const double lap_h = std::abs((field({x.x + h, x.y, x.z}) + field({x.x - h, x.y, x.z}) +
                                     field({x.x, x.y + h, x.z}) + field({x.x, x.y - h, x.z}) +
                                     field({x.x, x.y, x.z + h}) + field({x.x, x.y, x.z - h}) -
                                     6 * field(x)) /
                                    (h * h));
      ok = ok && lap_h < 1e-4 * (std::abs(field(x)) + 1e-6) / (d * d) * 1e3;
    }
    check("harmonicity", ok);
  }

  // Oblate reality: potentials of real densities are real.
  {
    const SpheroidShape shape(SpheroidKind::Oblate, 0.7, 1.0);
    const int p = 10;
    const SurfaceGrid g(p);
    std::vector<double> dens(g.size());
    for (auto& v : dens) v = rng.uniform(-1, 1);
    const auto sigma = to_modified_basis(g, shape.kind(), shape.u0(), dens);
    const auto ext = solid_expansion(shape, LayerKernel::SingleLayer, sigma,
                                     OperatorSide::Exterior);
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      const SpheroidalPoint tp{shape.u0() + rng.uniform(0.1, 2.0), rng.uniform(-0.95, 0.95),
                               rng.uniform(0, 2 * pi)};
      const complexd val = eval_expansion(ext, tp);
      ok = ok && std::abs(val.imag()) < 1e-12 * (std::abs(val) + 1.0);
    }
    check("oblate reality", ok);
  }

  return report;
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_EXPERIMENTS_HPP
