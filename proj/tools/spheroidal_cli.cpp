// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: boundary-value convergence studies, aspect-ratio
// stress tests, iteration-count sweeps, Stokes scenes, generic operator
// evaluation and the self-test battery. Results are CSV files with a
// metadata header (config hash, seed, version) so identical runs are
// byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spheroidal/experiments.hpp"
#include "spheroidal/io.hpp"

using namespace spheroidal;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed = 1;
  std::vector<int> orders;
};

ConfigMap load_config(const GlobalOptions& g) {
  ConfigMap cfg;
  if (!g.config_path.empty()) cfg = ConfigMap::from_file(g.config_path);
  return cfg;
}

void stamp(CsvWriter& csv, const GlobalOptions& g, const ConfigMap& cfg) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(cfg.content_hash()));
  csv.add_meta("config_hash", hash);
  csv.add_meta("seed", std::to_string(g.seed));
  csv.add_meta("version", library_version);
}

std::string out_path(const GlobalOptions& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

std::vector<SpheroidShape> shapes_from_config(const ConfigMap& cfg, std::uint64_t seed) {
  const std::string geometry = cfg.get_string("geometry", "file");
  if (geometry == "three_prolates") return three_prolate_suspension(seed);
  if (geometry == "mixed") return mixed_suspension(seed);
  if (geometry == "lattice")
    return lattice_suspension(cfg.get_double("lattice_aspect_ratio", 2.0),
                              cfg.get_double("lattice_gap", 1.0));
  if (geometry == "file") {
    const std::string path = cfg.get_string("suspension_file", "");
    if (path.empty()) throw ConfigError("geometry=file requires suspension_file=<path>");
    return load_suspension(path);
  }
  throw ConfigError("unknown geometry '" + geometry +
                    "' (expected file, three_prolates, mixed, lattice)");
}

int cmd_converge(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  ConvergeConfig cc;
  cc.shapes = shapes_from_config(cfg, g.seed);
  const std::string problem = cfg.get_string("problem", "dirichlet");
  if (problem == "dirichlet")
    cc.kind = BvpSpec::Kind::DirichletExterior;
  else if (problem == "neumann")
    cc.kind = BvpSpec::Kind::NeumannExterior;
  else
    throw ConfigError("problem must be dirichlet or neumann");
  cc.completion = completion_from_name(cfg.get_string("completion", "ci"));
  const std::string scale = cfg.get_string("completion_scale", "auto");
  if (scale != "auto") cc.completion_scale = std::stod(scale);
  cc.charges_per_particle = int(cfg.get_long("charges_per_particle", 2));
  cc.seed = g.seed;
  if (!g.orders.empty()) cc.orders = g.orders;
  cc.orders = cfg.get_ints("orders", cc.orders);
  cc.shell_decades = int(cfg.get_long("shell_decades", 6));
  cc.probe_order = int(cfg.get_long("probe_order", 16));
  cc.gmres_tol = cfg.get_double("gmres_tol", 1e-10);
  cfg.reject_unknown();

  // Persist after every completed order so a late failure keeps the rows
  // computed so far.
  const std::string path = out_path(g, "converge.csv");
  auto persist = [&](const std::vector<ConvergeRow>& rows) {
    CsvWriter csv({"p", "shell_distance_over_diam", "max_rel_error", "gmres_iterations"});
    stamp(csv, g, cfg);
    csv.add_meta("problem", problem);
    csv.add_meta("completion", completion_name(cc.completion));
    for (const auto& r : rows)
      csv.add_row({std::to_string(r.order), format_double(r.shell_frac),
                   format_double(r.max_rel_err), std::to_string(r.iterations)});
    csv.write_file(path);
  };
  const auto rows = run_converge(cc, persist);
  persist(rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_stress(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const std::string mode = cfg.get_string("mode", "sweep");
  if (mode == "lattice") {
    LatticeFieldConfig lc;
    lc.aspect_ratio = cfg.get_double("lattice_aspect_ratio", 4.0);
    lc.gap_minor_axes = cfg.get_double("lattice_gap", 1.0);
    lc.order = int(cfg.get_long("order", 16));
    lc.charges_per_particle = int(cfg.get_long("charges_per_particle", 21));
    lc.seed = g.seed;
    lc.plane_n = int(cfg.get_long("plane_n", 24));
    lc.gmres_tol = cfg.get_double("gmres_tol", 1e-10);
    cfg.reject_unknown();
    const auto rows = run_lattice_field(lc);
    CsvWriter csv({"x", "z", "rel_error"});
    stamp(csv, g, cfg);
    for (const auto& r : rows) csv.add_row_values({r.x, r.z, r.rel_err});
    csv.write_file(out_path(g, "stress_lattice.csv"));
    std::cout << "wrote " << out_path(g, "stress_lattice.csv") << "\n";
    return 0;
  }
  if (mode == "condition") {
    const std::string kind_name = cfg.get_string("kind", "prolate");
    const SpheroidKind kind =
        kind_name == "oblate" ? SpheroidKind::Oblate : SpheroidKind::Prolate;
    const std::string family_name = cfg.get_string("completion_family", "s");
    const CompletionFamily family = family_name == "ci" ? CompletionFamily::RankOnePointSource
                                                        : CompletionFamily::SingleLayerTerm;
    const auto ratios = cfg.get_doubles("aspect_ratios", {4.0, 8.0, 16.0});
    const int order = int(cfg.get_long("order", 16));
    cfg.reject_unknown();
    CsvWriter csv({"aspect_ratio", "scale_star", "cond_at_star", "cond_unscaled",
                   "heuristic_scale"});
    stamp(csv, g, cfg);
    csv.add_meta("kind", kind_name);
    csv.add_meta("completion_family", family_name);
    const std::string path = out_path(g, "conditioning.csv");
    for (double big_r : ratios) {
      const auto pt = condition_study_point(kind, big_r, family, order);
      csv.add_row_values({pt.aspect_ratio, pt.scale_star, pt.cond_at_star, pt.cond_unscaled,
                          pt.heuristic_scale});
      csv.write_file(path);
    }
    std::cout << "wrote " << path << "\n";
    return 0;
  }
  StressConfig sc;
  sc.aspect_ratios = cfg.get_doubles("aspect_ratios", sc.aspect_ratios);
  if (!g.orders.empty()) sc.orders = g.orders;
  sc.orders = cfg.get_ints("orders", sc.orders);
  sc.probe_distance = cfg.get_double("probe_distance", 0.5);
  sc.charges_per_particle = int(cfg.get_long("charges_per_particle", 2));
  sc.seed = g.seed;
  sc.probe_order = int(cfg.get_long("probe_order", 16));
  sc.completion = completion_from_name(cfg.get_string("completion", "ci"));
  sc.gmres_tol = cfg.get_double("gmres_tol", 1e-10);
  cfg.reject_unknown();
  const std::string path = out_path(g, "stress.csv");
  auto persist = [&](const std::vector<StressRow>& rows) {
    CsvWriter csv({"aspect_ratio", "p", "max_rel_error", "gmres_iterations"});
    stamp(csv, g, cfg);
    csv.add_meta("probe_distance", format_double(sc.probe_distance));
    for (const auto& r : rows)
      csv.add_row({format_double(r.aspect_ratio), std::to_string(r.order),
                   format_double(r.max_rel_err), std::to_string(r.iterations)});
    csv.write_file(path);
  };
  const auto rows = run_stress(sc, persist);
  persist(rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_gmres_table(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  IterationTableConfig ic;
  ic.aspect_ratios = cfg.get_doubles("aspect_ratios", ic.aspect_ratios);
  ic.gaps = cfg.get_doubles("gaps", ic.gaps);
  {
    std::vector<std::string> names;
    for (auto c : ic.completions) names.push_back(completion_name(c));
    names = cfg.get_strings("completions", names);
    ic.completions.clear();
    for (const auto& n : names) ic.completions.push_back(completion_from_name(n));
  }
  ic.order = int(cfg.get_long("order", 16));
  ic.charges_per_particle = int(cfg.get_long("charges_per_particle", 2));
  ic.seed = g.seed;
  ic.gmres_tol = cfg.get_double("gmres_tol", 1e-10);
  cfg.reject_unknown();
  const auto rows = run_iteration_table(ic);
  CsvWriter csv({"aspect_ratio", "gap_minor_axes", "completion", "completion_scale",
                 "gmres_iterations"});
  stamp(csv, g, cfg);
  csv.add_meta("order", std::to_string(ic.order));
  csv.add_meta("gap_units", "surface gap in minor axes (2A)");
  for (const auto& r : rows)
    csv.add_row({format_double(r.aspect_ratio), format_double(r.gap),
                 completion_name(r.completion), format_double(r.completion_scale),
                 std::to_string(r.iterations)});
  csv.write_file(out_path(g, "gmres_table.csv"));
  std::cout << "wrote " << out_path(g, "gmres_table.csv") << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_stokes_scene(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  StokesSceneConfig sc;
  sc.shapes = shapes_from_config(cfg, g.seed);
  sc.viscosity = cfg.get_double("viscosity", 1.0);
  const std::string conv = cfg.get_string("curvature_convention", "average");
  if (conv == "average")
    sc.convention = CurvatureConvention::Average;
  else if (conv == "sum")
    sc.convention = CurvatureConvention::SumOfPrincipal;
  else
    throw ConfigError("curvature_convention must be average or sum");
  sc.forcing_scale = cfg.get_double("forcing_scale", 1.0);
  sc.order = int(cfg.get_long("order", 16));
  const auto o = cfg.get_doubles("plane_origin", {0, 0, 0});
  const auto au = cfg.get_doubles("plane_axis_u", {1, 0, 0});
  const auto av = cfg.get_doubles("plane_axis_v", {0, 1, 0});
  if (o.size() != 3 || au.size() != 3 || av.size() != 3)
    throw ConfigError("plane_origin/plane_axis_u/plane_axis_v need 3 numbers each");
  sc.plane_origin = {o[0], o[1], o[2]};
  sc.plane_axis_u = {au[0], au[1], au[2]};
  sc.plane_axis_v = {av[0], av[1], av[2]};
  sc.extent_u = cfg.get_double("plane_extent_u", 4.0);
  sc.extent_v = cfg.get_double("plane_extent_v", 4.0);
  sc.n_u = int(cfg.get_long("plane_n_u", 20));
  sc.n_v = int(cfg.get_long("plane_n_v", 20));
  cfg.reject_unknown();
  const auto rows = run_stokes_scene(sc);
  CsvWriter csv({"x", "y", "z", "ux", "uy", "uz", "pressure", "inside_particle"});
  stamp(csv, g, cfg);
  csv.add_meta("viscosity", format_double(sc.viscosity));
  for (const auto& r : rows)
    csv.add_row({format_double(r.position.x), format_double(r.position.y),
                 format_double(r.position.z), format_double(r.velocity.x),
                 format_double(r.velocity.y), format_double(r.velocity.z),
                 format_double(r.pressure), r.inside ? "1" : "0"});
  csv.write_file(out_path(g, "stokes_scene.csv"));
  std::cout << "wrote " << out_path(g, "stokes_scene.csv") << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_eval(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto shapes = shapes_from_config(cfg, g.seed);
  const int order = int(cfg.get_long("order", 16));
  const double eta = cfg.get_double("eta", 1.0);
  SuspensionProblem problem(shapes, order, eta);

  const std::string opname = cfg.get_string("operator", "double");
  LayerKernel op;
  if (opname == "double")
    op = LayerKernel::DoubleLayer;
  else if (opname == "single")
    op = LayerKernel::SingleLayer;
  else
    throw ConfigError("operator must be double or single");

  const std::string density = cfg.get_string("density", "constant:1");
  Fields dens(problem.size(), std::vector<double>(problem.grid().size(), 0.0));
  if (density.rfind("constant:", 0) == 0) {
    const double v = std::stod(density.substr(9));
    for (auto& d : dens) std::fill(d.begin(), d.end(), v);
  } else if (density == "random") {
    Rng rng(g.seed);
    for (auto& d : dens)
      for (auto& v : d) v = rng.uniform(-1, 1);
  } else {
    throw ConfigError("density must be constant:<value> or random");
  }

  const std::string targets_spec = cfg.get_string("targets", "centers");
  std::vector<vec3> targets;
  if (targets_spec == "centers") {
    for (const auto& s : shapes) targets.push_back(s.center());
  } else if (targets_spec.rfind("shell:", 0) == 0) {
    const auto rest = targets_spec.substr(6);
    const auto colon = rest.find(':');
    const double dist = std::stod(rest.substr(0, colon));
    const int po = colon == std::string::npos ? 8 : int(std::stol(rest.substr(colon + 1)));
    for (const auto& s : shapes) {
      const auto pts = shell_targets(s, po, dist);
      targets.insert(targets.end(), pts.begin(), pts.end());
    }
  } else if (targets_spec.rfind("file:", 0) == 0) {
    const std::string path = targets_spec.substr(5);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open targets file '" + path + "'");
    double x, y, z;
    while (in >> x >> y >> z) targets.push_back({x, y, z});
    if (targets.empty()) throw ConfigError("targets file '" + path + "' holds no points");
  } else {
    throw ConfigError("targets must be centers, shell:<dist>[:<order>] or file:<path>");
  }
  cfg.reject_unknown();

  const auto vals = eval_at_targets(problem, op, dens, targets);
  CsvWriter csv({"x", "y", "z", "value"});
  stamp(csv, g, cfg);
  csv.add_meta("operator", opname);
  for (std::size_t t = 0; t < targets.size(); ++t)
    csv.add_row_values({targets[t].x, targets[t].y, targets[t].z, vals[t]});
  csv.write_file(out_path(g, "eval.csv"));
  std::cout << "wrote " << out_path(g, "eval.csv") << " (" << targets.size() << " rows)\n";
  return 0;
}

int cmd_selftest(const GlobalOptions& g) {
  const auto report = run_selftest(g.seed);
  for (const auto& [name, ok] : report.checks)
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  if (!report.all_passed()) {
    std::cout << "selftest: FAILURE\n";
    return 2;
  }
  std::cout << "selftest: all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-potential evaluation and boundary-value experiments on "
               "prolate/oblate spheroid suspensions"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--out", g.out_dir, "output directory (default .)");
  app.add_option("--threads", g.threads, "worker threads for evaluation loops");
  app.add_option("--seed", g.seed, "seed for all randomized fixtures");
  app.add_option("--p", g.orders, "expansion orders (overridable by config 'orders')")
      ->delimiter(',');

  auto* converge = app.add_subcommand("converge", "solve a BVP and scan shells of targets");
  auto* stress = app.add_subcommand("stress", "aspect-ratio accuracy sweep (or lattice field)");
  auto* gtable = app.add_subcommand("gmres-table", "iteration counts across completions");
  auto* scene = app.add_subcommand("stokes-scene", "interfacial-forcing flow on a plane");
  auto* eval = app.add_subcommand("eval", "evaluate a layer operator at targets");
  auto* selftest = app.add_subcommand("selftest", "run the invariant battery");

  CLI11_PARSE(app, argc, argv);
  set_thread_count(g.threads);

  try {
    if (converge->parsed()) return cmd_converge(g);
    if (stress->parsed()) return cmd_stress(g);
    if (gtable->parsed()) return cmd_gmres_table(g);
    if (scene->parsed()) return cmd_stokes_scene(g);
    if (eval->parsed()) return cmd_eval(g);
    if (selftest->parsed()) return cmd_selftest(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
