// Command-line front end: loads a scene, runs one verification command, and
// prints a deterministic report.  Exit codes: 0 success, 2 malformed input,
// 3 accuracy failure, 4 violated invariant, 1 unexpected error.

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "holo/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Transport operators of flat graded connections over simplices"};
  app.require_subcommand(0, 0);

  std::string command;
  std::string scene_path;
  std::string out_path;
  holo::RunOptions opt;
  bool no_subdivide = false;

  app.add_option("command", command,
                 "holonomy | check-rep | cohomology | sphere-demo | verify-ainfty")
      ->required();
  app.add_option("scene", scene_path, "scene JSON file (not used by verify-ainfty)");
  auto* max_n_opt = app.add_option("--max-n", opt.cfg.max_n, "series truncation order");
  auto* tol_opt = app.add_option("--tol", opt.cfg.tol, "series truncation tolerance");
  auto* quad_opt =
      app.add_option("--quad-order", opt.cfg.quad_order, "Gauss-Legendre points per axis");
  auto* subdiv_opt =
      app.add_flag("--no-subdivide", no_subdivide, "disable adaptive subdivision");
  app.add_option("--seed", opt.seed, "seed for randomized checks");
  app.add_option("--dim-cap", opt.dim_cap, "largest simplex dimension to report");
  app.add_option("--format", opt.format, "report format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_path, "write the report to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::optional<holo::Scene> scene;
    if (!scene_path.empty()) {
      // check-rep reports the numeric residuals itself, so it loads without
      // the numeric gate; the structural schema checks still apply.
      const double load_tol =
          command == "check-rep" ? std::numeric_limits<double>::infinity() : 1e-6;
      scene = holo::load_scene(scene_path, load_tol);
      // Scene-level transport overrides first, explicit flags on top.
      holo::TransportConfig cfg = scene->transport;
      if (max_n_opt->count()) cfg.max_n = opt.cfg.max_n;
      if (tol_opt->count()) cfg.tol = opt.cfg.tol;
      if (quad_opt->count()) cfg.quad_order = opt.cfg.quad_order;
      opt.cfg = cfg;
    }
    if (subdiv_opt->count()) opt.cfg.subdivide = !no_subdivide;

    holo::Report report;
    const int code =
        holo::run_command(command, scene ? &*scene : nullptr, opt, report);
    const std::string rendered = report.render(opt.format);
    if (out_path.empty()) {
      std::cout << rendered;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw holo::SchemaError("cannot write report to '" + out_path + "'");
      out << rendered;
    }
    return code;
  } catch (const holo::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const holo::AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << '\n';
    return 3;
  } catch (const holo::InvariantError& e) {
    std::cerr << "invariant error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
