// thermofrac command-line driver: run a JSON config, run a built-in example,
// or print mesh statistics.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "thermofrac/benchmarks.hpp"
#include "thermofrac/config.hpp"
#include "thermofrac/error.hpp"
#include "thermofrac/output.hpp"
#include "thermofrac/postprocess.hpp"
#include "thermofrac/solver.hpp"

namespace fs = std::filesystem;
using namespace thermofrac;

namespace {

struct RunOptions {
  std::string out;
  std::vector<std::string> overrides;
  bool quiet = false;
};

std::string step_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%05d.vtk", step);
  return buf;
}

int execute(RunConfig config, const RunOptions& opt, const std::string& example) {
  if (!opt.overrides.empty()) config = apply_overrides(config, opt.overrides);
  if (!opt.out.empty()) config.output.dir = opt.out;
  const fs::path dir(config.output.dir);
  const std::string started = utc_timestamp();
  const auto clock0 = std::chrono::steady_clock::now();

  Problem problem = build_problem(config);
  const Mesh& mesh = *problem.mesh;
  Simulation sim(std::move(problem));

  fs::create_directories(dir);
  const std::string csv_name = config.output.csv ? "records.csv" : "";
  write_manifest((dir / "manifest.json").string(), config, mesh, {started, csv_name, example});
  if (!opt.quiet)
    std::cerr << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " elements; "
              << config.load.num_steps() << " steps\n";

  const int every = config.output.vtk_every;
  if (every > 0) {
    const auto& st = sim.state();
    write_vtk((dir / step_name(0)).string(), mesh, st.u, st.s, st.T);
  }

  std::vector<RunRecord> records{RunRecord{}};
  records.front().T_app = config.load.applied_temperature(0);
  auto flush_csv = [&] {
    if (config.output.csv) write_csv((dir / csv_name).string(), records);
  };
  const int steps = config.load.num_steps();
  try {
    for (int i = 0; i < steps; ++i) {
      const RunRecord rec = sim.step();
      records.push_back(rec);
      const auto& st = sim.state();
      if (!rec.converged)
        std::cerr << "warning: step " << st.step << ": staggered loop stopped after " << rec.inner_iters
                  << " iterations, RelErr " << rec.rel_err << "\n";
      if (!opt.quiet)
        std::cerr << "step " << st.step << "/" << steps << "  t=" << rec.t << "  Fy=" << rec.force.y()
                  << "  iters=" << rec.inner_iters << "  min s=" << st.s.minCoeff() << "\n";
      if (every > 0 && st.step % every == 0) write_vtk((dir / step_name(st.step)).string(), mesh, st.u, st.s, st.T);
    }
  } catch (const SolveError& e) {
    flush_csv();
    std::cerr << "error: step " << sim.state().step << ": " << e.what() << "\n";
    return 2;
  }
  flush_csv();
  if (every > 0 && sim.state().step % every != 0) {
    const auto& st = sim.state();
    write_vtk((dir / step_name(st.step)).string(), mesh, st.u, st.s, st.T);
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  const auto& peak = records[peak_record(records)];
  std::cout << "completed " << steps << " steps in " << secs << " s\n"
            << "peak Fy " << peak.force.y() << " at u_app " << peak.u_app << "\n"
            << "output: " << dir.string() << "\n";
  return 0;
}

int mesh_info(const std::string& path) {
  const Mesh mesh = load_gmsh_file(path);
  const Box bb = mesh.bounding_box();
  std::cout << "nodes: " << mesh.num_nodes() << "\n"
            << "elements: " << mesh.num_elements() << "\n"
            << "boundary edges: " << mesh.num_boundary_edges() << "\n"
            << "area: " << mesh.total_area() << "\n"
            << "bounding box: [" << bb.x0 << ", " << bb.y0 << "] - [" << bb.x1 << ", " << bb.y1 << "]\n";
  for (const auto& [name, tag] : mesh.boundary_tags())
    std::cout << "boundary tag " << tag << " \"" << name << "\": " << boundary_nodes(mesh, name).size() << " nodes\n";
  for (const auto& [name, tag] : mesh.region_tags()) {
    Index n = 0;
    for (const auto& t : mesh.elements()) n += t.region == tag;
    std::cout << "region " << tag << " \"" << name << "\": " << n << " elements\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field thermo-mechanical fracture solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunOptions opt;
  std::string config_path, example_name, mesh_path;
  double scale = 1.0;

  auto* run = app.add_subcommand("run", "Run a JSON configuration");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--out", opt.out, "Output directory (overrides output.dir)");
  run->add_option("--set", opt.overrides, "Override a config key, e.g. --set load.delt=0.02")->allow_extra_args(false);
  run->add_flag("-q,--quiet", opt.quiet, "Only print the summary");

  auto* example = app.add_subcommand("example", "Run a built-in benchmark");
  std::string names;
  for (const auto& n : example_names()) names += (names.empty() ? "" : ", ") + n;
  example->add_option("name", example_name, "One of: " + names)->required();
  example->add_option("--scale", scale, "Resolution factor in (0, 1]; smaller is coarser");
  example->add_option("--out", opt.out, "Output directory");
  example->add_option("--set", opt.overrides, "Override a config key")->allow_extra_args(false);
  example->add_flag("-q,--quiet", opt.quiet, "Only print the summary");
  bool print_config = false;
  example->add_flag("--print-config", print_config, "Print the example configuration as JSON and exit");

  auto* info = app.add_subcommand("mesh-info", "Print statistics of a Gmsh 2.2 mesh");
  info->add_option("path", mesh_path, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return execute(load_config_file(config_path), opt, "");
    if (*example) {
      RunConfig c = example_config(example_name, scale);
      if (print_config) {
        if (!opt.overrides.empty()) c = apply_overrides(c, opt.overrides);
        std::cout << serialize(c) << "\n";
        return 0;
      }
      return execute(c, opt, example_name);
    }
    if (*info) return mesh_info(mesh_path);
  } catch (const SolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
