#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "olmfsi/olmfsi.hpp"

using namespace olmfsi;

namespace {

Config load_config(const std::string& path) { return path.empty() ? Config{} : Config::load(path); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void print_report(const ConvergenceReport& rep, bool with_solid) {
  std::printf("%5s %10s %12s %7s %12s %7s", "level", "h", "err_u_h1", "eoc_u", "err_p_l2", "eoc_p");
  if (with_solid) std::printf(" %12s %7s %5s", "err_s_h1", "eoc_s", "iters");
  std::printf("\n");
  auto e = [](const std::optional<double>& v) { return v ? *v : std::nan(""); };
  for (const ConvergenceRow& r : rep.rows) {
    std::printf("%5d %10.4g %12.5g %7.3f %12.5g %7.3f", r.level, r.h, r.err_u_h1, e(r.eoc_u), r.err_p_l2, e(r.eoc_p));
    if (with_solid) std::printf(" %12.5g %7.3f %5d", e(r.err_s_h1), e(r.eoc_s), r.iterations);
    std::printf("\n");
  }
}

int run_convergence_cmd(int levels, const std::string& config, const std::string& out) {
  ManufacturedParams prm;
  load_config(config).apply(prm);
  ensure_dir(out);
  const ConvergenceReport rep =
      run_convergence(levels, prm, out + "/iterations_level", [&](int l, const ManufacturedRun& run) {
        if (l == levels - 1) write_outputs(run.state, nullptr, out);
      });
  write_convergence_csv(out + "/convergence.csv", rep);
  print_report(rep, true);
  return 0;
}

int run_flap_cmd(double angle, const std::string& config, const std::string& out) {
  FlapParams prm;
  load_config(config).apply(prm);
  ensure_dir(out);
  const FlapRun r = flap2d(angle, prm, out + "/diagnostics.csv");
  write_outputs(r.state, nullptr, out);
  std::printf("angle %.1f deg: converged in %d outer iterations\n", angle, r.state.iterations());
  std::printf("max solid displacement %.6g, max velocity jump on the fluid interface %.6g\n", r.max_displacement,
              r.max_jump);
  return 0;
}

int run_stokes_cmd(int levels, const std::string& config, const std::string& out) {
  StokesParams prm;
  load_config(config).apply(prm);
  ensure_dir(out);
  const ConvergenceReport rep = run_stokes_convergence(levels, prm, [&](int l, const StokesRun& run) {
    if (l == levels - 1) write_fluid_vtk(out, run.geometry, run.solution);
  });
  write_convergence_csv(out + "/convergence.csv", rep);
  print_report(rep, false);
  return 0;
}

int run_cutdump_cmd(const std::string& background, const std::string& front, int level, const std::string& out) {
  const StokesParams prm;
  const Mesh bg = background.empty()
                      ? refine_times(build_rect_mesh(prm.background_n, prm.background_n, Rect{{0.0, 0.0}, {1.0, 1.0}}), level)
                      : read_mesh_file(background);
  const Mesh fr = front.empty() ? stokes_front(prm, level) : read_mesh_file(front);
  const FluidGeometry geo = build_fluid_geometry(bg, fr);
  write_cutdump(out, geo);
  std::printf("cells: %zu not overlapped, %zu partial, %zu fully overlapped\n", geo.topo.class_not.size(),
              geo.topo.class_partial.size(), geo.topo.class_fully.size());
  std::printf("interface segments %zu (length %.12g), overlap polygons %zu\n", geo.topo.interface_segments.size(),
              geo.topo.interface_length(), geo.topo.overlap_pairs.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary FSI on overlapping meshes"};
  app.require_subcommand(1);

  int conv_levels = 3;
  std::string conv_config, conv_out = "out/convergence";
  auto* conv = app.add_subcommand("convergence", "manufactured FSI convergence study");
  conv->add_option("--levels", conv_levels, "number of mesh levels (>= 2)")->check(CLI::Range(2, 8));
  conv->add_option("--config", conv_config, "key = value configuration file")->check(CLI::ExistingFile);
  conv->add_option("--out", conv_out, "output directory");

  double flap_angle = 0.0;
  std::string flap_config, flap_out = "out/flap";
  auto* flap = app.add_subcommand("flap", "elastic flap in a channel");
  flap->add_option("--angle", flap_angle, "flap orientation in degrees")->check(CLI::Range(-80.0, 80.0));
  flap->add_option("--config", flap_config, "key = value configuration file")->check(CLI::ExistingFile);
  flap->add_option("--out", flap_out, "output directory");

  int stokes_levels = 4;
  std::string stokes_config, stokes_out = "out/stokes";
  auto* stokes = app.add_subcommand("stokes", "fluid-only overlapping-mesh convergence study");
  stokes->add_option("--levels", stokes_levels, "number of mesh levels")->check(CLI::Range(1, 8));
  stokes->add_option("--config", stokes_config, "key = value configuration file")->check(CLI::ExistingFile);
  stokes->add_option("--out", stokes_out, "output directory");

  std::string cut_bg, cut_front, cut_out = "out/cutdump";
  int cut_level = 0;
  auto* cut = app.add_subcommand("cutdump", "write the overlap geometry for inspection");
  cut->add_option("--background", cut_bg, "background mesh file")->check(CLI::ExistingFile);
  cut->add_option("--front", cut_front, "front mesh file")->check(CLI::ExistingFile);
  cut->add_option("--level", cut_level, "refinement level of the built-in geometry")->check(CLI::Range(0, 6));
  cut->add_option("--out", cut_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*conv) return run_convergence_cmd(conv_levels, conv_config, conv_out);
    if (*flap) return run_flap_cmd(flap_angle, flap_config, flap_out);
    if (*stokes) return run_stokes_cmd(stokes_levels, stokes_config, stokes_out);
    if (*cut) return run_cutdump_cmd(cut_bg, cut_front, cut_level, cut_out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
