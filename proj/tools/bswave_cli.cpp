#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bswave/bswave.hpp"

namespace fs = std::filesystem;
using namespace bswave;

namespace {

int cmd_run(const std::string& config_path) {
  Config cfg = Config::parse_file(config_path);
  fs::path base = fs::path(config_path).parent_path();
  RunResult res = run_scenario(cfg, base);
  const auto& rows = res.integration.conservation;
  std::cout << "run complete: " << res.integration.steps << " steps, t = "
            << res.integration.state.t << "\n";
  if (!res.init_note.empty()) std::cout << "initial data: " << res.init_note << "\n";
  if (!rows.empty()) {
    const auto& a = rows.front();
    const auto& b = rows.back();
    std::cout.precision(14);
    std::cout << "mass      " << a.mass << " -> " << b.mass << "\n";
    std::cout << "energy    " << a.energy << " -> " << b.energy << "\n";
    std::cout << "vorticity " << b.vorticity << "\n";
  }
  std::cout << "outputs in " << res.output_dir.string() << "\n";
  return 0;
}

int cmd_eoc(const std::string& config_path) {
  Config cfg = Config::parse_file(config_path);
  cfg.check_known_keys({{"scenario", {"kind"}},
                        {"eoc",
                         {"degree", "t_end", "dt", "dt_rule", "n", "theta_sq",
                          "g", "family"}},
                        {"output", {"dir"}}});
  MmsSweepOptions opt;
  opt.degree = cfg.get_int("eoc", "degree", 1);
  opt.t_end = cfg.get_double("eoc", "t_end", 1.0);
  opt.dt = cfg.get_double("eoc", "dt", 5e-4);
  opt.dt_equal_h = cfg.get_string("eoc", "dt_rule", "fixed") == "equal_h";
  opt.theta_sq = cfg.get_double("eoc", "theta_sq", 1.0);
  opt.g = cfg.get_double("eoc", "g", 1.0);
  std::string family = cfg.get_string("eoc", "family", "crossed");
  opt.family = family == "crossed"      ? DiagonalRule::crossed
               : family == "right"      ? DiagonalRule::right
               : family == "left"       ? DiagonalRule::left
               : family == "union_jack" ? DiagonalRule::union_jack
                                        : throw ParseError("bad [eoc] family '" +
                                                           family + "'");
  if (cfg.has("eoc", "n")) {
    opt.ns.clear();
    std::istringstream ss(cfg.require_string("eoc", "n"));
    int n;
    while (ss >> n) opt.ns.push_back(n);
  }
  opt.progress = &std::cout;

  std::cout << "convergence sweep, degree " << opt.degree << "\n";
  EocReport report = run_mms_convergence(opt);

  fs::path outdir = cfg.get_string("output", "dir", "out/eoc");
  if (const char* env = std::getenv("BSWAVE_OUTPUT_DIR")) outdir = env;
  fs::create_directories(outdir);
  report.write_csv(outdir / "eoc.csv");
  std::ofstream table(outdir / "eoc_table.txt");
  report.write_table(table);
  report.write_table(std::cout);
  return 0;
}

int cmd_solitary(const std::string& config_path) {
  Config cfg = Config::parse_file(config_path);
  cfg.check_known_keys(
      {{"scenario", {"kind"}},
       {"model", {"theta_sq", "g"}},
       {"solitary",
        {"speed", "amplitude", "depth", "degree", "channel_half_length",
         "channel_nx", "channel_ny", "channel_width", "tolerance",
         "max_iterations", "exponent"}},
       {"output", {"dir"}}});
  PetviashviliConfig pcfg;
  pcfg.params = params_from_theta(cfg.get_double("model", "theta_sq", 1.0),
                                  cfg.get_double("model", "g", 9.81));
  pcfg.depth = cfg.get_double("solitary", "depth", 1.0);
  pcfg.tolerance = cfg.get_double("solitary", "tolerance", 1e-6);
  pcfg.max_iterations = cfg.get_int("solitary", "max_iterations", 50);
  pcfg.exponent = cfg.get_double("solitary", "exponent", 2.0);

  double amplitude = cfg.get_double("solitary", "amplitude", 0.0);
  double speed = cfg.get_double("solitary", "speed", 0.0);
  if (amplitude <= 0.0 && speed <= 0.0)
    throw ParseError("[solitary] needs speed or amplitude");
  double g = pcfg.params.g, d0 = pcfg.depth;
  double a_est = amplitude > 0.0 ? amplitude : speed * speed / g - d0;
  if (!(a_est > 0.0)) throw ParseError("[solitary] speed must be supercritical");
  double lam = std::sqrt(3.0 * a_est / (4.0 * d0 * d0 * (d0 + a_est)));
  double half = cfg.get_double("solitary", "channel_half_length",
                               std::ceil(14.0 / lam));
  double width = cfg.get_double("solitary", "channel_width", d0);
  int nx = cfg.get_int("solitary", "channel_nx",
                       static_cast<int>(std::ceil(16.0 * half * lam)));
  int ny = cfg.get_int("solitary", "channel_ny", 4);

  Mesh channel =
      generate_rectangle({-half, half}, {0.0, width}, nx, ny, DiagonalRule::right);
  FeSpace space(channel, cfg.get_int("solitary", "degree", 2));

  TravelingWaveSolution wave;
  if (amplitude > 0.0) {
    wave = find_wave_by_amplitude(pcfg, space, amplitude);
  } else {
    pcfg.speed = speed;
    wave = petviashvili_solve(pcfg, space);
  }
  std::cout << "converged in " << wave.iterations
            << " iterations, amplitude " << wave.amplitude() << ", speed "
            << wave.speed << "\n";
  std::cout << "residual history:";
  for (double r : wave.residual_history) std::cout << " " << r;
  std::cout << "\n";

  fs::path outdir = cfg.get_string("output", "dir", "out/solitary");
  if (const char* env = std::getenv("BSWAVE_OUTPUT_DIR")) outdir = env;
  fs::create_directories(outdir);
  LineProfile prof = wave.centerline_profile();
  write_profile_csv(outdir / "profile.csv", prof.xi, prof.eta, prof.w);
  std::cout << "profile written to " << (outdir / "profile.csv").string()
            << "\n";
  return 0;
}

int cmd_dispersion(double theta_sq, double depth, double kmax,
                   const std::string& output) {
  ModelParams params = params_from_theta(theta_sq, 9.81);
  if (output.empty()) {
    write_dispersion_table(std::cout, params, depth, kmax);
  } else {
    std::ofstream out(output);
    if (!out) throw Error("cannot open " + output);
    write_dispersion_table(out, params, depth, kmax);
    std::cout << "dispersion table written to " << output << "\n";
  }
  return 0;
}

int cmd_mesh_info(const std::string& path) {
  Mesh mesh = read_mesh(path);
  int v = mesh.n_vertices(), e = mesh.n_edges(), t = mesh.n_triangles();
  std::cout << "vertices  " << v << "\n";
  std::cout << "triangles " << t << "\n";
  std::cout << "edges     " << e << " (" << mesh.boundary_edges.size()
            << " on boundary)\n";
  std::cout << "h_max     " << mesh.h_max << "\n";
  std::cout << "h_min     " << mesh.h_min << "\n";
  std::cout << "area      " << mesh.total_area() << "\n";
  std::cout << "V - E + T " << v - e + t
            << "  (1 for a simply connected domain, 0 with one hole)\n";
  return 0;
}

int cmd_compare(const std::string& run_dir, const std::string& ref_csv) {
  auto report = compare_gauges(run_dir, ref_csv,
                               fs::path(run_dir) / "comparison.csv");
  for (const auto& c : report)
    std::cout << "gauge " << c.gauge << ": L2 = " << c.l2
              << ", Linf = " << c.linf << " over " << c.samples
              << " samples\n";
  std::cout << "merged series written to "
            << (fs::path(run_dir) / "comparison.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-element solver for long water waves in walled basins"};
  app.require_subcommand(1);

  std::string config_path, run_dir, ref_csv, mesh_path, output;
  double theta_sq = 1.0, depth = 1.0, kmax = 10.0;

  auto* run = app.add_subcommand("run", "run a scenario from a config file");
  run->add_option("config", config_path, "scenario config")->required();

  auto* eoc = app.add_subcommand("eoc", "manufactured-solution convergence sweep");
  eoc->add_option("config", config_path, "sweep config")->required();

  auto* sol = app.add_subcommand("solitary",
                                 "compute a traveling wave and emit its profile");
  sol->add_option("config", config_path, "solitary config")->required();

  auto* disp = app.add_subcommand("dispersion", "emit a dispersion-curve table");
  disp->add_option("theta_sq", theta_sq, "theta^2 in [2/3,1]")->required();
  disp->add_option("depth", depth, "still-water depth D0")->required();
  disp->add_option("kmax", kmax, "largest wavenumber")->required();
  disp->add_option("-o,--output", output, "output CSV (default stdout)");

  auto* mi = app.add_subcommand("mesh-info", "validate and describe a mesh file");
  mi->add_option("mesh", mesh_path, ".tri or .msh file")->required();

  auto* cmp = app.add_subcommand("compare",
                                 "compare run gauges against a reference CSV");
  cmp->add_option("run_dir", run_dir, "scenario output directory")->required();
  cmp->add_option("ref_csv", ref_csv, "reference time series")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (eoc->parsed()) return cmd_eoc(config_path);
    if (sol->parsed()) return cmd_solitary(config_path);
    if (disp->parsed()) return cmd_dispersion(theta_sq, depth, kmax, output);
    if (mi->parsed()) return cmd_mesh_info(mesh_path);
    if (cmp->parsed()) return cmd_compare(run_dir, ref_csv);
  } catch (const IntegrationError& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
