#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bswave/config.hpp"
#include "bswave/io.hpp"
#include "bswave/scenarios.hpp"

using namespace bswave;
using Catch::Approx;
namespace fs = std::filesystem;

TEST_CASE("config parsing", "[config]") {
  Config cfg = Config::parse_string(
      "# comment\n"
      "[model]\n"
      "theta_sq = 1.0  # inline comment\n"
      "g = 9.81\n"
      "[gauges]\n"
      "point = 0 0\n"
      "point = 16.25 0\n");
  CHECK(cfg.require_double("model", "theta_sq") == 1.0);
  CHECK(cfg.get_double("model", "g", 0.0) == 9.81);
  CHECK(cfg.get_double("model", "missing", 7.0) == 7.0);
  CHECK(cfg.get_list("gauges", "point").size() == 2);
  CHECK_THROWS_AS(cfg.require_string("model", "missing"), ParseError);
  CHECK_THROWS_AS(cfg.require_double("gauges", "point"), ParseError);
}

TEST_CASE("config rejects malformed input", "[config]") {
  CHECK_THROWS_AS(Config::parse_string("[unclosed\nkey = 1\n"), ParseError);
  CHECK_THROWS_AS(Config::parse_string("[s]\nno equals sign\n"), ParseError);
  CHECK_THROWS_AS(Config::parse_string("[s]\n= value\n"), ParseError);
}

TEST_CASE("schema validation lists every problem", "[config]") {
  Config cfg = Config::parse_string("[model]\ntheta = 1\n[extra]\nx = 2\n");
  try {
    cfg.check_known_keys({{"model", {"theta_sq", "g"}}});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("theta") != std::string::npos);
    CHECK(msg.find("extra") != std::string::npos);
  }
}

TEST_CASE("config merge prefers the overlay", "[config]") {
  Config base = Config::parse_string("[a]\nx = 1\ny = 2\n");
  Config over = Config::parse_string("[a]\nx = 9\n[b]\nz = 3\n");
  Config merged = base.merged_with(over);
  CHECK(merged.get_double("a", "x", 0) == 9.0);
  CHECK(merged.get_double("a", "y", 0) == 2.0);
  CHECK(merged.get_double("b", "z", 0) == 3.0);
}

TEST_CASE("conservation csv format", "[io]") {
  std::vector<ConservationRow> rows = {
      {0.0, 31.139957766459998, 24.890739171, 1e-16, 1.0},
      {0.1, 31.139957766459998, 24.890739171, -2e-16, 1.0000001},
  };
  fs::path path = "conservation_test.csv";
  write_conservation_csv(path, rows);
  std::ifstream in(path);
  std::string header, line1;
  std::getline(in, header);
  CHECK(header == "t, mass, energy, vorticity, gamma");
  std::getline(in, line1);
  // 17 significant digits: the doubles survive the text round trip exactly
  std::replace(line1.begin(), line1.end(), ',', ' ');
  std::istringstream ss(line1);
  double t, mass, energy, vort, gamma;
  REQUIRE((ss >> t >> mass >> energy >> vort >> gamma));
  CHECK(mass == rows[0].mass);
  CHECK(energy == rows[0].energy);
  CHECK(vort == rows[0].vorticity);
  fs::remove(path);
}

TEST_CASE("vtk snapshot structure", "[io]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 2, 2);
  FeSpace space(mesh, 1);
  State s;
  s.eta.assign(space.n_dofs(), 0.25);
  s.phi.resize(space.n_dofs());
  for (int i = 0; i < space.n_dofs(); ++i)
    s.phi[i] = space.dof_coords()[i].x;

  fs::path path = "snapshot_test.vtk";
  write_vtk_snapshot(path, space, s);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("# vtk DataFile Version 3.0") == 0);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("POINTS 9 double") != std::string::npos);
  CHECK(text.find("SCALARS eta double 1") != std::string::npos);
  CHECK(text.find("SCALARS phi double 1") != std::string::npos);
  CHECK(text.find("VECTORS velocity double") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("manifest round trip", "[io]") {
  std::map<std::string, std::map<std::string, std::string>> sections = {
      {"model", {{"theta_sq", "1"}, {"g", "9.81"}}},
      {"provenance", {{"code_version", kVersion}}},
  };
  fs::path path = "manifest_test.ini";
  write_manifest(path, sections);
  Config back = Config::parse_file(path.string());
  CHECK(back.require_double("model", "g") == 9.81);
  CHECK(back.require_string("provenance", "code_version") == kVersion);
  fs::remove(path);
}

TEST_CASE("mixed-fields debug dump", "[io]") {
  Mesh mesh = generate_rectangle({0, 1}, {0, 1}, 2, 2);
  FeSpace space(mesh, 1);
  DiscreteOperators ops(space, constant_field(1.0), params_from_theta(1.0, 1.0));
  State s;
  s.eta.assign(space.n_dofs(), 0.1);
  s.phi.resize(space.n_dofs());
  for (int i = 0; i < space.n_dofs(); ++i)
    s.phi[i] = space.dof_coords()[i].x * space.dof_coords()[i].y;
  MixedFields mf = reconstruct_mixed_fields(ops, s);
  fs::path path = "mixed_fields_test.csv";
  write_mixed_fields_csv(path, space, s, mf);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "dof, x, y, eta, phi, v, w, z, f");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == space.n_dofs());
  fs::remove(path);
}

TEST_CASE("mesh hash is deterministic and geometry-sensitive", "[io]") {
  Mesh a = generate_rectangle({0, 1}, {0, 1}, 3, 3);
  Mesh b = generate_rectangle({0, 1}, {0, 1}, 3, 3);
  Mesh c = generate_rectangle({0, 1}, {0, 1}, 4, 3);
  CHECK(mesh_hash(a) == mesh_hash(b));
  CHECK(mesh_hash(a) != mesh_hash(c));
}

TEST_CASE("eoc report formatting", "[io]") {
  EocReport rep;
  rep.rows = {{0.125, {4.844e-2, 6.272e-1}, {5.364e-2, 2.515}},
              {0.125 / 2, {4.844e-2 / 4.1, 6.272e-1 / 2.02},
               {5.364e-2 / 4.05, 2.515 / 1.99}}};
  std::ostringstream os;
  rep.write_table(os);
  std::string text = os.str();
  CHECK(text.find("E0[phi]") != std::string::npos);
  CHECK(text.find("2.0") != std::string::npos);  // observed L2 rate near 2

  fs::path path = "eoc_test.csv";
  rep.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "h, E0_phi, rate, E0_eta, rate, E1_phi, rate, E1_eta, rate");
  fs::remove(path);
}

TEST_CASE("gauge comparison", "[scenarios]") {
  fs::path dir = "compare_test_run";
  fs::create_directories(dir);
  {
    std::ofstream g1(dir / "gauge_1.csv");
    g1 << "t, eta\n";
    for (int i = 0; i <= 100; ++i)
      g1 << 0.1 * i << ", " << std::sin(0.1 * i) << "\n";
  }

  SECTION("a run compared to itself has zero discrepancy") {
    auto report = compare_gauges(dir, dir / "gauge_1.csv");
    REQUIRE(report.size() == 1);
    CHECK(report[0].l2 == Approx(0.0).margin(1e-14));
    CHECK(report[0].linf == Approx(0.0).margin(1e-14));
  }

  SECTION("disjoint time ranges raise an error") {
    fs::path ref = dir / "late_ref.csv";
    {
      std::ofstream r(ref);
      r << "t, eta\n";
      for (int i = 0; i < 5; ++i) r << 100.0 + i << ", 0\n";
    }
    CHECK_THROWS_AS(compare_gauges(dir, ref), ValidationError);
  }

  fs::remove_all(dir);
}

TEST_CASE("gauge discrepancy shrinks under refinement", "[scenarios]") {
  // the same traveling-wave run at three resolutions; comparing adjacent
  // pairs shows self-convergence of the gauge series
  auto run_at = [](int nx, const std::string& dir) {
    Config cfg = Config::parse_string(
        "[scenario]\nkind = custom\n"
        "[mesh]\nkind = rectangle\nx0 = -15\nx1 = 15\ny0 = 0\ny1 = 1\n"
        "nx = " + std::to_string(nx) + "\nny = 2\n"
        "[model]\ntheta_sq = 0.8181818181818182\ng = 1\n"
        "[bathymetry]\nkind = flat\ndepth = 1\n"
        "[init]\nkind = analytic_solitary\ncrest_x = -5\n"
        "[time]\ndt = 0.05\nt_end = 2\n"
        "[gauges]\npoint = 0 0.5\n"
        "[output]\ndir = " + dir + "\n");
    return run_scenario(cfg).output_dir;
  };
  fs::path coarse = run_at(60, "gauge_conv_a");
  fs::path mid = run_at(120, "gauge_conv_b");
  fs::path fine = run_at(240, "gauge_conv_c");

  double d1 = compare_gauges(coarse, mid / "gauge_1.csv")[0].l2;
  double d2 = compare_gauges(mid, fine / "gauge_1.csv")[0].l2;
  CHECK(d2 < d1);
  CHECK(d1 / d2 > 2.0);  // roughly O(h^2) for P1
  for (const auto& p : {coarse, mid, fine}) fs::remove_all(p);
}

TEST_CASE("rest-state scenario runs end to end", "[scenarios]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = custom\n"
      "[mesh]\nkind = rectangle\nx0 = 0\nx1 = 1\ny0 = 0\ny1 = 1\n"
      "nx = 4\nny = 4\n"
      "[time]\ndt = 0.1\nt_end = 0.3\n"
      "[output]\ndir = scenario_test_out\n");
  RunResult res = run_scenario(cfg);
  CHECK(fs::exists(res.output_dir / "conservation.csv"));
  CHECK(fs::exists(res.output_dir / "manifest.ini"));
  CHECK(fs::exists(res.output_dir / "final.vtk"));
  // the manifest re-parses and re-validates as a config
  Config manifest = Config::parse_file((res.output_dir / "manifest.ini").string());
  CHECK(manifest.require_string("scenario", "kind") == "custom");
  fs::remove_all(res.output_dir);
}

TEST_CASE("snapshot cadence", "[scenarios]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = custom\n"
      "[mesh]\nkind = rectangle\nx0 = 0\nx1 = 1\ny0 = 0\ny1 = 1\n"
      "nx = 3\nny = 3\n"
      "[time]\ndt = 0.1\nt_end = 0.6\n"
      "[output]\ndir = snapshot_test_out\nsnapshot_every = 2\n");
  RunResult res = run_scenario(cfg);
  int count = 0;
  for (auto& e : fs::directory_iterator(res.output_dir / "snapshots"))
    if (e.path().extension() == ".vtk") ++count;
  // t=0 plus steps 2, 4, 6
  CHECK(count == 4);
  fs::remove_all(res.output_dir);
}

TEST_CASE("re-running a manifest reproduces the run byte-identically",
          "[scenarios]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = custom\n"
      "[mesh]\nkind = rectangle\nx0 = 0\nx1 = 2\ny0 = 0\ny1 = 1\n"
      "nx = 6\nny = 3\n"
      "[init]\nkind = analytic_solitary\ncrest_x = 1\n"
      "[model]\ntheta_sq = 0.8181818181818182\ng = 1\n"
      "[bathymetry]\nkind = flat\ndepth = 1\n"
      "[time]\ndt = 0.05\nt_end = 0.2\n"
      "[output]\ndir = manifest_rerun_a\n");
  RunResult a = run_scenario(cfg);
  Config manifest = Config::parse_file((a.output_dir / "manifest.ini").string());
  manifest.set("output", "dir", "manifest_rerun_b");
  RunResult b = run_scenario(manifest);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  CHECK(slurp(a.output_dir / "conservation.csv") ==
        slurp(b.output_dir / "conservation.csv"));
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST_CASE("y-junction scenario also runs as the limiting c = 0 system",
          "[scenarios][slow]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = y_junction\n"
      "[model]\ntheta_sq = 0.6666666666666667\n"
      "[mesh]\npath = " +
      std::string(BSWAVE_TEST_DATA_DIR) +
      "/meshes/yjunction_desk.msh\n"
      "[time]\ndt = 0.02\nt_end = 0.2\n"
      "[output]\ndir = yjunction_bbm_test_out\n");
  RunResult res = run_scenario(cfg);
  const auto& rows = res.integration.conservation;
  REQUIRE(rows.size() > 1);
  double e0 = rows.front().energy;
  for (const auto& r : rows) {
    CHECK(std::abs(r.energy - e0) <= 1e-10 * std::abs(e0));
    CHECK(std::abs(r.vorticity) < 1e-12);
  }
  fs::remove_all(res.output_dir);
}

TEST_CASE("scenario validation failures are exhaustive", "[scenarios]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = custom\n"
      "[mesh]\nkind = rectangle\nx0 = 0\nx1 = 1\ny0 = 0\ny1 = 1\n"
      "[model]\ntheta_sq = 0.2\n"
      "[time]\ndt = -1\nt_end = 0.3\n");
  try {
    run_scenario(cfg);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("dt") != std::string::npos);
    CHECK(msg.find("theta_sq") != std::string::npos);
  }
}

TEST_CASE("unknown scenario keys are rejected", "[scenarios]") {
  Config cfg = Config::parse_string(
      "[scenario]\nkind = custom\n[tiem]\ndt = 0.1\n");
  CHECK_THROWS_AS(run_scenario(cfg), ParseError);
}
