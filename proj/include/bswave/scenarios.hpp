#pragma once

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bswave/config.hpp"
#include "bswave/io.hpp"
#include "bswave/mms.hpp"
#include "bswave/model.hpp"
#include "bswave/semidiscrete.hpp"
#include "bswave/timestepping.hpp"
#include "bswave/wave_setup.hpp"

namespace bswave {

inline constexpr const char* kVersion = "0.1.0";

enum class ScenarioKind {
  mms_convergence,
  solitary_flat,
  shoaling_reflection,
  cylinder,
  submerged_bar,
  y_junction,
  dispersion_table,
  custom,
};

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "mms_convergence") return ScenarioKind::mms_convergence;
  if (s == "solitary_flat") return ScenarioKind::solitary_flat;
  if (s == "shoaling_reflection") return ScenarioKind::shoaling_reflection;
  if (s == "cylinder") return ScenarioKind::cylinder;
  if (s == "submerged_bar") return ScenarioKind::submerged_bar;
  if (s == "y_junction") return ScenarioKind::y_junction;
  if (s == "dispersion_table") return ScenarioKind::dispersion_table;
  if (s == "custom") return ScenarioKind::custom;
  throw ParseError(
      "unknown scenario kind '" + s +
      "' (expected one of: mms_convergence, solitary_flat, "
      "shoaling_reflection, cylinder, submerged_bar, y_junction, "
      "dispersion_table, custom)");
}

/// Named bathymetries of the shipped experiments.
inline ScalarField make_bathymetry(const std::string& kind, double flat_depth) {
  if (kind == "flat") return constant_field(flat_depth);
  if (kind == "shoaling") {
    // 0.7 m flat part, then a 1:50 upslope toward the reflecting wall.
    // Corners deliberately unsmoothed.
    return ScalarField{[](Vec2 p) {
      return p.x <= 0.0 ? 0.7 : 0.7 - p.x / 50.0;
    }, {}, 0.3, 0.7};
  }
  if (kind == "bar") {
    // Trapezoidal submerged bar between x = 6 and x = 17.
    return ScalarField{[](Vec2 p) {
      const double x = p.x;
      if (x >= 6.0 && x < 12.0) return -0.05 * x + 0.7;
      if (x >= 12.0 && x < 14.0) return 0.1;
      if (x >= 14.0 && x <= 17.0) return 0.1 * x - 1.3;
      return 0.4;
    }, {}, 0.1, 0.4};
  }
  if (kind == "sloping_square") {
    // the manufactured-solution depth
    MmsProblem mms;
    return mms.depth();
  }
  throw ParseError("unknown bathymetry kind '" + kind +
                   "' (expected flat, shoaling, bar, sloping_square)");
}

/// Lagrange interpolant: coefficients are point values at the dof nodes.
inline FeFunction interpolate(const FeSpace& space, const ScalarField& f) {
  FeFunction out(space);
  for (int i = 0; i < space.n_dofs(); ++i)
    out.coeffs()[i] = f.value(space.dof_coords()[i]);
  return out;
}

struct EocRow {
  double h = 0.0;
  ErrorNorms phi;
  ErrorNorms eta;
};

struct EocReport {
  std::vector<EocRow> rows;

  static double rate(double e1, double e2, double h1, double h2) {
    return std::log(e1 / e2) / std::log(h1 / h2);
  }

  /// Rate observed between rows i-1 and i for one error column.
  double rate_at(size_t i, double (ErrorNorms::*norm), bool of_eta) const {
    if (i == 0 || i >= rows.size())
      return std::numeric_limits<double>::quiet_NaN();
    const ErrorNorms& p = of_eta ? rows[i - 1].eta : rows[i - 1].phi;
    const ErrorNorms& c = of_eta ? rows[i].eta : rows[i].phi;
    return rate(p.*norm, c.*norm, rows[i - 1].h, rows[i].h);
  }

  void write_csv(const std::filesystem::path& path) const {
    auto out = detail::open_out(path);
    out << "h, E0_phi, rate, E0_eta, rate, E1_phi, rate, E1_eta, rate\n";
    out << std::setprecision(17);
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << r.h << ", " << r.phi.l2 << ", "
          << rate_at(i, &ErrorNorms::l2, false) << ", " << r.eta.l2 << ", "
          << rate_at(i, &ErrorNorms::l2, true) << ", " << r.phi.h1_semi
          << ", " << rate_at(i, &ErrorNorms::h1_semi, false) << ", "
          << r.eta.h1_semi << ", " << rate_at(i, &ErrorNorms::h1_semi, true)
          << "\n";
    }
  }

  void write_table(std::ostream& out) const {
    auto sci = [](double v) {
      std::ostringstream os;
      os << std::scientific << std::setprecision(3) << v;
      return os.str();
    };
    auto fx = [](double v) {
      if (std::isnan(v)) return std::string("   --");
      std::ostringstream os;
      os << std::fixed << std::setprecision(3) << v;
      return os.str();
    };
    out << "     h        E0[phi]    r      E0[eta]    r      E1[phi]    r  "
           "    E1[eta]    r\n";
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << sci(r.h) << "  " << sci(r.phi.l2) << "  "
          << fx(rate_at(i, &ErrorNorms::l2, false)) << "  " << sci(r.eta.l2)
          << "  " << fx(rate_at(i, &ErrorNorms::l2, true)) << "  "
          << sci(r.phi.h1_semi) << "  "
          << fx(rate_at(i, &ErrorNorms::h1_semi, false)) << "  "
          << sci(r.eta.h1_semi) << "  "
          << fx(rate_at(i, &ErrorNorms::h1_semi, true)) << "\n";
    }
  }
};

/// Manufactured-solution convergence sweep. `ns` is the family of
/// subdivisions of the unit square; with the default crossed pattern the
/// reported h = 1/n is exactly the longest edge, the convention of the
/// reference tables.
struct MmsSweepOptions {
  int degree = 1;
  std::vector<int> ns = {8, 12, 16, 20, 24, 28, 32};
  double t_end = 1.0;
  double dt = 5e-4;
  bool dt_equal_h = false;
  double theta_sq = 1.0;
  double g = 1.0;
  DiagonalRule family = DiagonalRule::crossed;
  std::ostream* progress = nullptr;
};

inline EocReport run_mms_convergence(const MmsSweepOptions& opt) {
  EocReport report;
  MmsProblem mms;
  mms.params = params_from_theta(opt.theta_sq, opt.g);
  ButcherTableau tableau = classical_rk4();

  for (int n : opt.ns) {
    Mesh mesh = generate_rectangle({0.0, 1.0}, {0.0, 1.0}, n, n, opt.family);
    FeSpace space(mesh, opt.degree);
    DiscreteOperators ops(space, mms.depth(), mms.params);

    State s0 = initial_state(ops, mms.eta_field(0.0), mms.phi_field(0.0));
    Forcing forcing{[&mms](double t) { return mms.forcing_eta(t); },
                    [&mms](double t) { return mms.forcing_phi(t); }};

    IntegrateOptions iopt;
    iopt.relaxation = false;  // forced problem: energy is not an invariant
    iopt.forcing = &forcing;
    iopt.log_every = 0;
    double dt = opt.dt_equal_h ? 1.0 / n : opt.dt;
    IntegrationResult res = integrate(ops, s0, tableau, dt, opt.t_end, iopt);

    EocRow row;
    row.h = 1.0 / n;
    row.eta = error_norms(FeFunction(space, res.state.eta),
                          mms.eta_field(opt.t_end));
    row.phi = error_norms(FeFunction(space, res.state.phi),
                          mms.phi_field(opt.t_end));
    report.rows.push_back(row);
    if (opt.progress)
      *opt.progress << "  n = " << n << "  E0[eta] = " << std::scientific
                    << row.eta.l2 << std::defaultfloat << "\n";
  }
  return report;
}

struct GaugeComparison {
  int gauge = 0;
  double l2 = 0.0;
  double linf = 0.0;
  int samples = 0;
};

/// Compare run gauges against a reference CSV (`t, g1[, g2, ...]` or
/// `t, eta`), linearly interpolating the run onto the reference times over
/// the overlapping range.
inline std::vector<GaugeComparison> compare_gauges(
    const std::filesystem::path& run_dir, const std::filesystem::path& ref_csv,
    const std::filesystem::path& merged_out = {}) {
  std::ifstream in(ref_csv);
  if (!in) throw ParseError("cannot open reference CSV: " + ref_csv.string());
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty reference CSV");
  int ncols = 1;
  for (char ch : header)
    if (ch == ',') ++ncols;
  int ngauges = ncols - 1;
  if (ngauges < 1) throw ParseError("reference CSV needs a time column and at least one gauge column");

  std::vector<double> rt;
  std::vector<std::vector<double>> rv(ngauges);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t;
    if (!(ss >> t)) continue;
    rt.push_back(t);
    for (int k = 0; k < ngauges; ++k) {
      double v;
      if (!(ss >> v)) throw ParseError("reference CSV: short row");
      rv[k].push_back(v);
    }
  }
  if (rt.empty()) throw ParseError("reference CSV holds no samples");

  std::ofstream merged;
  if (!merged_out.empty()) {
    merged.open(merged_out);
    merged << "t";
    for (int k = 1; k <= ngauges; ++k)
      merged << ", ref_g" << k << ", run_g" << k;
    merged << "\n";
  }

  // load run gauges
  std::vector<std::vector<std::pair<double, double>>> run(ngauges);
  for (int k = 0; k < ngauges; ++k) {
    auto path = run_dir / ("gauge_" + std::to_string(k + 1) + ".csv");
    std::ifstream gin(path);
    if (!gin) throw ParseError("cannot open run gauge file: " + path.string());
    std::string gl;
    std::getline(gin, gl);  // header
    while (std::getline(gin, gl)) {
      std::replace(gl.begin(), gl.end(), ',', ' ');
      std::istringstream ss(gl);
      double t, v;
      if (ss >> t >> v) run[k].emplace_back(t, v);
    }
    if (run[k].size() < 2)
      throw ParseError("run gauge file too short: " + path.string());
  }

  std::vector<GaugeComparison> out;
  std::vector<std::vector<double>> run_interp(ngauges, std::vector<double>(rt.size(), 0.0));
  for (int k = 0; k < ngauges; ++k) {
    GaugeComparison c;
    c.gauge = k + 1;
    double sq = 0.0;
    const auto& series = run[k];
    for (size_t i = 0; i < rt.size(); ++i) {
      double t = rt[i];
      if (t < series.front().first || t > series.back().first) continue;
      auto it = std::lower_bound(
          series.begin(), series.end(), t,
          [](const std::pair<double, double>& a, double b) { return a.first < b; });
      double v;
      if (it == series.begin())
        v = it->second;
      else {
        auto prev = it - 1;
        double w = (t - prev->first) / (it->first - prev->first);
        v = (1.0 - w) * prev->second + w * it->second;
      }
      run_interp[k][i] = v;
      double d = v - rv[k][i];
      sq += d * d;
      c.linf = std::max(c.linf, std::abs(d));
      c.samples++;
    }
    if (c.samples == 0)
      throw ValidationError("gauge " + std::to_string(k + 1) +
                            ": reference and run time ranges do not overlap");
    c.l2 = std::sqrt(sq / c.samples);
    out.push_back(c);
  }
  if (merged.is_open()) {
    merged << std::setprecision(17);
    for (size_t i = 0; i < rt.size(); ++i) {
      merged << rt[i];
      for (int k = 0; k < ngauges; ++k)
        merged << ", " << rv[k][i] << ", " << run_interp[k][i];
      merged << "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config-driven scenario runner
// ---------------------------------------------------------------------------

namespace detail {

inline Config scenario_defaults(ScenarioKind kind) {
  const char* text = "";
  switch (kind) {
    case ScenarioKind::solitary_flat:
      text =
          "[model]\ntheta_sq = 0.8181818181818182\ng = 1\n"
          "[mesh]\nkind = rectangle\nx0 = -50\nx1 = 50\ny0 = -5\ny1 = 5\n"
          "nx = 250\nny = 25\n"
          "[space]\ndegree = 1\n"
          "[bathymetry]\nkind = flat\ndepth = 1\n"
          "[init]\nkind = analytic_solitary\ncrest_x = 0\n"
          "[time]\ndt = 0.1\nt_end = 20\nrelaxation = on\n"
          "[output]\ndir = out/solitary_flat\nlog_every = 1\n";
      break;
    case ScenarioKind::shoaling_reflection:
      text =
          "[model]\ntheta_sq = 1\ng = 9.81\n"
          "[mesh]\nkind = rectangle\nx0 = -50\nx1 = 20\ny0 = 0\ny1 = 1\n"
          "nx = 210\nny = 3\n"
          "[space]\ndegree = 1\n"
          "[bathymetry]\nkind = shoaling\n"
          "[init]\nkind = petviashvili\namplitude = 0.07\ncrest_x = -30\n"
          "depth = 0.7\n"
          "[time]\ndt = 0.04\nt_end = 30\nrelaxation = on\n"
          "[gauges]\npoint = 0 0\npoint = 16.25 0\npoint = 17.75 0\n"
          "[output]\ndir = out/shoaling_reflection\nlog_every = 5\n";
      break;
    case ScenarioKind::cylinder:
      text =
          "[model]\ntheta_sq = 1\ng = 9.81\n"
          "[mesh]\nkind = file\npath = data/meshes/cylinder_channel_desk.tri\n"
          "[space]\ndegree = 1\n"
          "[bathymetry]\nkind = flat\ndepth = 0.15\n"
          "[init]\nkind = petviashvili\nspeed = 1.356\ncrest_x = -2.1\n"
          "depth = 0.15\n"
          "[time]\ndt = 0.01\nt_end = 8\nrelaxation = on\n"
          "[gauges]\npoint = 4.4 0.271\npoint = 4.5 0.17\npoint = 4.5 0.045\n"
          "point = 4.6 0.275\npoint = 4.975 0.275\npoint = 5.375 0.275\n"
          "[output]\ndir = out/cylinder\nlog_every = 10\n";
      break;
    case ScenarioKind::submerged_bar:
      text =
          "[model]\ntheta_sq = 1\ng = 9.81\n"
          "[mesh]\nkind = rectangle\nx0 = -100\nx1 = 50\ny0 = 0\ny1 = 1\n"
          "nx = 600\nny = 4\n"
          "[space]\ndegree = 2\n"
          "[bathymetry]\nkind = bar\n"
          "[init]\nkind = wavetrain\namplitude = 0.01\nwavenumber = 1.67\n"
          "phase_x0 = 3.6\ncutoff_x1 = 60\ndepth = 0.4\n"
          "[time]\ndt = 0.05\nt_end = 15\nrelaxation = on\n"
          "[gauges]\npoint = 10.5 0.5\npoint = 12.5 0.5\npoint = 13.5 0.5\n"
          "point = 14.5 0.5\npoint = 15.7 0.5\npoint = 17.3 0.5\n"
          "[output]\ndir = out/submerged_bar\nlog_every = 10\n";
      break;
    case ScenarioKind::y_junction:
      text =
          "[model]\ntheta_sq = 1\ng = 9.81\n"
          "[mesh]\nkind = file\npath = data/meshes/yjunction_desk.msh\n"
          "[space]\ndegree = 2\n"
          "[bathymetry]\nkind = flat\ndepth = 1\n"
          "[init]\nkind = petviashvili\nspeed = 3.6\ncrest_x = -10\ndepth = 1\n"
          "[time]\ndt = 0.02\nt_end = 5\nrelaxation = on\n"
          "[gauges]\npoint = -5 0\npoint = 0 0\npoint = 7 -4\npoint = 14 -8\n"
          "point = 0 -1\npoint = 2 0\n"
          "[output]\ndir = out/y_junction\nlog_every = 10\n";
      break;
    case ScenarioKind::custom:
      text =
          "[model]\ntheta_sq = 1\ng = 9.81\n"
          "[space]\ndegree = 1\n"
          "[bathymetry]\nkind = flat\ndepth = 1\n"
          "[init]\nkind = rest\n"
          "[time]\ndt = 0.05\nt_end = 1\nrelaxation = on\n"
          "[output]\ndir = out/custom\nlog_every = 1\n";
      break;
    default:
      break;
  }
  return Config::parse_string(text);
}

inline const std::map<std::string, std::vector<std::string>>& run_schema() {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"scenario", {"kind"}},
      {"model", {"theta_sq", "g"}},
      {"mesh",
       {"kind", "x0", "x1", "y0", "y1", "nx", "ny", "diagonal", "path",
        "format"}},
      {"space", {"degree"}},
      {"bathymetry", {"kind", "depth"}},
      {"init",
       {"kind", "crest_x", "speed", "amplitude", "depth", "direction_x",
        "direction_y", "wavenumber", "phase_x0", "cutoff_x1"}},
      {"petviashvili",
       {"tolerance", "max_iterations", "exponent", "channel_half_length",
        "channel_nx", "channel_ny", "channel_width"}},
      {"time", {"dt", "t_end", "relaxation"}},
      {"gauges", {"point"}},
      {"output", {"dir", "log_every", "snapshot_every"}},
      {"provenance", {"code_version", "mesh_hash", "petviashvili_speed"}},
  };
  return schema;
}

inline std::vector<Vec2> parse_gauges(const Config& cfg) {
  std::vector<Vec2> out;
  for (const auto& s : cfg.get_list("gauges", "point")) {
    std::istringstream ss(s);
    double x, y;
    if (!(ss >> x >> y))
      throw ParseError("bad gauge point '" + s + "' (expected 'x y')");
    out.emplace_back(x, y);
  }
  return out;
}

inline Mesh build_mesh(const Config& cfg,
                       const std::filesystem::path& base_dir) {
  std::string kind = cfg.get_string("mesh", "kind", "rectangle");
  if (kind == "rectangle") {
    std::string diag = cfg.get_string("mesh", "diagonal", "right");
    DiagonalRule rule = diag == "right"  ? DiagonalRule::right
                        : diag == "left" ? DiagonalRule::left
                        : diag == "union_jack" ? DiagonalRule::union_jack
                        : diag == "crossed"
                            ? DiagonalRule::crossed
                            : throw ParseError("bad diagonal rule '" + diag +
                                               "'");
    return generate_rectangle(
        {cfg.require_double("mesh", "x0"), cfg.require_double("mesh", "x1")},
        {cfg.require_double("mesh", "y0"), cfg.require_double("mesh", "y1")},
        cfg.get_int("mesh", "nx", 10), cfg.get_int("mesh", "ny", 10), rule);
  }
  if (kind == "file") {
    std::filesystem::path p = cfg.require_string("mesh", "path");
    if (p.is_relative() && !std::filesystem::exists(p) && !base_dir.empty()) {
      // resolve against the config file's directory, then its parent (the
      // shipped configs sit one level below the data/ tree)
      if (std::filesystem::exists(base_dir / p))
        p = base_dir / p;
      else if (std::filesystem::exists(base_dir / ".." / p))
        p = base_dir / ".." / p;
    }
    std::string fmt = cfg.get_string("mesh", "format", "auto");
    if (fmt == "auto") return read_mesh(p.string());
    if (fmt == "simple_tri") return read_mesh(p.string(), MeshFormat::simple_tri);
    if (fmt == "msh2_ascii") return read_mesh(p.string(), MeshFormat::msh2_ascii);
    throw ParseError("bad mesh format '" + fmt + "'");
  }
  throw ParseError("bad mesh kind '" + kind + "' (expected rectangle or file)");
}

}  // namespace detail

struct RunResult {
  std::filesystem::path output_dir;
  IntegrationResult integration;
  ConservedQuantities initial;
  std::string init_note;
};

/// Run one time-dependent scenario from a (complete or partial) config.
/// Reads the scenario's defaults, overlays the user's keys, validates
/// everything up front, integrates, and writes conservation / gauge /
/// relaxation CSVs, VTK snapshots and a re-runnable manifest.
inline RunResult run_scenario(const Config& user,
                              const std::filesystem::path& base_dir = {}) {
  ScenarioKind kind =
      scenario_kind_from_string(user.require_string("scenario", "kind"));
  if (kind == ScenarioKind::mms_convergence ||
      kind == ScenarioKind::dispersion_table)
    throw ParseError(
        "run_scenario handles time-domain runs; use the eoc/dispersion entry "
        "points for this scenario kind");

  Config cfg = detail::scenario_defaults(kind).merged_with(user);
  cfg.check_known_keys(detail::run_schema());

  // -- validate and resolve everything before any compute
  std::vector<std::string> problems;
  const double theta_sq = cfg.require_double("model", "theta_sq");
  const double g = cfg.require_double("model", "g");
  const double dt = cfg.require_double("time", "dt");
  const double t_end = cfg.require_double("time", "t_end");
  if (!(dt > 0.0)) problems.push_back("[time] dt must be positive");
  if (!(t_end > 0.0)) problems.push_back("[time] t_end must be positive");
  if (!(g > 0.0)) problems.push_back("[model] g must be positive");
  if (!(theta_sq >= 2.0 / 3.0 && theta_sq <= 1.0))
    problems.push_back("[model] theta_sq outside [2/3, 1]");
  const int degree = cfg.get_int("space", "degree", 1);
  if (degree < 1 || degree > 4)
    problems.push_back("[space] degree must be between 1 and 4");
  if (!problems.empty()) {
    std::string msg = "scenario validation failed:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ParseError(msg);
  }

  ModelParams params = params_from_theta(theta_sq, g);
  Mesh mesh = detail::build_mesh(cfg, base_dir);
  FeSpace space(mesh, degree);
  ScalarField depth =
      make_bathymetry(cfg.get_string("bathymetry", "kind", "flat"),
                      cfg.get_double("bathymetry", "depth", 1.0));
  DiscreteOperators ops(space, depth, params);

  std::vector<Vec2> gauges = detail::parse_gauges(cfg);
  for (size_t i = 0; i < gauges.size(); ++i)
    if (!mesh.locate_point(gauges[i]))
      throw ValidationError("gauge " + std::to_string(i + 1) +
                            " lies outside the domain");

  // -- initial condition
  State s0;
  std::string init_note;
  const std::string init_kind = cfg.get_string("init", "kind", "rest");
  if (init_kind == "rest") {
    s0.eta.assign(space.n_dofs(), 0.0);
    s0.phi.assign(space.n_dofs(), 0.0);
  } else if (init_kind == "analytic_solitary") {
    Vec2 dir{cfg.get_double("init", "direction_x", 1.0),
             cfg.get_double("init", "direction_y", 0.0)};
    SolitaryWave wave =
        analytic_solitary(theta_sq, cfg.get_double("bathymetry", "depth", 1.0),
                          g, dir, cfg.get_double("init", "crest_x", 0.0));
    s0 = initial_state(ops, wave.eta_field(), wave.potential_field());
    init_note = "analytic solitary wave, c_s = " +
                std::to_string(wave.params.speed) +
                ", A = " + std::to_string(wave.params.amplitude);
  } else if (init_kind == "petviashvili") {
    const double d0 = cfg.get_double("init", "depth",
                                     cfg.get_double("bathymetry", "depth", 1.0));
    PetviashviliConfig pcfg;
    pcfg.params = params;
    pcfg.depth = d0;
    pcfg.tolerance = cfg.get_double("petviashvili", "tolerance", 1e-6);
    pcfg.max_iterations = cfg.get_int("petviashvili", "max_iterations", 50);
    pcfg.exponent = cfg.get_double("petviashvili", "exponent", 2.0);

    // generation channel sized from the Serre decay rate: long enough for
    // the tails to vanish, fine enough to resolve the crest, and only a
    // couple of cells wide (the profile is constant across the channel)
    double amp_guess = cfg.get_double("init", "amplitude", 0.0);
    double speed = cfg.get_double("init", "speed", 0.0);
    if (amp_guess <= 0.0 && speed <= 0.0)
      throw ParseError("[init] petviashvili needs speed or amplitude");
    double a_est = amp_guess > 0.0 ? amp_guess : speed * speed / g - d0;
    if (!(a_est > 0.0))
      throw ParseError("[init] petviashvili speed must be supercritical");
    double lam = std::sqrt(3.0 * a_est / (4.0 * d0 * d0 * (d0 + a_est)));
    double half = cfg.get_double("petviashvili", "channel_half_length",
                                 std::ceil(14.0 / lam));
    double target_h = std::min(mesh.h_min, 1.0 / (12.0 * lam));
    double width = cfg.get_double("petviashvili", "channel_width",
                                  4.0 * target_h);
    int ch_nx = cfg.get_int("petviashvili", "channel_nx",
                            static_cast<int>(std::ceil(2.0 * half / target_h)));
    int ch_ny = cfg.get_int("petviashvili", "channel_ny", 2);

    Mesh channel = generate_rectangle({-half, half}, {0.0, width}, ch_nx,
                                      ch_ny, DiagonalRule::right);
    FeSpace ch_space(channel, degree);
    TravelingWaveSolution wave =
        amp_guess > 0.0
            ? find_wave_by_amplitude(pcfg, ch_space, amp_guess)
            : [&] {
                pcfg.speed = speed;
                return petviashvili_solve(pcfg, ch_space);
              }();

    Vec2 dir{cfg.get_double("init", "direction_x", 1.0),
             cfg.get_double("init", "direction_y", 0.0)};
    TransplantedWave tw =
        transplant_wave(wave, dir, cfg.get_double("init", "crest_x", 0.0));
    s0.eta = interpolate(space, tw.eta_field()).coeffs();
    s0.phi = initial_potential(space, tw.velocity_field()).coeffs();
    init_note = "Petviashvili wave, c_s = " + std::to_string(wave.speed) +
                ", A = " + std::to_string(wave.amplitude()) + ", " +
                std::to_string(wave.iterations) + " iterations";
    cfg.set("provenance", "petviashvili_speed", std::to_string(wave.speed));
  } else if (init_kind == "wavetrain") {
    BarWavetrain wt;
    wt.A = cfg.get_double("init", "amplitude", 0.01);
    wt.k = cfg.get_double("init", "wavenumber", 1.67);
    wt.x0 = cfg.get_double("init", "phase_x0", 3.6);
    wt.x1 = cfg.get_double("init", "cutoff_x1", 60.0);
    wt.D0 = cfg.get_double("init", "depth", 0.4);
    wt.g = g;
    wt.c = params.c;
    FeFunction eta0 = l2_project(space, wt.eta_field(), ops.mass_solver());
    s0.eta = eta0.coeffs();
    s0.phi = initial_potential(space, wt.velocity_field()).coeffs();
    init_note = "wave train inlet";
  } else {
    throw ParseError("unknown [init] kind '" + init_kind + "'");
  }
  s0.t = 0.0;

  // -- output locations (environment variable wins over config)
  std::filesystem::path outdir = cfg.get_string("output", "dir", "out/run");
  if (const char* env = std::getenv("BSWAVE_OUTPUT_DIR")) outdir = env;
  std::filesystem::create_directories(outdir);

  IntegrateOptions iopt;
  iopt.relaxation = cfg.get_bool("time", "relaxation", true);
  iopt.gauges = gauges;
  iopt.log_every = cfg.get_int("output", "log_every", 1);
  iopt.snapshot_every = cfg.get_int("output", "snapshot_every", 0);
  std::ostringstream warn;
  iopt.warnings = &warn;
  if (iopt.snapshot_every > 0)
    iopt.snapshot_hook = [&](const State& s, long step) {
      std::ostringstream name;
      name << "snap_" << std::setw(6) << std::setfill('0') << step << ".vtk";
      write_vtk_snapshot(outdir / "snapshots" / name.str(), space, s);
    };
  iopt.on_failure = [&](const State& s, long step) {
    State clean = s;
    // NaNs break VTK consumers; clamp the dump to something loadable
    for (double& v : clean.eta)
      if (!std::isfinite(v)) v = 0.0;
    for (double& v : clean.phi)
      if (!std::isfinite(v)) v = 0.0;
    write_vtk_snapshot(outdir / "post_mortem.vtk", space, clean);
    (void)step;
  };

  // manifest first: it must suffice to re-run even a failing configuration
  cfg.set("provenance", "code_version", kVersion);
  cfg.set("provenance", "mesh_hash", std::to_string(mesh_hash(mesh)));
  write_manifest(outdir / "manifest.ini", cfg.sections());

  RunResult result;
  result.output_dir = outdir;
  result.init_note = init_note;
  result.initial = ops.conserved(s0);

  try {
    result.integration = integrate(ops, s0, classical_rk4(), dt, t_end, iopt);
  } catch (const IntegrationError& e) {
    std::ofstream post(outdir / "post_mortem.txt");
    post << "integration aborted: " << e.what() << "\n";
    post << "t = " << e.t << ", step = " << e.step << "\n";
    post << "state snapshot: post_mortem.vtk\n";
    throw;
  }

  write_conservation_csv(outdir / "conservation.csv",
                         result.integration.conservation);
  write_relaxation_csv(outdir / "relaxation.csv",
                       result.integration.relaxation);
  for (const auto& gsr : result.integration.gauges)
    write_gauge_csv(outdir / ("gauge_" + std::to_string(gsr.id) + ".csv"),
                    gsr);
  write_vtk_snapshot(outdir / "final.vtk", space, result.integration.state);
  if (!warn.str().empty()) {
    std::ofstream wf(outdir / "warnings.txt");
    wf << warn.str();
  }
  return result;
}

}  // namespace bswave
