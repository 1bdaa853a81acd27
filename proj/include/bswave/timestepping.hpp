#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bswave/semidiscrete.hpp"

namespace bswave {

/// Explicit Runge-Kutta tableau. A is strictly lower triangular, sum(b) = 1,
/// c_i = sum_j A_ij.
struct ButcherTableau {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> c;
  int order = 0;
  std::string name;

  int stages() const { return static_cast<int>(b.size()); }

  void validate() const {
    const int s = stages();
    if (static_cast<int>(A.size()) != s || static_cast<int>(c.size()) != s)
      throw ValidationError("tableau: inconsistent dimensions");
    double bs = 0.0;
    for (double bi : b) bs += bi;
    if (std::abs(bs - 1.0) > 1e-14)
      throw ValidationError("tableau: weights must sum to 1");
    for (int i = 0; i < s; ++i) {
      if (static_cast<int>(A[i].size()) != s)
        throw ValidationError("tableau: A must be s x s");
      double ci = 0.0;
      for (int j = 0; j < s; ++j) {
        if (j >= i && A[i][j] != 0.0)
          throw ValidationError("tableau: A must be strictly lower triangular");
        ci += A[i][j];
      }
      if (std::abs(ci - c[i]) > 1e-14)
        throw ValidationError("tableau: stage abscissae must match row sums");
    }
  }
};

/// The classical four-stage, fourth-order method.
inline ButcherTableau classical_rk4() {
  ButcherTableau t;
  t.name = "rk4";
  t.order = 4;
  t.A = {{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1.0, 0}};
  t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  t.c = {0.0, 0.5, 0.5, 1.0};
  t.validate();
  return t;
}

inline ButcherTableau tableau_by_name(const std::string& name) {
  if (name == "rk4") return classical_rk4();
  throw ValidationError("unknown tableau '" + name + "' (available: rk4)");
}

/// One explicit RK step of a generic ODE y' = f(t, y); diagnostic harness
/// for tableau verification on scalar problems.
template <class Vec, class Rhs>
Vec generic_rk_direction(const ButcherTableau& tab, const Rhs& f, double t,
                         const Vec& y, double dt) {
  const int s = tab.stages();
  std::vector<Vec> k(s);
  for (int i = 0; i < s; ++i) {
    Vec yi = y;
    for (int j = 0; j < i; ++j)
      if (tab.A[i][j] != 0.0) yi += dt * tab.A[i][j] * k[j];
    k[i] = f(t + tab.c[i] * dt, yi);
  }
  Vec d = tab.b[0] * k[0];
  for (int i = 1; i < s; ++i) d += tab.b[i] * k[i];
  return d;
}

/// Update direction of one step: d = sum_i b_i f(t + c_i dt, stage_i).
struct UpdateDirection {
  std::vector<double> eta;
  std::vector<double> phi;
  int stages = 0;
};

inline UpdateDirection rk_step(const DiscreteOperators& ops,
                               const State& state, const ButcherTableau& tab,
                               double dt, const Forcing* forcing = nullptr) {
  if (!(dt > 0.0)) throw ValidationError("rk_step: dt must be positive");
  const int s = tab.stages();
  const size_t n = state.eta.size();

  std::vector<std::vector<double>> k_eta(s), k_phi(s);
  State stage;
  for (int i = 0; i < s; ++i) {
    stage.eta = state.eta;
    stage.phi = state.phi;
    stage.t = state.t + tab.c[i] * dt;
    for (int j = 0; j < i; ++j) {
      const double a = tab.A[i][j];
      if (a == 0.0) continue;
      for (size_t m = 0; m < n; ++m) {
        stage.eta[m] += dt * a * k_eta[j][m];
        stage.phi[m] += dt * a * k_phi[j][m];
      }
    }
    try {
      ops.rhs(stage, k_eta[i], k_phi[i], forcing);
    } catch (const SolverError& e) {
      throw SolverError("stage " + std::to_string(i + 1) + " of " +
                        std::to_string(s) + ": " + e.what());
    }
  }

  UpdateDirection d;
  d.stages = s;
  d.eta.assign(n, 0.0);
  d.phi.assign(n, 0.0);
  for (int i = 0; i < s; ++i)
    for (size_t m = 0; m < n; ++m) {
      d.eta[m] += tab.b[i] * k_eta[i][m];
      d.phi[m] += tab.b[i] * k_phi[i][m];
    }
  return d;
}

/// Per-step record of the energy-restoring scalar solve.
struct RelaxationRecord {
  double t = 0.0;
  double gamma = 1.0;
  double a_coef = 0.0, b_coef = 0.0, c_coef = 0.0;  // cubic x^3, x^2, x
  std::string status = "ok";
};

namespace detail {

/// Coefficients of E(y + x d) - E(y) = (A x^3 + B x^2 + C x) / 2, assembled
/// with the energy quadrature rule so the identity is exact at the discrete
/// level. Also returns 2E(y) (the constant term scale) from the same pass.
inline void relaxation_coefficients(const DiscreteOperators& ops,
                                    const State& state,
                                    const UpdateDirection& d, double& A,
                                    double& B, double& C,
                                    double* twice_energy = nullptr) {
  const FeSpace& sp = ops.space();
  const TriangleRule& rule = triangle_rule(sp.energy_quad_degree());
  const BasisTable tab(sp.degree(), rule);
  const int nd = sp.dofs_per_cell();
  const double g = ops.params().g;
  const double cg = ops.params().c * ops.params().g;

  A = B = C = 0.0;
  double e2 = 0.0;
  for (int t = 0; t < sp.mesh().n_triangles(); ++t) {
    ElementMap em(sp.mesh(), t);
    const int* cd = sp.cell_dofs(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double* n = &tab.values[q * nd];
      double eta_q = 0.0, de_q = 0.0;
      Vec2 geta_hat{}, gphi_hat{}, gde_hat{}, gdp_hat{};
      for (int i = 0; i < nd; ++i) {
        const Vec2 gr = tab.ref_grads[q * nd + i];
        eta_q += state.eta[cd[i]] * n[i];
        de_q += d.eta[cd[i]] * n[i];
        geta_hat += gr * state.eta[cd[i]];
        gphi_hat += gr * state.phi[cd[i]];
        gde_hat += gr * d.eta[cd[i]];
        gdp_hat += gr * d.phi[cd[i]];
      }
      Vec2 geta = em.push_gradient(geta_hat);
      Vec2 gphi = em.push_gradient(gphi_hat);
      Vec2 gde = em.push_gradient(gde_hat);
      Vec2 gdp = em.push_gradient(gdp_hat);
      double depth = ops.depth().value(em.to_physical(rule.points[q]));
      double w = rule.weights[q] * em.area();

      A += w * de_q * gdp.dot(gdp);
      B += w * (g * de_q * de_q + cg * depth * depth * gde.dot(gde) +
                (depth + eta_q) * gdp.dot(gdp) + 2.0 * de_q * gphi.dot(gdp));
      C += w * ((2.0 * g * eta_q + gphi.dot(gphi)) * de_q +
                2.0 * cg * depth * depth * geta.dot(gde) +
                2.0 * (depth + eta_q) * gphi.dot(gdp));
      e2 += w * (g * eta_q * eta_q + (depth + eta_q) * gphi.dot(gphi) +
                 cg * depth * depth * geta.dot(geta));
    }
  }
  if (twice_energy) *twice_energy = e2;
}

}  // namespace detail

/// Find gamma so the energy after y + gamma dt d matches the energy before.
/// The cubic A x^3 + B x^2 + C x = 0 (x = gamma dt) is solved by the
/// cancellation-safe two-branch quadratic formula after discarding x = 0;
/// the accepted root is the positive one closest to gamma = 1, rejected
/// outside |gamma - 1| <= 0.5.
inline RelaxationRecord solve_relaxation_gamma(const DiscreteOperators& ops,
                                               const State& state,
                                               const UpdateDirection& d,
                                               double dt) {
  RelaxationRecord rec;
  rec.t = state.t;
  double twice_energy = 0.0;
  detail::relaxation_coefficients(ops, state, d, rec.a_coef, rec.b_coef,
                                  rec.c_coef, &twice_energy);
  const double A = rec.a_coef, B = rec.b_coef, C = rec.c_coef;

  // Negligible direction: the cubic is zero to round-off, keep gamma = 1.
  const double scale = std::abs(C) * dt + std::abs(B) * dt * dt +
                       std::abs(A) * dt * dt * dt;
  const double energy_scale = 1.0 + 0.5 * std::abs(twice_energy);
  if (scale <= 1e-14 * energy_scale) {
    rec.gamma = 1.0;
    rec.status = "trivial";
    return rec;
  }

  std::array<double, 2> roots{};
  int nroots = 0;
  if (std::abs(A) * dt <= 1e-14 * std::abs(B)) {
    if (B == 0.0)
      throw RelaxationError("relaxation: degenerate quadratic (A = B = 0)");
    roots[nroots++] = -C / B;
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0)
      throw RelaxationError(
          "relaxation: negative discriminant, no real root (B^2-4AC = " +
          std::to_string(disc) + ")");
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (B + std::copysign(sq, B));
    if (qq != 0.0) {
      roots[nroots++] = qq / A;
      roots[nroots++] = C / qq;
    } else {
      roots[nroots++] = -B / A;
    }
  }

  double best = 0.0;
  bool found = false;
  for (int i = 0; i < nroots; ++i) {
    if (!(roots[i] > 0.0)) continue;
    double gamma = roots[i] / dt;
    if (std::abs(gamma - 1.0) > 0.5) continue;
    if (!found || std::abs(gamma - 1.0) < std::abs(best - 1.0)) {
      best = gamma;
      found = true;
    }
  }
  if (!found) {
    std::string rs;
    for (int i = 0; i < nroots; ++i)
      rs += (i ? ", " : "") + std::to_string(roots[i] / dt);
    throw RelaxationError(
        "relaxation: no positive root with |gamma-1| <= 0.5 (gamma candidates: " +
        rs + ")");
  }
  rec.gamma = best;
  return rec;
}

struct ConservationRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double vorticity = 0.0;
  double gamma = 1.0;
};

struct GaugeSeries {
  int id = 0;
  Vec2 location;
  std::vector<std::pair<double, double>> samples;  // (t, eta)
};

struct IntegrationResult {
  State state;
  std::vector<ConservationRow> conservation;
  std::vector<GaugeSeries> gauges;
  std::vector<RelaxationRecord> relaxation;
  long steps = 0;
};

struct IntegrateOptions {
  bool relaxation = true;
  std::vector<Vec2> gauges;
  int log_every = 1;
  double blowup_limit = 1e8;
  const Forcing* forcing = nullptr;
  /// Called every snapshot_every accepted steps (and at t = 0) when set.
  std::function<void(const State&, long)> snapshot_hook;
  int snapshot_every = 0;
  /// Called with the last state before an IntegrationError propagates
  /// (post-mortem snapshot).
  std::function<void(const State&, long)> on_failure;
  std::ostream* warnings = nullptr;
};

/// Integrate from state0 to t_end with fixed nominal step dt. With
/// relaxation on, time advances by gamma^n dt, so logged times are the
/// (slightly) non-uniform actual times; the final step adjusts its nominal
/// length so the relaxed step still lands exactly on t_end.
inline IntegrationResult integrate(const DiscreteOperators& ops,
                                   const State& state0,
                                   const ButcherTableau& tableau, double dt,
                                   double t_end,
                                   const IntegrateOptions& opt = {}) {
  tableau.validate();
  if (!(dt > 0.0)) throw ValidationError("integrate: dt must be positive");
  if (!(t_end > state0.t))
    throw ValidationError("integrate: t_end must exceed the initial time");
  if (dt >= 1.0 && opt.warnings)
    *opt.warnings << "warning: dt = " << dt
                  << " >= 1; large steps were found unstable in this regime\n";

  IntegrationResult out;
  out.state = state0;
  for (size_t i = 0; i < opt.gauges.size(); ++i) {
    Vec2 p = opt.gauges[i];
    auto loc = ops.space().mesh().locate_point(p);
    if (!loc)
      throw ValidationError("gauge " + std::to_string(i + 1) + " at (" +
                            std::to_string(p.x) + "," + std::to_string(p.y) +
                            ") lies outside the mesh");
    out.gauges.push_back({static_cast<int>(i + 1), p, {}});
  }
  std::vector<PointLocation> gauge_loc;
  for (Vec2 p : opt.gauges) gauge_loc.push_back(*ops.space().mesh().locate_point(p));

  auto record_gauges = [&](const State& s) {
    FeFunction eta(ops.space(), s.eta);
    for (size_t i = 0; i < gauge_loc.size(); ++i)
      out.gauges[i].samples.emplace_back(
          s.t, eta.value_in_cell(gauge_loc[i].triangle, gauge_loc[i].bary));
  };
  auto log_conservation = [&](const State& s, double gamma) {
    auto c = ops.conserved(s);
    out.conservation.push_back({s.t, c.mass, c.energy, c.vorticity, gamma});
  };

  record_gauges(out.state);
  log_conservation(out.state, 1.0);
  if (opt.snapshot_hook) opt.snapshot_hook(out.state, 0);

  const double t_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  long step = 0;
  while (out.state.t < t_end - t_tol) {
    ++step;
    double dt_step = dt;
    bool final_step = out.state.t + dt >= t_end - t_tol;
    if (final_step) dt_step = t_end - out.state.t;

    UpdateDirection d;
    RelaxationRecord rec;
    try {
      d = rk_step(ops, out.state, tableau, dt_step, opt.forcing);
      if (opt.relaxation) {
        rec = solve_relaxation_gamma(ops, out.state, d, dt_step);
        if (final_step) {
          // land exactly on t_end without giving up energy restoration:
          // adjust the nominal step until gamma * dt_step hits the target
          const double target = t_end - out.state.t;
          for (int it = 0; it < 3 && std::abs(rec.gamma * dt_step - target) >
                                         0.5 * t_tol;
               ++it) {
            dt_step = target / rec.gamma;
            d = rk_step(ops, out.state, tableau, dt_step, opt.forcing);
            rec = solve_relaxation_gamma(ops, out.state, d, dt_step);
          }
          rec.status = "final_step_relaxed";
        }
      } else {
        rec.t = out.state.t;
        rec.gamma = 1.0;
        rec.status = final_step ? "final_step" : "off";
      }
    } catch (const Error& e) {
      if (opt.on_failure) opt.on_failure(out.state, step);
      throw IntegrationError(std::string("step ") + std::to_string(step) +
                                 " at t = " + std::to_string(out.state.t) +
                                 ": " + e.what(),
                             out.state.t, step);
    }

    const double advance = rec.gamma * dt_step;
    double max_eta = 0.0;
    for (size_t m = 0; m < out.state.eta.size(); ++m) {
      out.state.eta[m] += advance * d.eta[m];
      out.state.phi[m] += advance * d.phi[m];
      max_eta = std::max(max_eta, std::abs(out.state.eta[m]));
    }
    out.state.t += advance;
    out.relaxation.push_back(rec);

    if (!std::isfinite(max_eta) || max_eta > opt.blowup_limit) {
      if (opt.on_failure) opt.on_failure(out.state, step);
      throw IntegrationError("divergence detected at t = " +
                                 std::to_string(out.state.t) +
                                 " (max |eta| = " + std::to_string(max_eta) +
                                 ")",
                             out.state.t, step);
    }

    record_gauges(out.state);
    if (opt.log_every > 0 &&
        (step % opt.log_every == 0 || out.state.t >= t_end - t_tol))
      log_conservation(out.state, rec.gamma);
    if (opt.snapshot_hook && opt.snapshot_every > 0 &&
        step % opt.snapshot_every == 0)
      opt.snapshot_hook(out.state, step);
  }
  out.steps = step;
  return out;
}

}  // namespace bswave
