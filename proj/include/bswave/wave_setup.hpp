#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bswave/assembly.hpp"
#include "bswave/model.hpp"
#include "bswave/solvers.hpp"

namespace bswave {

/// Load of a pointwise product of two FE functions:
/// entry i = scale * integral of a_h b_h psi_i.
inline std::vector<double> assemble_product_load(const FeSpace& space,
                                                 const FeFunction& a,
                                                 const FeFunction& b,
                                                 double scale,
                                                 int quad_degree = -1) {
  const Mesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(
      quad_degree >= 0 ? quad_degree : space.assembly_quad_degree());
  const BasisTable tab(space.degree(), rule);
  const int nd = space.dofs_per_cell();

  std::vector<double> out(space.n_dofs(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementMap em(mesh, t);
    const int* cd = space.cell_dofs(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double* n = &tab.values[q * nd];
      double av = 0.0, bv = 0.0;
      for (int i = 0; i < nd; ++i) {
        av += a.coeffs()[cd[i]] * n[i];
        bv += b.coeffs()[cd[i]] * n[i];
      }
      double w = rule.weights[q] * em.area() * scale * av * bv;
      for (int i = 0; i < nd; ++i) out[cd[i]] += w * n[i];
    }
  }
  return out;
}

struct PetviashviliConfig {
  double speed = 0.0;        // c_s
  double exponent = 2.0;     // p
  double tolerance = 1e-6;   // delta, on the normalized residual
  int max_iterations = 50;
  double depth = 1.0;        // flat D0
  ModelParams params;
};

/// 1D profile of a line wave sampled along the channel centerline; linear
/// interpolation between samples, zero outside the sampled range.
struct LineProfile {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> w;

  double interp(const std::vector<double>& f, double x) const {
    if (xi.empty() || x <= xi.front() || x >= xi.back()) return 0.0;
    auto it = std::upper_bound(xi.begin(), xi.end(), x);
    size_t j = static_cast<size_t>(it - xi.begin());
    double t = (x - xi[j - 1]) / (xi[j] - xi[j - 1]);
    return (1.0 - t) * f[j - 1] + t * f[j];
  }
  double eval_eta(double x) const { return interp(eta, x); }
  double eval_w(double x) const { return interp(w, x); }
};

/// Discrete traveling wave (eta, w, wtilde) on a flat channel, in the frame
/// where the wave moves along +x. wtilde stays ~0 for line waves.
struct TravelingWaveSolution {
  FeFunction eta_h;
  FeFunction w_h;
  FeFunction wtilde_h;
  std::vector<double> residual_history;
  std::vector<double> m_history;
  std::vector<std::string> warnings;
  int iterations = 0;
  double speed = 0.0;
  double depth = 1.0;

  double amplitude() const {
    double a = 0.0;
    for (double c : eta_h.coeffs()) a = std::max(a, c);
    return a;
  }

  /// Crest position: dof coordinate of the largest eta coefficient.
  double crest_xi() const {
    const auto& c = eta_h.coeffs();
    size_t best = 0;
    for (size_t i = 1; i < c.size(); ++i)
      if (c[i] > c[best]) best = i;
    return eta_h.space().dof_coords()[best].x;
  }

  /// Sample eta and w along the channel centerline.
  LineProfile centerline_profile(int samples = 4096) const {
    const Mesh& mesh = eta_h.space().mesh();
    double xa = mesh.vertices[0].x, xb = xa, ya = mesh.vertices[0].y, yb = ya;
    for (const auto& v : mesh.vertices) {
      xa = std::min(xa, v.x);
      xb = std::max(xb, v.x);
      ya = std::min(ya, v.y);
      yb = std::max(yb, v.y);
    }
    const double ymid = 0.5 * (ya + yb);
    LineProfile p;
    p.xi.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
      double x = xa + (xb - xa) * i / samples;
      auto loc = mesh.locate_point({x, ymid});
      if (!loc) continue;
      p.xi.push_back(x);
      p.eta.push_back(eta_h.value_in_cell(loc->triangle, loc->bary));
      p.w.push_back(w_h.value_in_cell(loc->triangle, loc->bary));
    }
    return p;
  }
};

/// Solitary wave of the Serre equations with the same speed; the standard
/// initial guess for the fixed-point iteration. Requires supercritical
/// speed c_s > sqrt(g D0).
inline TravelingWaveSolution serre_initial_guess(double speed, double depth,
                                                 double g,
                                                 const FeSpace& space) {
  if (!(speed > std::sqrt(g * depth)))
    throw ModelError("Serre guess needs supercritical speed c_s > sqrt(g D0)" +
                     std::string(" (c_s = ") + std::to_string(speed) +
                     ", sqrt(g D0) = " + std::to_string(std::sqrt(g * depth)) +
                     ")");
  const double amp = speed * speed / g - depth;
  const double lam =
      std::sqrt(3.0 * amp / (4.0 * depth * depth * (depth + amp)));

  const Mesh& mesh = space.mesh();
  double xa = mesh.vertices[0].x, xb = xa;
  for (const auto& v : mesh.vertices) {
    xa = std::min(xa, v.x);
    xb = std::max(xb, v.x);
  }
  const double xc = 0.5 * (xa + xb);

  ScalarField eta0{[amp, lam, xc](Vec2 p) {
    double s = 1.0 / std::cosh(lam * (p.x - xc));
    return amp * s * s;
  }, {}};
  ScalarField w0{[amp, lam, xc, speed, depth](Vec2 p) {
    double s = 1.0 / std::cosh(lam * (p.x - xc));
    double e = amp * s * s;
    return speed * e / (depth + e);
  }, {}};

  CsrMatrix m = assemble_mass(space);
  SpdSolver msolver(m, SpdMethod::cholesky);
  TravelingWaveSolution sol;
  sol.eta_h = l2_project(space, eta0, msolver);
  sol.w_h = l2_project(space, w0, msolver);
  sol.wtilde_h = FeFunction(space);
  sol.speed = speed;
  sol.depth = depth;
  return sol;
}

namespace detail {

/// The 3x3 block operator of the steady traveling-wave system, tested
/// against (phi, chi, psi):
///   [ c_s M + b c_s D0^2 K      -D0 M                      0 ]
///   [ -g M - c g D0^2 K          c_s M + b c_s D0^2 K_xx   0 ]
///   [ 0                          0                         M ]
/// K is the full stiffness, K_xx couples only the x-derivatives.
struct TravelingWaveOperator {
  CsrMatrix mass, stiff, stiff_xx;
  CsrMatrix block;
  int n = 0;

  TravelingWaveOperator(const FeSpace& space, const PetviashviliConfig& cfg) {
    n = space.n_dofs();
    mass = assemble_mass(space);
    stiff = assemble_stiffness(space);
    stiff_xx = assemble_stiffness(space, nullptr, -1, StiffnessKind::xx_only);

    const double cs = cfg.speed, d0sq = cfg.depth * cfg.depth;
    const double b = cfg.params.b, c = cfg.params.c, g = cfg.params.g;
    std::vector<Triplet> trip;
    auto add_block = [&](int bi, int bj, const CsrMatrix& m, double s) {
      for (int r = 0; r < m.rows; ++r)
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
          trip.push_back({bi * n + r, bj * n + m.col_idx[k], s * m.vals[k]});
    };
    add_block(0, 0, mass, cs);
    add_block(0, 0, stiff, b * cs * d0sq);
    add_block(0, 1, mass, -cfg.depth);
    add_block(1, 0, mass, -g);
    add_block(1, 0, stiff, -c * g * d0sq);
    add_block(1, 1, mass, cs);
    add_block(1, 1, stiff_xx, b * cs * d0sq);
    add_block(2, 2, mass, 1.0);
    block = CsrMatrix::from_triplets(3 * n, 3 * n, std::move(trip));
  }

  std::vector<double> stack(const TravelingWaveSolution& s) const {
    std::vector<double> x(3 * n);
    std::copy(s.eta_h.coeffs().begin(), s.eta_h.coeffs().end(), x.begin());
    std::copy(s.w_h.coeffs().begin(), s.w_h.coeffs().end(), x.begin() + n);
    std::copy(s.wtilde_h.coeffs().begin(), s.wtilde_h.coeffs().end(),
              x.begin() + 2 * n);
    return x;
  }
};

}  // namespace detail

/// Normalized fixed-point iteration for the discrete traveling-wave system
/// L w = N(w), N(w) = (eta w, w^2/2, 0):
///   L w^{n+1} = m_n^p (N(w^n), .),
///   m_n = L(w^n, w^n) / (N(w^n), w^n),
/// stopping on |L(w^n,w^n) - (N(w^n),w^n)| / ||w^n||_2 < tolerance. The
/// (nonsymmetric) operator is factored once and reused for every iterate.
inline TravelingWaveSolution petviashvili_solve(
    const PetviashviliConfig& cfg, const FeSpace& space,
    const TravelingWaveSolution* guess = nullptr) {
  if (!(cfg.exponent > 1.0))
    throw ModelError("Petviashvili exponent must exceed 1");
  if (!(cfg.tolerance > 0.0)) throw ModelError("tolerance must be positive");

  TravelingWaveSolution sol =
      guess ? *guess
            : serre_initial_guess(cfg.speed, cfg.depth, cfg.params.g, space);
  detail::TravelingWaveOperator op(space, cfg);
  LuSolver lu(op.block);
  const int n = op.n;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    std::vector<double> x = op.stack(sol);
    std::vector<double> lx = op.block.multiply(x);
    double lww = 0.0;
    for (int i = 0; i < 3 * n; ++i) lww += x[i] * lx[i];

    std::vector<double> r1 =
        assemble_product_load(space, sol.eta_h, sol.w_h, 1.0);
    std::vector<double> r2 =
        assemble_product_load(space, sol.w_h, sol.w_h, 0.5);
    double nww = 0.0;
    for (int i = 0; i < n; ++i)
      nww += r1[i] * sol.eta_h.coeffs()[i] + r2[i] * sol.w_h.coeffs()[i];

    if (std::abs(nww) < 1e-14 * (1.0 + std::abs(lww)))
      throw SolverError(
          "Petviashvili: degenerate iterate, (N(w), w) vanished");
    const double m = lww / nww;
    sol.m_history.push_back(m);

    double xnorm = 0.0;
    for (double v : x) xnorm += v * v;
    xnorm = std::sqrt(xnorm);
    double residual = std::abs(lww - nww) / xnorm;
    // usually monotone after the first couple of iterations; a bump is
    // suspicious but not fatal
    if (sol.residual_history.size() >= 2 &&
        residual > sol.residual_history.back())
      sol.warnings.push_back("residual increased at iteration " +
                             std::to_string(it) + " (" +
                             std::to_string(sol.residual_history.back()) +
                             " -> " + std::to_string(residual) + ")");
    sol.residual_history.push_back(residual);
    sol.iterations = it - 1;
    if (residual < cfg.tolerance) return sol;

    std::vector<double> rhs(3 * n, 0.0);
    const double mp = std::pow(m, cfg.exponent);
    for (int i = 0; i < n; ++i) {
      rhs[i] = mp * r1[i];
      rhs[n + i] = mp * r2[i];
    }
    std::vector<double> xn = lu.solve(rhs);
    std::copy(xn.begin(), xn.begin() + n, sol.eta_h.coeffs().begin());
    std::copy(xn.begin() + n, xn.begin() + 2 * n, sol.w_h.coeffs().begin());
    std::copy(xn.begin() + 2 * n, xn.end(), sol.wtilde_h.coeffs().begin());
  }
  std::string hist;
  for (double r : sol.residual_history) hist += " " + std::to_string(r);
  throw SolverError("Petviashvili: no convergence in " +
                    std::to_string(cfg.max_iterations) +
                    " iterations; residual history:" + hist);
}

/// Secant iteration on the speed so the computed wave has a prescribed
/// amplitude (used by scenarios that quote amplitudes, not speeds).
inline TravelingWaveSolution find_wave_by_amplitude(PetviashviliConfig cfg,
                                                    const FeSpace& space,
                                                    double amplitude,
                                                    double rel_tol = 1e-4,
                                                    int max_outer = 12) {
  const double g = cfg.params.g, d0 = cfg.depth;
  double c0 = std::sqrt(g * (d0 + amplitude));  // long-wave speed guess
  cfg.speed = c0;
  TravelingWaveSolution s0 = petviashvili_solve(cfg, space);
  double f0 = s0.amplitude() - amplitude;
  if (std::abs(f0) <= rel_tol * amplitude) return s0;

  double c1 = std::sqrt(g * (d0 + 1.05 * amplitude));
  for (int it = 0; it < max_outer; ++it) {
    cfg.speed = c1;
    TravelingWaveSolution s1 = petviashvili_solve(cfg, space);
    double f1 = s1.amplitude() - amplitude;
    if (std::abs(f1) <= rel_tol * amplitude) return s1;
    double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
    c0 = c1;
    f0 = f1;
    c1 = c2;
  }
  throw SolverError("amplitude targeting did not converge to " +
                    std::to_string(amplitude));
}

/// Recover the initial velocity potential from an (irrotational) initial
/// velocity field by the singular Neumann problem
///   (grad phi0, grad chi) = (u0, grad chi)  for all chi,
/// solved with the constant null space projected out, then shifted so the
/// minimum dof value is zero.
inline FeFunction initial_potential(const FeSpace& space, const VectorField& u0,
                                    double rel_tolerance = 1e-12) {
  CsrMatrix stiff = assemble_stiffness(space);
  std::vector<double> rhs = assemble_vector_grad_load(space, u0);
  SpdSolver solver(stiff, SpdMethod::cg_jacobi, rel_tolerance, 0,
                   /*project_constants=*/true);
  std::vector<double> phi = solver.solve(rhs);
  double mn = *std::min_element(phi.begin(), phi.end());
  for (double& v : phi) v -= mn;
  return FeFunction(space, std::move(phi));
}

/// Inlet wave train for the submerged-bar scenario:
///   eta(x) = A cos(k (x - x0)) (1 - tanh x)(1 + tanh(x + x1)) / 4
/// with the unidirectional velocity closure
///   u = sqrt(g / D0) [eta - eta^2/(4 D0) - c D0^2 eta_xx] xhat
/// (the long-wave relation u = c0 eta / D0 plus its first nonlinear and
/// dispersive corrections).
struct BarWavetrain {
  double A = 0.01;
  double k = 1.67;
  double x0 = 3.6;
  double x1 = 60.0;
  double D0 = 0.4;
  double g = 9.81;
  double c = 1.0 / 3.0;

  void eval(double x, double& v, double& vx, double& vxx) const {
    const double A = this->A, k = this->k, x0 = this->x0, x1 = this->x1;
    // generated by scripts/derive_bar_wavetrain.py -- do not edit by hand
    const double x2 = (1.0 / 4.0) * A;
    const double x3 = std::tanh(x + x1);
    const double x4 = x3 + 1;
    const double x5 = k * (x - x0);
    const double x6 = std::cos(x5);
    const double x7 = std::tanh(x);
    const double x8 = x7 - 1;
    const double x9 = x6 * x8;
    const double x10 = x4 * x9;
    const double x11 = std::sin(x5);
    const double x12 = k * x11 * x4;
    const double x13 = std::pow(x3, 2) - 1;
    const double x14 = x13 * x9;
    const double x15 = std::pow(x7, 2) - 1;
    const double x16 = x15 * x6;
    const double x17 = x16 * x4;
    const double x18 = 2 * x13;
    v = -x10 * x2;
    vx = x2 * (x12 * x8 + x14 + x17);
    vxx = -x2 * (-std::pow(k, 2) * x10 + k * x11 * x18 * x8 + 2 * x12 * x15 +
                 2 * x14 * x3 + x16 * x18 + 2 * x17 * x7);
  }

  double eta(double x) const {
    double v, vx, vxx;
    eval(x, v, vx, vxx);
    return v;
  }

  double u(double x) const {
    double v, vx, vxx;
    eval(x, v, vx, vxx);
    return std::sqrt(g / D0) * (v - v * v / (4.0 * D0) - c * D0 * D0 * vxx);
  }

  ScalarField eta_field() const {
    BarWavetrain w = *this;
    return ScalarField{[w](Vec2 p) { return w.eta(p.x); },
                       [w](Vec2 p) {
                         double v, vx, vxx;
                         w.eval(p.x, v, vx, vxx);
                         return Vec2{vx, 0.0};
                       }};
  }

  VectorField velocity_field() const {
    BarWavetrain w = *this;
    return VectorField{[w](Vec2 p) { return Vec2{w.u(p.x), 0.0}; }};
  }
};

/// Transplant a traveling wave computed on its generation channel onto a
/// target mesh: centerline profile evaluated at the signed distance from the
/// requested crest along `direction`, with u = w * alpha (wtilde = 0).
struct TransplantedWave {
  LineProfile profile;
  double crest_source = 0.0;
  double crest_target = 0.0;
  Vec2 direction{1.0, 0.0};

  double xi_source(Vec2 p) const {
    return crest_source + (direction.dot(p) - crest_target);
  }

  ScalarField eta_field() const {
    TransplantedWave w = *this;
    return ScalarField{[w](Vec2 p) { return w.profile.eval_eta(w.xi_source(p)); },
                       {}};
  }

  VectorField velocity_field() const {
    TransplantedWave w = *this;
    return VectorField{[w](Vec2 p) {
      return w.direction * w.profile.eval_w(w.xi_source(p));
    }};
  }
};

inline TransplantedWave transplant_wave(const TravelingWaveSolution& sol,
                                        Vec2 direction, double crest_target) {
  double norm = direction.norm();
  if (!(norm > 0.0)) throw ModelError("transplant: zero direction");
  TransplantedWave tw;
  tw.profile = sol.centerline_profile();
  tw.crest_source = sol.crest_xi();
  tw.crest_target = crest_target;
  tw.direction = direction * (1.0 / norm);
  return tw;
}

}  // namespace bswave
