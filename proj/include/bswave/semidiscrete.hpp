#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bswave/assembly.hpp"
#include "bswave/model.hpp"

namespace bswave {

/// Coefficient vectors of the surface elevation and the velocity potential
/// at a time t. The velocity is always derived as grad(phi), never stored.
struct State {
  std::vector<double> eta;
  std::vector<double> phi;
  double t = 0.0;
};

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
  double vorticity = 0.0;
};

/// Optional forcing pair (manufactured solutions only): time-dependent
/// strong residuals loaded against the test functions.
struct Forcing {
  std::function<ScalarField(double)> eta_term;
  std::function<ScalarField(double)> phi_term;
};

/// Time-independent operators of the spatial scheme:
///   M        mass matrix
///   S        stiffness weighted by D^2
///   A_op     M + b S, prefactored and reused by every stage solve.
class DiscreteOperators {
 public:
  DiscreteOperators(const FeSpace& space, ScalarField bathymetry,
                    ModelParams params,
                    SpdMethod method = SpdMethod::cholesky)
      : space_(&space), depth_(std::move(bathymetry)), params_(params) {
    check_depth_positive();

    mass_ = assemble_mass(space);
    ScalarField d2{[this](Vec2 p) {
      double d = depth_.value(p);
      return d * d;
    }, {}};
    stiffness_ = assemble_stiffness(space, &d2);
    a_op_ = mass_.add_scaled(stiffness_, params_.b);

    a_solver_ = std::make_unique<SpdSolver>(a_op_, method);
    mass_solver_ = std::make_unique<SpdSolver>(mass_, method);

    load_of_one_ = mass_.multiply(std::vector<double>(space.n_dofs(), 1.0));
  }

  const FeSpace& space() const { return *space_; }
  const ScalarField& depth() const { return depth_; }
  const ModelParams& params() const { return params_; }
  const CsrMatrix& mass() const { return mass_; }
  const CsrMatrix& stiffness() const { return stiffness_; }
  const CsrMatrix& a_op() const { return a_op_; }
  const SpdSolver& a_solver() const { return *a_solver_; }
  const SpdSolver& mass_solver() const { return *mass_solver_; }
  /// Integral of each basis function; pairing with coefficients gives the
  /// integral of the function.
  const std::vector<double>& load_of_one() const { return load_of_one_; }

  /// Spatial scheme right-hand side: given (eta, phi), solve
  ///   A_op etadot = L_w                        + load(F_eta)
  ///   A_op phidot = -c g S eta - g M eta - L_f/2 + load(F_phi)
  /// where L_w is the nonlinear flux load and L_f the squared-gradient load.
  void rhs(const State& state, std::vector<double>& eta_dot,
           std::vector<double>& phi_dot,
           const Forcing* forcing = nullptr) const {
    const FeSpace& sp = *space_;
    FeFunction eta(sp, state.eta), phi(sp, state.phi);

    std::vector<double> r_eta = assemble_nonlinear_flux(sp, depth_, eta, phi);
    if (forcing && forcing->eta_term) {
      auto f = assemble_load(sp, forcing->eta_term(state.t));
      for (size_t i = 0; i < r_eta.size(); ++i) r_eta[i] += f[i];
    }
    eta_dot = a_solver_->solve(r_eta);

    std::vector<double> r_phi = assemble_gradsq_load(sp, phi);
    std::vector<double> s_eta = stiffness_.multiply(state.eta);
    std::vector<double> m_eta = mass_.multiply(state.eta);
    const double cg = params_.c * params_.g;
    for (size_t i = 0; i < r_phi.size(); ++i)
      r_phi[i] = -cg * s_eta[i] - params_.g * m_eta[i] - 0.5 * r_phi[i];
    if (forcing && forcing->phi_term) {
      auto f = assemble_load(sp, forcing->phi_term(state.t));
      for (size_t i = 0; i < r_phi.size(); ++i) r_phi[i] += f[i];
    }
    phi_dot = a_solver_->solve(r_phi);
  }

  double mass_functional(const State& state) const {
    double m = 0.0;
    for (size_t i = 0; i < load_of_one_.size(); ++i)
      m += load_of_one_[i] * state.eta[i];
    return m;
  }

  /// Energy 1/2 int [g eta^2 + (D+eta)|grad phi|^2 + c g D^2 |grad eta|^2],
  /// integrated with the energy quadrature rule (3r+2).
  double energy_functional(const State& state) const {
    const FeSpace& sp = *space_;
    const TriangleRule& rule = triangle_rule(sp.energy_quad_degree());
    const BasisTable tab(sp.degree(), rule);
    const int nd = sp.dofs_per_cell();
    const double g = params_.g, cg = params_.c * params_.g;

    double e = 0.0;
    for (int t = 0; t < sp.mesh().n_triangles(); ++t) {
      ElementMap em(sp.mesh(), t);
      const int* cd = sp.cell_dofs(t);
      for (int q = 0; q < rule.size(); ++q) {
        const double* n = &tab.values[q * nd];
        double eta_q = 0.0;
        Vec2 geta_hat{}, gphi_hat{};
        for (int i = 0; i < nd; ++i) {
          eta_q += state.eta[cd[i]] * n[i];
          geta_hat += tab.ref_grads[q * nd + i] * state.eta[cd[i]];
          gphi_hat += tab.ref_grads[q * nd + i] * state.phi[cd[i]];
        }
        Vec2 geta = em.push_gradient(geta_hat);
        Vec2 gphi = em.push_gradient(gphi_hat);
        double d = depth_.value(em.to_physical(rule.points[q]));
        e += rule.weights[q] * em.area() *
             (g * eta_q * eta_q + (d + eta_q) * gphi.dot(gphi) +
              cg * d * d * geta.dot(geta));
      }
    }
    return 0.5 * e;
  }

  /// Total circulation of grad(phi): sum over elements of the boundary line
  /// integral of the velocity. Identically zero for a potential flow; the
  /// numerical value measures only round-off.
  double vorticity_functional(const State& state) const {
    const FeSpace& sp = *space_;
    FeFunction phi(sp, state.phi);
    const SegmentRule& rule = segment_rule(sp.degree());
    double v = 0.0;
    for (int t = 0; t < sp.mesh().n_triangles(); ++t) {
      const auto& tri = sp.mesh().triangles[t];
      for (int k = 0; k < 3; ++k) {
        Vec2 p0 = sp.mesh().vertices[tri[k]];
        Vec2 p1 = sp.mesh().vertices[tri[(k + 1) % 3]];
        Vec2 tangent = p1 - p0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          double s = rule.points[q];
          // barycentric coordinates along edge k -> k+1
          std::array<double, 3> l{0.0, 0.0, 0.0};
          l[k] = 1.0 - s;
          l[(k + 1) % 3] = s;
          v += rule.weights[q] * phi.gradient_in_cell(t, l).dot(tangent);
        }
      }
    }
    return v;
  }

  ConservedQuantities conserved(const State& state) const {
    return {mass_functional(state), energy_functional(state),
            vorticity_functional(state)};
  }

 private:
  void check_depth_positive() const {
    // Depth must be positive wherever it is ever sampled; check both the
    // assembly and the energy rule points.
    for (int deg : {space_->assembly_quad_degree(), space_->energy_quad_degree()}) {
      const TriangleRule& rule = triangle_rule(deg);
      for (int t = 0; t < space_->mesh().n_triangles(); ++t) {
        ElementMap em(space_->mesh(), t);
        for (int q = 0; q < rule.size(); ++q) {
          Vec2 p = em.to_physical(rule.points[q]);
          double d = depth_.value(p);
          if (!(d > 0.0))
            throw ModelError("bathymetry not strictly positive at (" +
                             std::to_string(p.x) + "," + std::to_string(p.y) +
                             "): D = " + std::to_string(d));
        }
      }
    }
  }

  const FeSpace* space_;
  ScalarField depth_;
  ModelParams params_;
  CsrMatrix mass_;
  CsrMatrix stiffness_;
  CsrMatrix a_op_;
  std::unique_ptr<SpdSolver> a_solver_;
  std::unique_ptr<SpdSolver> mass_solver_;
  std::vector<double> load_of_one_;
};

inline DiscreteOperators build_operators(const FeSpace& space,
                                         ScalarField bathymetry,
                                         ModelParams params,
                                         SpdMethod method = SpdMethod::cholesky) {
  return DiscreteOperators(space, std::move(bathymetry), params, method);
}

/// Project initial data onto the space (both fields by L2 projection).
inline State initial_state(const DiscreteOperators& ops,
                           const ScalarField& eta0, const ScalarField& phi0) {
  State s;
  s.eta = l2_project(ops.space(), eta0, ops.mass_solver()).coeffs();
  s.phi = l2_project(ops.space(), phi0, ops.mass_solver()).coeffs();
  s.t = 0.0;
  return s;
}

/// The eliminated auxiliary fields of the first-order form, reconstructed
/// for debugging and cross-validation:
///   v = -M^{-1} S eta,   w = M^{-1} L_w,   z = -M^{-1} S phi,
///   f = M^{-1} L_f.
struct MixedFields {
  std::vector<double> v, w, z, f;
};

inline MixedFields reconstruct_mixed_fields(const DiscreteOperators& ops,
                                            const State& state) {
  const FeSpace& sp = ops.space();
  FeFunction eta(sp, state.eta), phi(sp, state.phi);
  MixedFields out;
  auto s_eta = ops.stiffness().multiply(state.eta);
  for (double& x : s_eta) x = -x;
  out.v = ops.mass_solver().solve(s_eta);
  out.w = ops.mass_solver().solve(
      assemble_nonlinear_flux(sp, ops.depth(), eta, phi));
  auto s_phi = ops.stiffness().multiply(state.phi);
  for (double& x : s_phi) x = -x;
  out.z = ops.mass_solver().solve(s_phi);
  out.f = ops.mass_solver().solve(assemble_gradsq_load(sp, phi));
  return out;
}

}  // namespace bswave
