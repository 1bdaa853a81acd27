#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "bswave/csr.hpp"
#include "bswave/fe_space.hpp"
#include "bswave/quadrature.hpp"
#include "bswave/solvers.hpp"

namespace bswave {

/// Mass matrix with optional weight: entry (i,j) = integral of w psi_i psi_j.
/// Symmetric by construction (identical value written to both halves).
inline CsrMatrix assemble_mass(const FeSpace& space,
                               const ScalarField* weight = nullptr,
                               int quad_degree = -1) {
  const Mesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(
      quad_degree >= 0 ? quad_degree : space.assembly_quad_degree());
  const BasisTable tab(space.degree(), rule);
  const int nd = space.dofs_per_cell();

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(mesh.n_triangles()) * nd * nd);
  std::vector<double> local(nd * nd);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementMap em(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      double w = rule.weights[q] * em.area();
      if (weight) w *= weight->value(em.to_physical(rule.points[q]));
      const double* n = &tab.values[q * nd];
      for (int i = 0; i < nd; ++i)
        for (int j = i; j < nd; ++j) local[i * nd + j] += w * n[i] * n[j];
    }
    const int* cd = space.cell_dofs(t);
    for (int i = 0; i < nd; ++i)
      for (int j = i; j < nd; ++j) {
        trip.push_back({cd[i], cd[j], local[i * nd + j]});
        if (j != i) trip.push_back({cd[j], cd[i], local[i * nd + j]});
      }
  }
  return CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(),
                                  std::move(trip));
}

/// Which gradient components the stiffness form couples. `full` gives
/// (grad u, grad v); `xx_only` gives (u_x, v_x), used by the traveling-wave
/// operator.
enum class StiffnessKind { full, xx_only };

/// Weighted stiffness: entry (i,j) = integral of w grad psi_j . grad psi_i.
inline CsrMatrix assemble_stiffness(const FeSpace& space,
                                    const ScalarField* weight = nullptr,
                                    int quad_degree = -1,
                                    StiffnessKind kind = StiffnessKind::full) {
  const Mesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(
      quad_degree >= 0 ? quad_degree : space.assembly_quad_degree());
  const BasisTable tab(space.degree(), rule);
  const int nd = space.dofs_per_cell();

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(mesh.n_triangles()) * nd * nd);
  std::vector<double> local(nd * nd);
  std::vector<Vec2> g(nd);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementMap em(mesh, t);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      double w = rule.weights[q] * em.area();
      if (weight) w *= weight->value(em.to_physical(rule.points[q]));
      for (int i = 0; i < nd; ++i)
        g[i] = em.push_gradient(tab.ref_grads[q * nd + i]);
      for (int i = 0; i < nd; ++i)
        for (int j = i; j < nd; ++j)
          local[i * nd + j] += w * (kind == StiffnessKind::full
                                        ? g[i].dot(g[j])
                                        : g[i].x * g[j].x);
    }
    const int* cd = space.cell_dofs(t);
    for (int i = 0; i < nd; ++i)
      for (int j = i; j < nd; ++j) {
        trip.push_back({cd[i], cd[j], local[i * nd + j]});
        if (j != i) trip.push_back({cd[j], cd[i], local[i * nd + j]});
      }
  }
  return CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(),
                                  std::move(trip));
}

/// Load vector: entry i = integral of f psi_i.
inline std::vector<double> assemble_load(const FeSpace& space,
                                         const ScalarField& f,
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
      double w =
          rule.weights[q] * em.area() * f.value(em.to_physical(rule.points[q]));
      const double* n = &tab.values[q * nd];
      for (int i = 0; i < nd; ++i) out[cd[i]] += w * n[i];
    }
  }
  return out;
}

/// Load of a vector field against basis gradients:
/// entry i = integral of u . grad psi_i.
inline std::vector<double> assemble_vector_grad_load(const FeSpace& space,
                                                     const VectorField& u,
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
      double w = rule.weights[q] * em.area();
      Vec2 uv = u.value(em.to_physical(rule.points[q]));
      for (int i = 0; i < nd; ++i)
        out[cd[i]] += w * uv.dot(em.push_gradient(tab.ref_grads[q * nd + i]));
    }
  }
  return out;
}

/// Nonlinear flux load: entry i = integral of (D + eta) grad phi . grad psi_i.
inline std::vector<double> assemble_nonlinear_flux(const FeSpace& space,
                                                   const ScalarField& depth,
                                                   const FeFunction& eta,
                                                   const FeFunction& phi,
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
      double eta_q = 0.0;
      Vec2 gphi_hat{};
      for (int i = 0; i < nd; ++i) {
        eta_q += eta.coeffs()[cd[i]] * n[i];
        gphi_hat += tab.ref_grads[q * nd + i] * phi.coeffs()[cd[i]];
      }
      Vec2 gphi = em.push_gradient(gphi_hat);
      double w = rule.weights[q] * em.area() *
                 (depth.value(em.to_physical(rule.points[q])) + eta_q);
      for (int i = 0; i < nd; ++i)
        out[cd[i]] += w * gphi.dot(em.push_gradient(tab.ref_grads[q * nd + i]));
    }
  }
  return out;
}

/// Load of the squared gradient: entry i = integral of |grad phi|^2 psi_i.
inline std::vector<double> assemble_gradsq_load(const FeSpace& space,
                                                const FeFunction& phi,
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
      Vec2 gphi_hat{};
      for (int i = 0; i < nd; ++i)
        gphi_hat += tab.ref_grads[q * nd + i] * phi.coeffs()[cd[i]];
      Vec2 gphi = em.push_gradient(gphi_hat);
      double w = rule.weights[q] * em.area() * gphi.dot(gphi);
      const double* n = &tab.values[q * nd];
      for (int i = 0; i < nd; ++i) out[cd[i]] += w * n[i];
    }
  }
  return out;
}

/// L2 projection onto the space using a prebuilt mass solver.
inline FeFunction l2_project(const FeSpace& space, const ScalarField& f,
                             const SpdSolver& mass_solver,
                             int quad_degree = -1) {
  return FeFunction(space,
                    mass_solver.solve(assemble_load(space, f, quad_degree)));
}

/// Convenience overload: assembles and factors the mass matrix internally.
inline FeFunction l2_project(const FeSpace& space, const ScalarField& f,
                             int quad_degree = -1) {
  CsrMatrix m = assemble_mass(space);
  SpdSolver solver(m, SpdMethod::cholesky);
  return l2_project(space, f, solver, quad_degree);
}

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1() const { return std::sqrt(l2 * l2 + h1_semi * h1_semi); }
};

/// L2 and H1-seminorm errors against an exact solution with gradient,
/// integrated with degree 2r+4 (the exact solution is treated as smooth).
inline ErrorNorms error_norms(const FeFunction& u_h, const ScalarField& exact,
                              int quad_degree = -1) {
  const FeSpace& space = u_h.space();
  if (!exact.has_gradient())
    throw Error("error_norms: exact solution needs a gradient evaluator");
  const Mesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(
      quad_degree >= 0 ? quad_degree : 2 * space.degree() + 4);
  const BasisTable tab(space.degree(), rule);
  const int nd = space.dofs_per_cell();

  double l2 = 0.0, h1 = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementMap em(mesh, t);
    const int* cd = space.cell_dofs(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double* n = &tab.values[q * nd];
      double uh = 0.0;
      Vec2 guh_hat{};
      for (int i = 0; i < nd; ++i) {
        uh += u_h.coeffs()[cd[i]] * n[i];
        guh_hat += tab.ref_grads[q * nd + i] * u_h.coeffs()[cd[i]];
      }
      Vec2 p = em.to_physical(rule.points[q]);
      double w = rule.weights[q] * em.area();
      double dv = uh - exact.value(p);
      Vec2 dg = em.push_gradient(guh_hat) - exact.gradient(p);
      l2 += w * dv * dv;
      h1 += w * dg.dot(dg);
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

/// Integral of a ScalarField over the mesh.
inline double integrate_field(const Mesh& mesh, const ScalarField& f,
                              int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementMap em(mesh, t);
    for (int q = 0; q < rule.size(); ++q)
      s += rule.weights[q] * em.area() *
           f.value(em.to_physical(rule.points[q]));
  }
  return s;
}

}  // namespace bswave
