#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "bswave/errors.hpp"
#include "bswave/mesh.hpp"
#include "bswave/quadrature.hpp"

namespace bswave {

/// Scalar function of position given by a callable, with an optional exact
/// gradient. Bathymetry fields may carry their depth bounds as metadata.
struct ScalarField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;  // may be empty
  double min_bound = std::numeric_limits<double>::quiet_NaN();
  double max_bound = std::numeric_limits<double>::quiet_NaN();

  double operator()(Vec2 p) const { return value(p); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

inline ScalarField constant_field(double v) {
  return ScalarField{[v](Vec2) { return v; }, [](Vec2) { return Vec2{}; }, v,
                     v};
}

struct VectorField {
  std::function<Vec2(Vec2)> value;
  Vec2 operator()(Vec2 p) const { return value(p); }
};

namespace basis {

inline int dofs_per_cell(int degree) {
  return (degree + 1) * (degree + 2) / 2;
}

/// Lagrange basis values on the reference triangle at barycentric l.
/// Local numbering for every degree: vertices 0,1,2; then the degree-1
/// dofs of edges (1,2), (2,0), (0,1), each ordered from the first vertex
/// of the pair; then the interior dofs (P3: centroid; P4: the three nodes
/// with one barycentric coordinate 1/2).
inline void values(int degree, const std::array<double, 3>& l, double* out) {
  const double l0 = l[0], l1 = l[1], l2 = l[2];
  switch (degree) {
    case 1:
      out[0] = l0;
      out[1] = l1;
      out[2] = l2;
      return;
    case 2:
      out[0] = l0 * (2 * l0 - 1);
      out[1] = l1 * (2 * l1 - 1);
      out[2] = l2 * (2 * l2 - 1);
      out[3] = 4 * l1 * l2;
      out[4] = 4 * l2 * l0;
      out[5] = 4 * l0 * l1;
      return;
    case 3: {
      auto v = [](double a) { return 0.5 * a * (3 * a - 1) * (3 * a - 2); };
      auto e = [](double a, double b) { return 4.5 * a * b * (3 * a - 1); };
      out[0] = v(l0);
      out[1] = v(l1);
      out[2] = v(l2);
      out[3] = e(l1, l2);
      out[4] = e(l2, l1);
      out[5] = e(l2, l0);
      out[6] = e(l0, l2);
      out[7] = e(l0, l1);
      out[8] = e(l1, l0);
      out[9] = 27 * l0 * l1 * l2;
      return;
    }
    case 4: {
      auto v = [](double a) {
        return a * (4 * a - 1) * (4 * a - 2) * (4 * a - 3) / 6.0;
      };
      auto e0 = [](double a, double b) {
        return 8.0 / 3.0 * a * b * (4 * a - 1) * (4 * a - 2);
      };
      auto em = [](double a, double b) {
        return 4.0 * a * b * (4 * a - 1) * (4 * b - 1);
      };
      auto c = [&](double k, double a, double b) {
        return 32.0 * k * a * b * (4 * k - 1);
      };
      out[0] = v(l0);
      out[1] = v(l1);
      out[2] = v(l2);
      out[3] = e0(l1, l2);
      out[4] = em(l1, l2);
      out[5] = e0(l2, l1);
      out[6] = e0(l2, l0);
      out[7] = em(l2, l0);
      out[8] = e0(l0, l2);
      out[9] = e0(l0, l1);
      out[10] = em(l0, l1);
      out[11] = e0(l1, l0);
      out[12] = c(l0, l1, l2);
      out[13] = c(l1, l2, l0);
      out[14] = c(l2, l0, l1);
      return;
    }
    default:
      throw ModelError("unsupported basis degree " + std::to_string(degree));
  }
}

/// Reference gradients w.r.t. (xhat, yhat) where l = (1-x-y, x, y).
inline void gradients(int degree, const std::array<double, 3>& l, Vec2* out) {
  static constexpr Vec2 dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  const double l0 = l[0], l1 = l[1], l2 = l[2];
  switch (degree) {
    case 1:
      out[0] = dl[0];
      out[1] = dl[1];
      out[2] = dl[2];
      return;
    case 2:
      for (int i = 0; i < 3; ++i) out[i] = dl[i] * (4.0 * l[i] - 1.0);
      out[3] = dl[1] * (4 * l2) + dl[2] * (4 * l1);
      out[4] = dl[2] * (4 * l0) + dl[0] * (4 * l2);
      out[5] = dl[0] * (4 * l1) + dl[1] * (4 * l0);
      return;
    case 3: {
      auto dv = [](double a) { return 0.5 * (27 * a * a - 18 * a + 2); };
      // d/da and d/db of 4.5 a b (3a - 1)
      auto de_a = [](double a, double b) { return 4.5 * b * (6 * a - 1); };
      auto de_b = [](double a) { return 4.5 * a * (3 * a - 1); };
      for (int i = 0; i < 3; ++i) out[i] = dl[i] * dv(l[i]);
      out[3] = dl[1] * de_a(l1, l2) + dl[2] * de_b(l1);
      out[4] = dl[2] * de_a(l2, l1) + dl[1] * de_b(l2);
      out[5] = dl[2] * de_a(l2, l0) + dl[0] * de_b(l2);
      out[6] = dl[0] * de_a(l0, l2) + dl[2] * de_b(l0);
      out[7] = dl[0] * de_a(l0, l1) + dl[1] * de_b(l0);
      out[8] = dl[1] * de_a(l1, l0) + dl[0] * de_b(l1);
      out[9] = dl[0] * (27 * l1 * l2) + dl[1] * (27 * l0 * l2) +
               dl[2] * (27 * l0 * l1);
      return;
    }
    case 4: {
      auto dv = [](double a) {
        return (128 * a * a * a - 144 * a * a + 44 * a - 3) / 3.0;
      };
      auto de0_a = [](double a, double b) {
        return 8.0 / 3.0 * b * (48 * a * a - 24 * a + 2);
      };
      auto de0_b = [](double a) {
        return 8.0 / 3.0 * a * (4 * a - 1) * (4 * a - 2);
      };
      auto dem_a = [](double a, double b) {
        return 4.0 * b * (4 * b - 1) * (8 * a - 1);
      };
      for (int i = 0; i < 3; ++i) out[i] = dl[i] * dv(l[i]);
      out[3] = dl[1] * de0_a(l1, l2) + dl[2] * de0_b(l1);
      out[4] = dl[1] * dem_a(l1, l2) + dl[2] * dem_a(l2, l1);
      out[5] = dl[2] * de0_a(l2, l1) + dl[1] * de0_b(l2);
      out[6] = dl[2] * de0_a(l2, l0) + dl[0] * de0_b(l2);
      out[7] = dl[2] * dem_a(l2, l0) + dl[0] * dem_a(l0, l2);
      out[8] = dl[0] * de0_a(l0, l2) + dl[2] * de0_b(l0);
      out[9] = dl[0] * de0_a(l0, l1) + dl[1] * de0_b(l0);
      out[10] = dl[0] * dem_a(l0, l1) + dl[1] * dem_a(l1, l0);
      out[11] = dl[1] * de0_a(l1, l0) + dl[0] * de0_b(l1);
      // interior: 32 k a b (4k - 1) with (k, a, b) cycling
      auto dc_k = [](double k, double a, double b) {
        return 32.0 * a * b * (8 * k - 1);
      };
      auto dc_a = [](double k, double a, double b) {
        (void)a;
        return 32.0 * k * b * (4 * k - 1);
      };
      out[12] = dl[0] * dc_k(l0, l1, l2) + dl[1] * dc_a(l0, l1, l2) +
                dl[2] * dc_a(l0, l2, l1);
      out[13] = dl[1] * dc_k(l1, l2, l0) + dl[2] * dc_a(l1, l2, l0) +
                dl[0] * dc_a(l1, l0, l2);
      out[14] = dl[2] * dc_k(l2, l0, l1) + dl[0] * dc_a(l2, l0, l1) +
                dl[1] * dc_a(l2, l1, l0);
      return;
    }
    default:
      throw ModelError("unsupported basis degree " + std::to_string(degree));
  }
}

}  // namespace basis

/// Continuous Lagrange space of degree 1..4 on a triangulation.
/// Global dof order: vertex dofs in mesh order, then degree-1 dofs per edge
/// in sorted edge-list order (each edge's dofs running from its lower-index
/// vertex), then interior dofs per triangle. Deterministic by construction;
/// shared dofs get identical indices on both sides of an edge.
class FeSpace {
 public:
  FeSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
    if (degree < 1 || degree > 4)
      throw ModelError("FeSpace: supported degrees are 1..4 (got " +
                       std::to_string(degree) + ")");
    const int v = mesh.n_vertices();
    const int per_edge = degree - 1;
    const int per_cell = (degree - 1) * (degree - 2) / 2;
    const int edge_base = v;
    const int cell_base = v + per_edge * mesh.n_edges();
    n_dofs_ = cell_base + per_cell * mesh.n_triangles();
    dofs_per_cell_ = basis::dofs_per_cell(degree);

    cell_dofs_.resize(static_cast<size_t>(mesh.n_triangles()) *
                      dofs_per_cell_);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      int* cd = &cell_dofs_[static_cast<size_t>(t) * dofs_per_cell_];
      cd[0] = tri[0];
      cd[1] = tri[1];
      cd[2] = tri[2];
      if (per_edge > 0) {
        const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
        for (int k = 0; k < 3; ++k) {
          int a = tri[pairs[k][0]], b = tri[pairs[k][1]];
          int e = mesh.edge_index(a, b);
          // local slots run from local vertex pairs[k][0]; global slots run
          // from the lower-index vertex, so flip when the edge is reversed
          for (int m = 0; m < per_edge; ++m) {
            int g = a < b ? m : per_edge - 1 - m;
            cd[3 + k * per_edge + m] = edge_base + e * per_edge + g;
          }
        }
      }
      for (int m = 0; m < per_cell; ++m)
        cd[3 + 3 * per_edge + m] = cell_base + t * per_cell + m;
    }

    dof_coords_.resize(n_dofs_);
    for (int i = 0; i < v; ++i) dof_coords_[i] = mesh.vertices[i];
    for (int e = 0; e < mesh.n_edges(); ++e) {
      Vec2 a = mesh.vertices[mesh.edges[e][0]];
      Vec2 b = mesh.vertices[mesh.edges[e][1]];
      for (int m = 0; m < per_edge; ++m)
        dof_coords_[edge_base + e * per_edge + m] =
            a + (b - a) * (static_cast<double>(m + 1) / degree);
    }
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      Vec2 p0 = mesh.vertices[mesh.triangles[t][0]];
      Vec2 p1 = mesh.vertices[mesh.triangles[t][1]];
      Vec2 p2 = mesh.vertices[mesh.triangles[t][2]];
      if (per_cell == 1) {
        dof_coords_[cell_base + t] = (p0 + p1 + p2) * (1.0 / 3.0);
      } else if (per_cell == 3) {
        dof_coords_[cell_base + 3 * t + 0] = p0 * 0.5 + (p1 + p2) * 0.25;
        dof_coords_[cell_base + 3 * t + 1] = p1 * 0.5 + (p2 + p0) * 0.25;
        dof_coords_[cell_base + 3 * t + 2] = p2 * 0.5 + (p0 + p1) * 0.25;
      }
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  const std::vector<Vec2>& dof_coords() const { return dof_coords_; }

  const int* cell_dofs(int t) const {
    return &cell_dofs_[static_cast<size_t>(t) * dofs_per_cell_];
  }

  /// Default assembly quadrature degree (2r+3): covers the weighted terms
  /// with pointwise-sampled bathymetry.
  int assembly_quad_degree() const { return 2 * degree_ + 3; }
  /// Energy functionals use 3r+2 so conservation checks are not polluted by
  /// quadrature error.
  int energy_quad_degree() const { return 3 * degree_ + 2; }

 private:
  const Mesh* mesh_;
  int degree_;
  int n_dofs_ = 0;
  int dofs_per_cell_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<Vec2> dof_coords_;
};

/// Affine element geometry: x = v0 + J * xhat, physical gradient
/// g = J^{-T} ghat.
struct ElementMap {
  Vec2 v0;
  double a, b, c, d;  // J = [[a,b],[c,d]]
  double det;

  explicit ElementMap(const Mesh& m, int t) {
    const auto& tri = m.triangles[t];
    v0 = m.vertices[tri[0]];
    Vec2 e1 = m.vertices[tri[1]] - v0;
    Vec2 e2 = m.vertices[tri[2]] - v0;
    a = e1.x;
    b = e2.x;
    c = e1.y;
    d = e2.y;
    det = a * d - b * c;
  }

  double area() const { return 0.5 * det; }

  Vec2 to_physical(const std::array<double, 3>& l) const {
    return {v0.x + a * l[1] + b * l[2], v0.y + c * l[1] + d * l[2]};
  }

  Vec2 push_gradient(Vec2 ghat) const {
    return {(d * ghat.x - c * ghat.y) / det, (-b * ghat.x + a * ghat.y) / det};
  }
};

/// Basis values and reference gradients tabulated at the points of a rule.
struct BasisTable {
  int ndof = 0;
  std::vector<double> values;   // [q * ndof + i]
  std::vector<Vec2> ref_grads;  // [q * ndof + i]

  BasisTable(int degree, const TriangleRule& rule) {
    ndof = basis::dofs_per_cell(degree);
    const int nq = rule.size();
    values.resize(static_cast<size_t>(nq) * ndof);
    ref_grads.resize(static_cast<size_t>(nq) * ndof);
    for (int q = 0; q < nq; ++q) {
      basis::values(degree, rule.points[q], &values[q * ndof]);
      basis::gradients(degree, rule.points[q], &ref_grads[q * ndof]);
    }
  }
};

/// A function in an FeSpace: a coefficient vector, one value per dof.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(const FeSpace& space)
      : space_(&space), coeffs_(space.n_dofs(), 0.0) {}
  FeFunction(const FeSpace& space, std::vector<double> coeffs)
      : space_(&space), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != space.n_dofs())
      throw Error("FeFunction: coefficient size does not match space");
  }

  const FeSpace& space() const { return *space_; }
  std::vector<double>& coeffs() { return coeffs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double value_in_cell(int t, const std::array<double, 3>& l) const {
    double n[15];
    basis::values(space_->degree(), l, n);
    const int* cd = space_->cell_dofs(t);
    double s = 0.0;
    for (int i = 0; i < space_->dofs_per_cell(); ++i) s += coeffs_[cd[i]] * n[i];
    return s;
  }

  Vec2 gradient_in_cell(int t, const std::array<double, 3>& l) const {
    Vec2 g[15];
    basis::gradients(space_->degree(), l, g);
    ElementMap em(space_->mesh(), t);
    const int* cd = space_->cell_dofs(t);
    Vec2 ghat{};
    for (int i = 0; i < space_->dofs_per_cell(); ++i)
      ghat += g[i] * coeffs_[cd[i]];
    return em.push_gradient(ghat);
  }

  std::optional<double> try_value_at(Vec2 p) const {
    auto loc = space_->mesh().locate_point(p);
    if (!loc) return std::nullopt;
    return value_in_cell(loc->triangle, loc->bary);
  }

  double value_at(Vec2 p) const {
    auto v = try_value_at(p);
    if (!v)
      throw Error("FeFunction::value_at: point outside mesh (" +
                  std::to_string(p.x) + "," + std::to_string(p.y) + ")");
    return *v;
  }

  /// Wrap as a ScalarField (values by point location; no gradient).
  ScalarField as_field() const {
    const FeFunction* self = this;
    return ScalarField{[self](Vec2 p) { return self->value_at(p); }, {}};
  }

 private:
  const FeSpace* space_ = nullptr;
  std::vector<double> coeffs_;
};

}  // namespace bswave
