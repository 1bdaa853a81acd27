#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bswave/fe_space.hpp"
#include "bswave/timestepping.hpp"

namespace bswave {

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  return out;
}

inline std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

/// `t, mass, energy, vorticity, gamma` with 17 significant digits.
inline void write_conservation_csv(const std::filesystem::path& path,
                                   const std::vector<ConservationRow>& rows) {
  auto out = detail::open_out(path);
  out << "t, mass, energy, vorticity, gamma\n";
  for (const auto& r : rows)
    out << detail::fmt17(r.t) << ", " << detail::fmt17(r.mass) << ", "
        << detail::fmt17(r.energy) << ", " << detail::fmt17(r.vorticity)
        << ", " << detail::fmt17(r.gamma) << "\n";
}

inline void write_gauge_csv(const std::filesystem::path& path,
                            const GaugeSeries& gauge) {
  auto out = detail::open_out(path);
  out << "t, eta\n";
  for (const auto& [t, eta] : gauge.samples)
    out << detail::fmt17(t) << ", " << detail::fmt17(eta) << "\n";
}

inline void write_relaxation_csv(const std::filesystem::path& path,
                                 const std::vector<RelaxationRecord>& recs) {
  auto out = detail::open_out(path);
  out << "t, gamma, cubic_a, cubic_b, cubic_c, status\n";
  for (const auto& r : recs)
    out << detail::fmt17(r.t) << ", " << detail::fmt17(r.gamma) << ", "
        << detail::fmt17(r.a_coef) << ", " << detail::fmt17(r.b_coef) << ", "
        << detail::fmt17(r.c_coef) << ", " << r.status << "\n";
}

/// Solitary-wave profile along the channel centerline: `xi, eta, w`.
inline void write_profile_csv(const std::filesystem::path& path,
                              const std::vector<double>& xi,
                              const std::vector<double>& eta,
                              const std::vector<double>& w) {
  auto out = detail::open_out(path);
  out << "xi, eta, w\n";
  for (size_t i = 0; i < xi.size(); ++i)
    out << detail::fmt17(xi[i]) << ", " << detail::fmt17(eta[i]) << ", "
        << detail::fmt17(w[i]) << "\n";
}

/// Legacy ASCII VTK snapshot: eta and phi as point scalars, velocity as the
/// vertex-averaged grad(phi) over incident elements.
inline void write_vtk_snapshot(const std::filesystem::path& path,
                               const FeSpace& space, const State& state) {
  const Mesh& mesh = space.mesh();
  auto out = detail::open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "long wave field snapshot t=" << detail::fmt17(state.t) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  out << std::setprecision(12);
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << " 0\n";
  out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles()
      << "\n";
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";

  FeFunction phi(space, state.phi);
  std::vector<Vec2> vel(mesh.n_vertices());
  std::vector<int> count(mesh.n_vertices(), 0);
  const std::array<std::array<double, 3>, 3> corner = {
      {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      int v = mesh.triangles[t][k];
      vel[v] += phi.gradient_in_cell(t, corner[k]);
      count[v]++;
    }

  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) out << state.eta[v] << "\n";
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) out << state.phi[v] << "\n";
  out << "VECTORS velocity double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v)
    out << vel[v].x / count[v] << ' ' << vel[v].y / count[v] << " 0\n";
}

/// Debug dump of the eliminated first-order fields (v, w, z, f) together
/// with the state, one row per dof, for cross-validation against the
/// six-field form.
inline void write_mixed_fields_csv(const std::filesystem::path& path,
                                   const FeSpace& space, const State& state,
                                   const MixedFields& mf) {
  auto out = detail::open_out(path);
  out << "dof, x, y, eta, phi, v, w, z, f\n";
  for (int i = 0; i < space.n_dofs(); ++i) {
    Vec2 p = space.dof_coords()[i];
    out << i << ", " << detail::fmt17(p.x) << ", " << detail::fmt17(p.y)
        << ", " << detail::fmt17(state.eta[i]) << ", "
        << detail::fmt17(state.phi[i]) << ", " << detail::fmt17(mf.v[i])
        << ", " << detail::fmt17(mf.w[i]) << ", " << detail::fmt17(mf.z[i])
        << ", " << detail::fmt17(mf.f[i]) << "\n";
  }
}

/// FNV-1a over the mesh geometry; identifies the mesh in run manifests.
inline std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& v : mesh.vertices) {
    mix(&v.x, sizeof v.x);
    mix(&v.y, sizeof v.y);
  }
  for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
  return h;
}

/// Flat key-value manifest, one `key = value` per line, sections preserved
/// so a manifest can be re-read as a run config.
inline void write_manifest(
    const std::filesystem::path& path,
    const std::map<std::string, std::map<std::string, std::string>>& sections) {
  auto out = detail::open_out(path);
  for (const auto& [name, kv] : sections) {
    out << "[" << name << "]\n";
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    out << "\n";
  }
}

}  // namespace bswave
