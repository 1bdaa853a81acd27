#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bswave/errors.hpp"
#include "bswave/geometry.hpp"

namespace bswave {

enum class DiagonalRule { right, left, union_jack, crossed };
enum class MeshFormat { simple_tri, msh2_ascii };

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

/// Conforming triangulation of a polygonal domain.
///
/// Triangles are counterclockwise. `boundary_edges` are directed with the
/// domain on their left, so summing cross products over them gives the
/// polygon area (holes traced clockwise subtract). `edges` is the sorted
/// unique edge list used for P2 dof numbering.
class Mesh {
 public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> boundary_edges;  // directed (a,b)
  double h_max = 0.0;
  double h_min = 0.0;

  // Derived connectivity, filled by finalize().
  std::vector<std::array<int, 2>> edges;  // unique, each sorted (lo,hi)
  std::vector<int> edge_count;            // incident triangles per edge

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int t) const {
    const auto& tri = triangles[t];
    Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * (b - a).cross(c - a);
  }

  double area(int t) const { return signed_area(t); }

  double total_area() const {
    double s = 0.0;
    for (int t = 0; t < n_triangles(); ++t) s += signed_area(t);
    return s;
  }

  /// Area enclosed by the directed boundary loops (shoelace formula).
  double boundary_loop_area() const {
    double s = 0.0;
    for (const auto& e : boundary_edges)
      s += 0.5 * vertices[e[0]].cross(vertices[e[1]]);
    return s;
  }

  int edge_index(int a, int b) const {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key)
      throw ValidationError("edge lookup failed: no edge (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
    return static_cast<int>(it - edges.begin());
  }

  /// Flip negatively oriented triangles, build edge connectivity, derive the
  /// boundary, and check conformity. Throws ValidationError on a broken mesh.
  void finalize() {
    if (vertices.empty() || triangles.empty())
      throw ValidationError("mesh has no vertices or no triangles");
    std::vector<char> used(vertices.size(), 0);
    for (auto& tri : triangles) {
      for (int v : tri) {
        if (v < 0 || v >= n_vertices())
          throw ValidationError("triangle references missing vertex " +
                                std::to_string(v));
        used[v] = 1;
      }
      Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
      double sa = 0.5 * (b - a).cross(c - a);
      if (sa < 0.0) std::swap(tri[1], tri[2]);
      if (std::abs(sa) == 0.0)
        throw ValidationError("degenerate triangle with zero area");
    }
    for (size_t v = 0; v < used.size(); ++v)
      if (!used[v])
        throw ValidationError("vertex " + std::to_string(v) +
                              " is not referenced by any triangle");

    // Unique edge list with incidence counts and the one directed copy each
    // boundary edge gets from its CCW triangle.
    std::map<std::array<int, 2>, std::pair<int, std::array<int, 2>>> emap;
    for (const auto& tri : triangles) {
      for (int k = 0; k < 3; ++k) {
        int a = tri[k], b = tri[(k + 1) % 3];
        std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        auto [it, fresh] = emap.try_emplace(key, 0, std::array<int, 2>{a, b});
        it->second.first++;
        if (!fresh) it->second.second = {a, b};
      }
    }
    edges.clear();
    edge_count.clear();
    boundary_edges.clear();
    std::vector<std::array<int, 2>> offending;
    for (const auto& [key, val] : emap) {
      edges.push_back(key);
      edge_count.push_back(val.first);
      if (val.first == 1)
        boundary_edges.push_back(val.second);
      else if (val.first > 2)
        offending.push_back(key);
    }
    if (!offending.empty()) {
      std::ostringstream os;
      os << "non-conforming mesh: edges shared by >2 triangles:";
      for (auto& e : offending) os << " (" << e[0] << "," << e[1] << ")";
      throw ValidationError(os.str());
    }

    // Boundary must be a union of closed loops: every boundary vertex has
    // exactly one outgoing and one incoming directed boundary edge.
    std::map<int, int> out_deg, in_deg;
    for (const auto& e : boundary_edges) {
      out_deg[e[0]]++;
      in_deg[e[1]]++;
    }
    for (const auto& [v, d] : out_deg)
      if (d != 1 || in_deg[v] != 1)
        throw ValidationError("boundary is not a union of closed loops near vertex " +
                              std::to_string(v));

    h_max = 0.0;
    h_min = std::numeric_limits<double>::max();
    for (const auto& tri : triangles) {
      for (int k = 0; k < 3; ++k) {
        double len = (vertices[tri[k]] - vertices[tri[(k + 1) % 3]]).norm();
        h_max = std::max(h_max, len);
        h_min = std::min(h_min, len);
      }
    }
  }

  /// Find the triangle containing p. Ties on shared edges/vertices resolve to
  /// the lowest triangle index (scan order). Returns nullopt when p lies
  /// outside the triangulation.
  std::optional<PointLocation> locate_point(Vec2 p, double tol = 1e-10) const {
    const double scale = h_max > 0 ? h_max : 1.0;
    const double atol = tol * scale;
    for (int t = 0; t < n_triangles(); ++t) {
      const auto& tri = triangles[t];
      Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
      BBox box{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}),
               std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y})};
      if (!box.contains(p, atol)) continue;
      double det = (b - a).cross(c - a);
      double l1 = (p - a).cross(c - a) / det;
      double l2 = (b - a).cross(p - a) / det;
      double l0 = 1.0 - l1 - l2;
      if (l0 >= -tol && l1 >= -tol && l2 >= -tol)
        return PointLocation{t, {l0, l1, l2}};
    }
    return std::nullopt;
  }

  Vec2 barycentric_to_point(int t, const std::array<double, 3>& l) const {
    const auto& tri = triangles[t];
    return vertices[tri[0]] * l[0] + vertices[tri[1]] * l[1] +
           vertices[tri[2]] * l[2];
  }
};

/// Structured triangulation of [x.lo,x.hi] x [y.lo,y.hi] with nx*ny cells.
/// right/left/union_jack split each cell into two triangles along the chosen
/// diagonal; crossed adds the cell center and splits into four (this is the
/// family whose longest edge equals the cell side, matching the reference
/// convergence tables).
inline Mesh generate_rectangle(Interval x, Interval y, int nx, int ny,
                               DiagonalRule rule = DiagonalRule::right) {
  if (nx < 1 || ny < 1)
    throw ValidationError("generate_rectangle: nx and ny must be >= 1");
  if (!(x.length() > 0.0) || !(y.length() > 0.0))
    throw ValidationError("generate_rectangle: degenerate interval");

  Mesh m;
  const int npx = nx + 1, npy = ny + 1;
  m.vertices.reserve(static_cast<size_t>(npx) * npy);
  for (int j = 0; j < npy; ++j)
    for (int i = 0; i < npx; ++i)
      m.vertices.emplace_back(x.lo + x.length() * i / nx,
                              y.lo + y.length() * j / ny);

  auto vid = [npx](int i, int j) { return j * npx + i; };
  m.triangles.reserve((rule == DiagonalRule::crossed ? 4u : 2u) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if (rule == DiagonalRule::crossed) {
        int c = m.n_vertices();
        m.vertices.emplace_back(x.lo + x.length() * (i + 0.5) / nx,
                                y.lo + y.length() * (j + 0.5) / ny);
        m.triangles.push_back({v00, v10, c});
        m.triangles.push_back({v10, v11, c});
        m.triangles.push_back({v11, v01, c});
        m.triangles.push_back({v01, v00, c});
        continue;
      }
      bool use_right = rule == DiagonalRule::right ||
                       (rule == DiagonalRule::union_jack && (i + j) % 2 == 0);
      if (use_right) {
        // diagonal v00-v11
        m.triangles.push_back({v00, v10, v11});
        m.triangles.push_back({v00, v11, v01});
      } else {
        // diagonal v10-v01
        m.triangles.push_back({v00, v10, v01});
        m.triangles.push_back({v10, v11, v01});
      }
    }
  }
  m.finalize();
  return m;
}

namespace detail {

inline std::string strip_comment(std::string line) {
  auto pos = line.find('#');
  if (pos != std::string::npos) line.erase(pos);
  return line;
}

/// Pull the next whitespace-separated token, skipping blank and comment lines.
class TokenReader {
 public:
  TokenReader(std::istream& in, const std::string& name)
      : in_(in), name_(name) {}

  std::string next() {
    std::string tok;
    while (!(line_stream_ >> tok)) {
      std::string line;
      if (!std::getline(in_, line))
        throw ParseError(name_ + ": unexpected end of file at line " +
                         std::to_string(line_no_));
      ++line_no_;
      line_stream_ = std::istringstream(strip_comment(line));
    }
    return tok;
  }

  double next_double() { return parse<double>(next(), "number"); }
  int next_int() { return parse<int>(next(), "integer"); }
  int line() const { return line_no_; }

 private:
  template <class T>
  T parse(const std::string& tok, const char* what) {
    std::istringstream ss(tok);
    T v;
    if (!(ss >> v) || !ss.eof())
      throw ParseError(name_ + ":" + std::to_string(line_no_) + ": expected " +
                       what + ", got '" + tok + "'");
    return v;
  }

  std::istream& in_;
  std::string name_;
  std::istringstream line_stream_;
  int line_no_ = 0;
};

inline Mesh read_simple_tri(std::istream& in, const std::string& name) {
  TokenReader tr(in, name);
  int nv = tr.next_int(), nt = tr.next_int(), nb = tr.next_int();
  if (nv < 3 || nt < 1 || nb < 0)
    throw ParseError(name + ": bad header counts");
  Mesh m;
  m.vertices.resize(nv);
  for (auto& v : m.vertices) {
    v.x = tr.next_double();
    v.y = tr.next_double();
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles)
    for (auto& idx : t) idx = tr.next_int();
  std::vector<std::array<int, 2>> declared(nb);
  for (auto& e : declared)
    for (auto& idx : e) idx = tr.next_int();
  m.finalize();
  // Declared boundary edges are a cross-check, not a source of truth.
  for (const auto& e : declared) {
    std::array<int, 2> key{std::min(e[0], e[1]), std::max(e[0], e[1])};
    bool found = false;
    for (const auto& be : m.boundary_edges)
      if (std::array<int, 2>{std::min(be[0], be[1]), std::max(be[0], be[1])} ==
          key) {
        found = true;
        break;
      }
    if (!found)
      throw ValidationError(name + ": declared boundary edge (" +
                            std::to_string(e[0]) + "," + std::to_string(e[1]) +
                            ") is interior or missing");
  }
  return m;
}

inline Mesh read_msh2(std::istream& in, const std::string& name) {
  Mesh m;
  std::map<long, int> node_id;  // file ids may be non-contiguous
  std::string line;
  int line_no = 0;
  bool got_nodes = false, got_elements = false;
  auto fail = [&](const std::string& msg) {
    throw ParseError(name + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string tag = strip_comment(line);
    tag.erase(tag.find_last_not_of(" \t\r\n") + 1);
    if (tag == "$Nodes") {
      if (!std::getline(in, line)) fail("truncated $Nodes");
      ++line_no;
      long count = std::stol(line);
      for (long k = 0; k < count; ++k) {
        if (!std::getline(in, line)) fail("truncated $Nodes");
        ++line_no;
        std::istringstream ss(line);
        long id;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) fail("bad node line");
        node_id[id] = m.n_vertices();
        m.vertices.emplace_back(x, y);
      }
      got_nodes = true;
    } else if (tag == "$Elements") {
      if (!got_nodes) fail("$Elements before $Nodes");
      if (!std::getline(in, line)) fail("truncated $Elements");
      ++line_no;
      long count = std::stol(line);
      for (long k = 0; k < count; ++k) {
        if (!std::getline(in, line)) fail("truncated $Elements");
        ++line_no;
        std::istringstream ss(line);
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) fail("bad element line");
        long tagv;
        for (int i = 0; i < ntags; ++i) ss >> tagv;
        if (type == 2) {
          long a, b, c;
          if (!(ss >> a >> b >> c)) fail("bad triangle element");
          auto look = [&](long nid) {
            auto it = node_id.find(nid);
            if (it == node_id.end()) fail("triangle references missing node");
            return it->second;
          };
          m.triangles.push_back({look(a), look(b), look(c)});
        }
        // 2-node lines and every other element type carry no information we
        // keep: the boundary is rederived from triangle adjacency.
      }
      got_elements = true;
    }
    // all other sections skipped
  }
  if (!got_nodes || !got_elements)
    throw ParseError(name + ": missing $Nodes or $Elements section");
  m.finalize();
  return m;
}

}  // namespace detail

inline Mesh read_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  switch (format) {
    case MeshFormat::simple_tri:
      return detail::read_simple_tri(in, path);
    case MeshFormat::msh2_ascii:
      return detail::read_msh2(in, path);
  }
  throw ParseError("unknown mesh format");
}

/// Infer the format from the extension: .msh -> msh2_ascii, else simple_tri.
inline Mesh read_mesh(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  return read_mesh(path, ext == ".msh" ? MeshFormat::msh2_ascii
                                       : MeshFormat::simple_tri);
}

inline void write_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << m.n_vertices() << ' ' << m.n_triangles() << ' '
      << m.boundary_edges.size() << '\n';
  for (const auto& v : m.vertices) out << v.x << ' ' << v.y << '\n';
  for (const auto& t : m.triangles)
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : m.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
}

}  // namespace bswave
