#!/usr/bin/env python3
"""Generate the committed triangulations under data/meshes/.

Two geometries come from external-style meshing rather than the structured
generator:
  * cylinder_channel: [-4,20] x [0,0.55] minus a regular icosagon inscribed
    in the circle of radius 0.08 centered at (4.5, 0.275), vertex 0 at
    angle 0 (desk and reference resolutions, simple_tri format)
  * yjunction: the nine-corner polygon channel that splits into two arms
    (desk and reference resolutions, Gmsh MSH 2.2 ASCII format)

Points are laid out structured-plus-graded, triangulated with Delaunay and
filtered against the exact geometry; the result is validated (conformity,
boundary loops, required boundary vertices) before writing.

Usage: python3 scripts/make_meshes.py
"""

import math
import numpy as np
from scipy.spatial import Delaunay, cKDTree
from shapely.geometry import Point, Polygon
from shapely.prepared import prep


def dedupe(points, tol):
    """Merge points closer than tol (grid hashing)."""
    out = []
    seen = {}
    inv_tol = 1.0 / tol
    for p in points:
        key = (round(p[0] * inv_tol), round(p[1] * inv_tol))
        if key in seen:
            continue
        seen[key] = len(out)
        out.append(p)
    return np.array(out)


def laplacian_smooth(points, n_fixed, inside_fn, iterations=12):
    """Move the non-fixed points toward the mean of their Delaunay
    neighbors; reject moves that leave the domain."""
    pts = np.array(points, dtype=float)
    for _ in range(iterations):
        tri = Delaunay(pts)
        neighbors = [set() for _ in range(len(pts))]
        for simplex in tri.simplices:
            for a in simplex:
                for b in simplex:
                    if a != b:
                        neighbors[a].add(b)
        for i in range(n_fixed, len(pts)):
            if not neighbors[i]:
                continue
            target = np.mean(pts[list(neighbors[i])], axis=0)
            if inside_fn(target[0], target[1]):
                pts[i] = 0.7 * target + 0.3 * pts[i]
    return pts


def triangulate(points, inside_fn):
    tri = Delaunay(points)
    keep = []
    for simplex in tri.simplices:
        a, b, c = (points[i] for i in simplex)
        cx = (a[0] + b[0] + c[0]) / 3.0
        cy = (a[1] + b[1] + c[1]) / 3.0
        area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        if abs(area) < 1e-14:
            continue
        if inside_fn(cx, cy):
            keep.append(tuple(simplex))
    # drop unused points, renumber
    used = sorted({i for t in keep for i in t})
    remap = {old: new for new, old in enumerate(used)}
    verts = points[used]
    tris = [(remap[a], remap[b], remap[c]) for a, b, c in keep]
    return verts, tris


def validate(verts, tris, required_boundary_pts, name, tol=1e-9):
    edges = {}
    for t in tris:
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            key = (min(a, b), max(a, b))
            edges[key] = edges.get(key, 0) + 1
    bad = [e for e, c in edges.items() if c > 2]
    if bad:
        raise RuntimeError(f"{name}: non-conforming edges {bad[:5]}")
    boundary_verts = set()
    for (a, b), count in edges.items():
        if count == 1:
            boundary_verts.add(a)
            boundary_verts.add(b)
    for px, py in required_boundary_pts:
        ok = any(
            abs(verts[v][0] - px) < tol and abs(verts[v][1] - py) < tol
            for v in boundary_verts
        )
        if not ok:
            raise RuntimeError(f"{name}: required boundary point ({px},{py}) missing")
    # min angle diagnostic
    min_angle = 180.0
    for t in tris:
        p = [np.asarray(verts[i]) for i in t]
        for k in range(3):
            u = p[(k + 1) % 3] - p[k]
            v = p[(k + 2) % 3] - p[k]
            cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
            min_angle = min(min_angle, math.degrees(math.acos(max(-1, min(1, cosang)))))
    print(f"{name}: {len(verts)} vertices, {len(tris)} triangles, min angle {min_angle:.1f} deg")
    if min_angle < 8.0:
        raise RuntimeError(f"{name}: sliver triangles (min angle {min_angle:.1f})")


def write_simple_tri(path, verts, tris):
    edges = {}
    for t in tris:
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            key = (min(a, b), max(a, b))
            edges[key] = edges.get(key, 0) + 1
    boundary = [e for e, c in edges.items() if c == 1]
    with open(path, "w") as f:
        f.write(f"{len(verts)} {len(tris)} {len(boundary)}\n")
        for x, y in verts:
            f.write(f"{x:.17g} {y:.17g}\n")
        for a, b, c in tris:
            f.write(f"{a} {b} {c}\n")
        for a, b in boundary:
            f.write(f"{a} {b}\n")
    print(f"wrote {path}")


def write_msh2(path, verts, tris):
    edges = {}
    for t in tris:
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            key = (min(a, b), max(a, b))
            edges[key] = edges.get(key, 0) + 1
    boundary = [e for e, c in edges.items() if c == 1]
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$Nodes\n{len(verts)}\n")
        for i, (x, y) in enumerate(verts):
            f.write(f"{i + 1} {x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(boundary) + len(tris)}\n")
        eid = 1
        for a, b in boundary:
            f.write(f"{eid} 1 2 0 1 {a + 1} {b + 1}\n")
            eid += 1
        for a, b, c in tris:
            f.write(f"{eid} 2 2 0 2 {a + 1} {b + 1} {c + 1}\n")
            eid += 1
        f.write("$EndElements\n")
    print(f"wrote {path}")


def cylinder_channel(h):
    x0, x1, y0, y1 = -4.0, 20.0, 0.0, 0.55
    cx, cy, r = 4.5, 0.275, 0.08
    ngon = [
        (cx + r * math.cos(2 * math.pi * k / 20), cy + r * math.sin(2 * math.pi * k / 20))
        for k in range(20)
    ]
    hole = Polygon(ngon)
    hole_prep = prep(hole)
    edge_len = 2 * r * math.sin(math.pi / 20)

    # fixed points first: the icosagon and the channel walls
    fixed = list(ngon)
    nx = int(round((x1 - x0) / h))
    ny = max(3, int(round((y1 - y0) / h)))
    for i in range(nx + 1):
        fixed.append((x0 + (x1 - x0) * i / nx, y0))
        fixed.append((x0 + (x1 - x0) * i / nx, y1))
    for j in range(1, ny):
        fixed.append((x0, y0 + (y1 - y0) * j / ny))
        fixed.append((x1, y0 + (y1 - y0) * j / ny))
    fixed = [tuple(p) for p in dedupe(fixed, 0.25 * edge_len)]

    movable = []
    # graded rings around the obstacle out to a blending radius
    spacing = edge_len
    rr = r
    ring = 0
    while spacing < 0.95 * h:
        rr = rr + spacing
        spacing = min(spacing * 1.3, h)
        ring += 1
        n = max(20, int(round(2 * math.pi * rr / spacing)))
        offset = (ring % 2) * math.pi / n
        for k in range(n):
            a = 2 * math.pi * k / n + offset
            px, py = cx + rr * math.cos(a), cy + rr * math.sin(a)
            if y0 + 0.4 * spacing < py < y1 - 0.4 * spacing:
                movable.append((px, py))
    # background grid in the interior
    for j in range(1, ny):
        for i in range(1, nx):
            movable.append((x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny))

    # greedy thinning: keep a movable point only if nothing already kept sits
    # within its local spacing (rings win over the background grid)
    kept = list(fixed)
    tree = cKDTree(np.array(kept))
    keep = []
    for p in movable:
        d_ring = math.hypot(p[0] - cx, p[1] - cy) - r
        local = min(h, max(edge_len, 0.8 * d_ring))
        if tree.query_ball_point(p, 0.62 * local):
            continue
        keep.append(p)
        kept.append(p)
        tree = cKDTree(np.array(kept)) if len(kept) % 256 == 0 else tree
        # the tree refreshes lazily; double-check against recent points
        recent = kept[len(kept) - (len(kept) % 256) : -1]
        if any(math.hypot(q[0] - p[0], q[1] - p[1]) < 0.62 * local for q in recent):
            keep.pop()
            kept.pop()

    def inside(px, py):
        if not (x0 < px < x1 and y0 < py < y1):
            return False
        return not hole_prep.contains(Point(px, py))

    def inside_margin(px, py):
        if not (x0 + 0.2 * h < px < x1 - 0.2 * h and y0 + 0.15 * h < py < y1 - 0.15 * h):
            return False
        return math.hypot(px - cx, py - cy) > r + 0.4 * edge_len

    pts = np.array(fixed + keep)
    pts = laplacian_smooth(pts, len(fixed), inside_margin)
    verts, tris = triangulate(pts, inside)
    required = ngon + [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]
    validate(verts, tris, required, f"cylinder_channel h={h}")
    # every icosagon edge must survive as a mesh boundary edge
    vid = {}
    for i, (x, y) in enumerate(verts):
        vid[(round(x, 9), round(y, 9))] = i
    for k in range(20):
        a = vid[(round(ngon[k][0], 9), round(ngon[k][1], 9))]
        b = vid[(round(ngon[(k + 1) % 20][0], 9), round(ngon[(k + 1) % 20][1], 9))]
        found = any(
            {a, b} == {t[i], t[(i + 1) % 3]} for t in tris for i in range(3)
        )
        if not found:
            raise RuntimeError("icosagon edge missing from the triangulation")
    return verts, tris


def yjunction(h):
    corners = [
        (-20.0, -1.0), (0.0, -1.0), (20.0, -12.5), (22.0, -11.5), (2.0, 0.0),
        (22.0, 11.5), (20.0, 12.5), (0.0, 1.0), (-20.0, 1.0),
    ]
    poly = Polygon(corners)
    poly_prep = prep(poly)
    boundary = poly.exterior

    pts = list(corners)
    # boundary sampling edge by edge, h-spaced
    for k in range(len(corners)):
        a = np.asarray(corners[k])
        b = np.asarray(corners[(k + 1) % len(corners)])
        length = np.linalg.norm(b - a)
        n = max(1, int(round(length / h)))
        for i in range(1, n):
            pts.append(tuple(a + (b - a) * i / n))

    n_fixed = len(pts)  # corners + boundary samples stay put
    # interior grid clear of the boundary
    xs = np.arange(-20.0, 22.0 + h / 2, h)
    ys = np.arange(-12.5, 12.5 + h / 2, h)
    interior = []
    for px in xs:
        for py in ys:
            p = Point(px, py)
            if poly_prep.contains(p) and boundary.distance(p) > 0.55 * h:
                interior.append((px, py))
    pts = np.array(pts + interior)

    def inside(px, py):
        return poly_prep.contains(Point(px, py))

    def inside_margin(px, py):
        p = Point(px, py)
        return poly_prep.contains(p) and boundary.distance(p) > 0.4 * h

    pts = laplacian_smooth(pts, n_fixed, inside_margin)
    verts, tris = triangulate(pts, inside)
    validate(verts, tris, corners, f"yjunction h={h}")
    return verts, tris


def main():
    import os

    os.makedirs("data/meshes", exist_ok=True)
    v, t = cylinder_channel(0.11)
    write_simple_tri("data/meshes/cylinder_channel_desk.tri", v, t)
    # reference resolution: ~0.059 max background edge, graded near the obstacle
    v, t = cylinder_channel(0.042)
    write_simple_tri("data/meshes/cylinder_channel_ref.tri", v, t)
    v, t = yjunction(0.4)
    write_msh2("data/meshes/yjunction_desk.msh", v, t)
    v, t = yjunction(0.13)
    write_msh2("data/meshes/yjunction_ref.msh", v, t)


if __name__ == "__main__":
    main()
