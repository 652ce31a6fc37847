"""Interior triangulations built from concentric rings of vertices.

The mesher places rings of vertices between the domain center (disk,
star-shaped) or the inner boundary circle (annulus) and the boundary,
grading the per-ring vertex count with radius so the triangles stay close
to isotropic, and stitches consecutive rings with a zipper walk ordered
by angle.  Boundary vertices coincide with the boundary-space nodes and
come first in the vertex array, so the boundary map is the identity on
``0..n_b-1``.

On the disk and the annulus the construction yields right triangles
(no obtuse angles), which makes the assembled stiffness matrix an
M-matrix and gives a discrete maximum principle.
"""

from __future__ import annotations

import numpy as np

__all__ = ["InteriorMesh", "triangulate"]


class InteriorMesh:
    """Conforming triangulation of a planar domain.

    Attributes
    ----------
    vertices : (N, 2) float array
    triangles : (M, 3) int array, counterclockwise
    boundary_map : (n_b,) int array — mesh-vertex index of each boundary
        node, in boundary-space order (here always ``arange(n_b)``).
    """

    def __init__(self, vertices, triangles, boundary_map):
        self.vertices = vertices
        self.triangles = triangles
        self.boundary_map = boundary_map

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    def areas(self):
        p = self.vertices
        t = self.triangles
        d1 = p[t[:, 1]] - p[t[:, 0]]
        d2 = p[t[:, 2]] - p[t[:, 0]]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def __repr__(self):
        return f"InteriorMesh({self.n_vertices} vertices, {len(self.triangles)} triangles)"


def _zipper(idx_a, th_a, idx_b, th_b):
    """Stitch two closed vertex rings into a band of triangles.

    Both rings are given as (vertex indices, ascending angles in [0, 2pi)).
    The walk advances whichever ring has the smaller next angle; each ring
    contributes exactly len(ring) triangles.
    """
    n_a, n_b = len(th_a), len(th_b)
    start_b = int(np.searchsorted(th_b, th_a[0]))
    tris = []
    ia, ib = 0, start_b
    stop_a, stop_b = n_a, start_b + n_b

    def ang(th, n, i):
        return th[i % n] + 2 * np.pi * (i // n)

    while ia < stop_a or ib < stop_b:
        if ia >= stop_a:
            take_a = False
        elif ib >= stop_b:
            take_a = True
        else:
            take_a = ang(th_a, n_a, ia + 1) <= ang(th_b, n_b, ib + 1)
        if take_a:
            tris.append((idx_a[ia % n_a], idx_a[(ia + 1) % n_a], idx_b[ib % n_b]))
            ia += 1
        else:
            tris.append((idx_a[ia % n_a], idx_b[(ib + 1) % n_b], idx_b[ib % n_b]))
            ib += 1
    return tris


def _ring_counts(n_inner, n_outer, m):
    """Vertex counts for m+1 rings interpolating between two end counts."""
    if m == 0:
        return [n_outer]
    f = np.arange(m + 1) / m
    counts = np.rint(n_inner + (n_outer - n_inner) * f).astype(int)
    counts[0], counts[-1] = n_inner, n_outer
    return np.maximum(counts, 6).tolist()


def triangulate(domain, b):
    """Triangulate the interior of *domain* conforming to boundary space *b*.

    Returns
    -------
    InteriorMesh
        Boundary vertices first (in boundary order), then interior rings.
    """
    from .geometry import make_domain

    domain = make_domain(domain)
    n_b = b.n_nodes
    verts = [b.nodes]
    next_idx = n_b

    if domain.kind in ("unit-disk", "star-shaped"):
        th_b = b.params
        mean_h = sum(b.component_lengths) / n_b
        m = max(2, int(round(1.0 / mean_h)))  # number of bands
        rings = []  # innermost first: (indices, angles)
        for k in range(1, m):
            f = k / m
            nk = max(8, int(round(n_b * f)))
            off = 0.5 * (k % 2)
            th = 2 * np.pi * (np.arange(nk) + off) / nk
            if domain.kind == "star-shaped":
                r = f * domain.radius(th)
            else:
                r = f
            verts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=1))
            rings.append((np.arange(next_idx, next_idx + nk), th))
            next_idx += nk
        rings.append((np.arange(n_b), th_b))
        # center vertex and fan
        verts.append(np.zeros((1, 2)))
        center = next_idx
        tris = []
        idx0, _ = rings[0]
        n0 = len(idx0)
        for j in range(n0):
            tris.append((center, idx0[j], idx0[(j + 1) % n0]))
        for k in range(len(rings) - 1):
            tris.extend(_zipper(*rings[k], *rings[k + 1]))

    elif domain.kind == "annulus":
        a, r_out = domain.r_inner, domain.r_outer
        inner_idx = b.component_indices(0)
        outer_idx = b.component_indices(1)
        th_in = b.params[inner_idx]
        th_out = b.params[outer_idx]
        mean_h = sum(b.component_lengths) / n_b
        m = max(1, int(round((r_out - a) / mean_h)))
        counts = _ring_counts(len(inner_idx), len(outer_idx), m)
        radii = a + (r_out - a) * np.arange(m + 1) / m
        rings = [(inner_idx, th_in)]
        for k in range(1, m):
            nk = counts[k]
            off = 0.5 * (k % 2)
            th = 2 * np.pi * (np.arange(nk) + off) / nk
            r = radii[k]
            verts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=1))
            rings.append((np.arange(next_idx, next_idx + nk), th))
            next_idx += nk
        rings.append((outer_idx, th_out))
        tris = []
        for k in range(len(rings) - 1):
            tris.extend(_zipper(*rings[k], *rings[k + 1]))

    else:
        raise ValueError(f"cannot mesh domain kind {domain.kind!r}")

    vertices = np.concatenate(verts)
    triangles = np.asarray(tris, int)

    # orient counterclockwise
    p = vertices
    d1 = p[triangles[:, 1]] - p[triangles[:, 0]]
    d2 = p[triangles[:, 2]] - p[triangles[:, 0]]
    signed = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    flip = signed < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    mesh = InteriorMesh(vertices, triangles, np.arange(n_b))
    _check_mesh(mesh, b)
    return mesh


def _check_mesh(mesh, b):
    """Sanity checks: positive areas, conforming edges, boundary intact."""
    areas = mesh.areas()
    if not (areas > 1e-14).all():
        raise RuntimeError(f"degenerate triangle (min area {areas.min():.3g})")

    # each edge appears twice, except boundary edges which appear once and
    # must connect consecutive boundary nodes
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    if counts.max() > 2:
        raise RuntimeError("non-manifold edge in triangulation")
    hull = uniq[counts == 1]

    expected = []
    for c in range(b.n_components):
        idx = mesh.boundary_map[b.component_indices(c)]
        n = len(idx)
        for j in range(n):
            expected.append(tuple(sorted((idx[j], idx[(j + 1) % n]))))
    expected = np.array(sorted(expected))
    hull = hull[np.lexsort(hull.T[::-1])]
    if hull.shape != expected.shape or not (hull == expected).all():
        raise RuntimeError("mesh boundary does not match boundary nodes")
