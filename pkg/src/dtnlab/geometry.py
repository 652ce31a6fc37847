"""Planar domains, boundary meshes, and the boundary distance rho.

A domain is the unit disk, an annulus, or a star-shaped region whose
boundary radius is a trigonometric polynomial r(theta).  The boundary is
discretized into nodes that are equally spaced in arc length within each
component; all boundary quadrature uses the resulting arc-length weights.

On a boundary with several components the distance

    rho(x, y) = sup { |g(x) - g(y)| : g admissible }

is taken over functions g whose anchor spread plus D times the gradient
bound does not exceed D = 1 + sum of component diameters.  Within a
component rho is the geodesic (arc-length) distance; across components it
equals max(D, d_i(x, x_i) + d_j(y, x_j)), which the witness sampler
certifies from below.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PlanarDomain",
    "BoundarySpace",
    "LipschitzWitness",
    "make_domain",
    "build_boundary_space",
    "geodesic_distance",
    "rho_distance",
    "rho_matrix",
    "make_witness",
    "sample_witnesses",
    "rho_oracle_sample",
]

_MIN_NODES_PER_COMPONENT = 16


class PlanarDomain:
    """Bounded planar domain with a smooth, possibly disconnected boundary.

    Parameters
    ----------
    kind : str
        One of ``"unit-disk"``, ``"annulus"``, ``"star-shaped"``.
    r_inner, r_outer : float, optional
        Annulus radii, ``0 < r_inner < r_outer``.
    a0, cos_coeffs, sin_coeffs : optional
        Star-shaped radius r(theta) = a0 + sum a_k cos(k theta)
        + sum b_k sin(k theta).  Must stay strictly positive.
    """

    def __init__(self, kind, r_inner=None, r_outer=None,
                 a0=None, cos_coeffs=None, sin_coeffs=None):
        self.kind = kind
        if kind == "unit-disk":
            self.n_components = 1
        elif kind == "annulus":
            if not (0 < r_inner < r_outer):
                raise ValueError(
                    f"annulus needs 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
            self.r_inner = float(r_inner)
            self.r_outer = float(r_outer)
            self.n_components = 2
        elif kind == "star-shaped":
            self.a0 = float(a0)
            self.cos_coeffs = np.asarray(cos_coeffs if cos_coeffs is not None else [], float)
            self.sin_coeffs = np.asarray(sin_coeffs if sin_coeffs is not None else [], float)
            th = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
            rmin = self.radius(th).min()
            if rmin <= 0:
                raise ValueError(
                    f"radial profile must stay positive; min r(theta) = {rmin:.4g}")
            self.n_components = 1
        else:
            raise ValueError(f"unknown domain kind {kind!r}")

    # ---- star-shaped radius and its derivative -------------------------
    def radius(self, theta):
        th = np.asarray(theta, float)
        r = np.full_like(th, self.a0)
        for k, a in enumerate(self.cos_coeffs, start=1):
            r += a * np.cos(k * th)
        for k, b in enumerate(self.sin_coeffs, start=1):
            r += b * np.sin(k * th)
        return r

    def radius_prime(self, theta):
        th = np.asarray(theta, float)
        rp = np.zeros_like(th)
        for k, a in enumerate(self.cos_coeffs, start=1):
            rp += -k * a * np.sin(k * th)
        for k, b in enumerate(self.sin_coeffs, start=1):
            rp += k * b * np.cos(k * th)
        return rp

    # ---- component parametrizations ------------------------------------
    def component_radius(self, comp):
        """Radius of a circular component (disk or annulus)."""
        if self.kind == "unit-disk":
            return 1.0
        if self.kind == "annulus":
            return self.r_inner if comp == 0 else self.r_outer
        raise ValueError("star-shaped boundary has no constant radius")

    def point(self, comp, theta):
        """Boundary point at parameter theta on the given component."""
        th = np.asarray(theta, float)
        if self.kind == "star-shaped":
            r = self.radius(th)
        else:
            r = self.component_radius(comp)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def speed(self, comp, theta):
        """|d gamma / d theta| at parameter theta."""
        th = np.asarray(theta, float)
        if self.kind == "star-shaped":
            r = self.radius(th)
            rp = self.radius_prime(th)
            return np.sqrt(r * r + rp * rp)
        return np.full_like(th, self.component_radius(comp))

    def __repr__(self):
        if self.kind == "annulus":
            return f"PlanarDomain(annulus, {self.r_inner}, {self.r_outer})"
        return f"PlanarDomain({self.kind})"


def make_domain(spec):
    """Build a :class:`PlanarDomain` from a short description.

    Accepts ``"unit-disk"``, ``("annulus", r_in, r_out)``, a dict such as
    ``{"kind": "annulus", "r_inner": 1, "r_outer": 2}``, or for star-shaped
    profiles ``{"kind": "star-shaped", "a0": 1.0, "cos": [0,0,0.2]}``.
    """
    if isinstance(spec, PlanarDomain):
        return spec
    if isinstance(spec, str):
        return PlanarDomain(spec)
    if isinstance(spec, (tuple, list)):
        kind = spec[0]
        if kind == "annulus":
            return PlanarDomain("annulus", r_inner=spec[1], r_outer=spec[2])
        raise ValueError(f"cannot interpret domain spec {spec!r}")
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "unit-disk":
            return PlanarDomain("unit-disk")
        if kind == "annulus":
            return PlanarDomain("annulus", r_inner=spec["r_inner"],
                                r_outer=spec["r_outer"])
        if kind == "star-shaped":
            return PlanarDomain("star-shaped", a0=spec.get("a0", 1.0),
                                cos_coeffs=spec.get("cos"),
                                sin_coeffs=spec.get("sin"))
    raise ValueError(f"cannot interpret domain spec {spec!r}")


def _component_arclength(domain, comp, tol=1e-12, n0=2048):
    """Cumulative arc length s(theta) on a dense grid, refined until stable.

    Returns (theta_grid, cumulative_s, total_length).
    """
    n = n0
    prev = None
    while True:
        th = np.linspace(0.0, 2 * np.pi, n + 1)
        sp = domain.speed(comp, th)
        # cumulative trapezoid
        ds = 0.5 * (sp[1:] + sp[:-1]) * (th[1] - th[0])
        s = np.concatenate([[0.0], np.cumsum(ds)])
        total = s[-1]
        if prev is not None and abs(total - prev) <= tol * max(total, 1.0):
            return th, s, total
        if n > 1 << 20:
            return th, s, total
        prev = total
        n *= 2


class BoundarySpace:
    """Discretized boundary: nodes, weights, components, anchors, metric data.

    Attributes
    ----------
    nodes : (N, 2) float array
    weights : (N,) arc-length quadrature weights, positive
    component_id : (N,) int array
    anchors : list of int, one node index per component
    component_diameters : list of float (intrinsic, half circumference
        for a circle)
    D : float, 1 + sum of component diameters
    arc : (N,) arc-length position of each node within its component
    params : (N,) parameter (angle) of each node
    component_lengths : list of float
    """

    def __init__(self, domain, nodes, weights, component_id, anchors,
                 component_diameters, arc, params, component_lengths):
        self.domain = domain
        self.nodes = nodes
        self.weights = weights
        self.component_id = component_id
        self.anchors = anchors
        self.component_diameters = component_diameters
        self.D = 1.0 + float(sum(component_diameters))
        self.arc = arc
        self.params = params
        self.component_lengths = component_lengths

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_components(self):
        return len(self.anchors)

    def component_indices(self, comp):
        return np.where(self.component_id == comp)[0]

    def __repr__(self):
        return (f"BoundarySpace({self.domain.kind}, n={self.n_nodes}, "
                f"components={self.n_components}, D={self.D:.4f})")


def build_boundary_space(domain, n_nodes):
    """Discretize the boundary of *domain* into ``n_nodes`` total nodes.

    Nodes are equally spaced in arc length within each component and the
    total is split between components proportionally to circumference.
    Each component must receive at least 16 nodes.

    Returns
    -------
    BoundarySpace
    """
    domain = make_domain(domain)
    n_nodes = int(n_nodes)
    ncomp = domain.n_components

    # arc-length tables per component
    tables = [_component_arclength(domain, c) for c in range(ncomp)]
    lengths = [t[2] for t in tables]
    total_len = sum(lengths)

    # proportional allocation, largest remainder
    raw = np.array([n_nodes * L / total_len for L in lengths])
    counts = np.floor(raw).astype(int)
    order = np.argsort(-(raw - counts))
    for i in range(n_nodes - counts.sum()):
        counts[order[i % ncomp]] += 1
    if (counts < _MIN_NODES_PER_COMPONENT).any():
        need = int(np.ceil(_MIN_NODES_PER_COMPONENT * total_len / min(lengths)))
        raise ValueError(
            f"n_nodes={n_nodes} gives component counts {counts.tolist()}; "
            f"each component needs at least {_MIN_NODES_PER_COMPONENT} nodes "
            f"(use n_nodes >= {need})")

    nodes, weights, comp_id, arc, params = [], [], [], [], []
    diams = []
    for c in range(ncomp):
        th_grid, s_grid, L = tables[c]
        nc = counts[c]
        s_targets = np.arange(nc) * (L / nc)
        th = np.interp(s_targets, s_grid, th_grid)
        th[0] = 0.0
        pts = domain.point(c, th)
        nodes.append(pts)
        weights.append(np.full(nc, L / nc))
        comp_id.append(np.full(nc, c, int))
        arc.append(s_targets)
        params.append(th)
        if domain.kind == "star-shaped":
            # pairwise geodesic max on the mesh
            ds = np.abs(s_targets[:, None] - s_targets[None, :])
            diams.append(float(np.minimum(ds, L - ds).max()))
        else:
            diams.append(np.pi * domain.component_radius(c))

    # anchor of component c = first node of that component
    anchors = []
    off = 0
    for c in range(ncomp):
        anchors.append(off)
        off += counts[c]

    return BoundarySpace(
        domain,
        np.concatenate(nodes),
        np.concatenate(weights),
        np.concatenate(comp_id),
        anchors,
        diams,
        np.concatenate(arc),
        np.concatenate(params),
        lengths,
    )


# ---------------------------------------------------------------------------
# distances


def geodesic_distance(b, i, j):
    """Arc-length distance between boundary nodes i and j (same component)."""
    ci, cj = b.component_id[i], b.component_id[j]
    if ci != cj:
        raise ValueError(
            f"nodes {i} and {j} lie on different components ({ci} != {cj})")
    L = b.component_lengths[ci]
    d = abs(b.arc[i] - b.arc[j])
    return float(min(d, L - d))


def _geodesic_same_component(b, idx):
    """Pairwise geodesic matrix for the nodes (indices) of one component."""
    c = b.component_id[idx[0]]
    L = b.component_lengths[c]
    s = b.arc[idx]
    d = np.abs(s[:, None] - s[None, :])
    return np.minimum(d, L - d)


def rho_distance(b, i, j, k=1):
    """Boundary distance rho between nodes i and j.

    Same component: the geodesic distance.  Different components:
    ``max(D, d_i(x, x_i) + d_j(y, x_j))`` with x_i, x_j the component
    anchors — and since D exceeds the sum of any two component diameters,
    this equals D.

    The smoothness order ``k`` selects which witness class the value
    refers to.  The closed form is exact for every k across components
    (per-component constants have all discrete derivatives zero) and for
    k = 1 within a component; for k >= 2 the same-component value is an
    upper bound for the smoothed witness class.
    """
    if k < 1:
        raise ValueError("smoothness order k must be >= 1")
    ci, cj = b.component_id[i], b.component_id[j]
    if ci == cj:
        return geodesic_distance(b, i, j)
    di = geodesic_distance(b, i, b.anchors[ci])
    dj = geodesic_distance(b, j, b.anchors[cj])
    return float(max(b.D, di + dj))


def rho_matrix(b, k=1):
    """Pairwise rho distances for all boundary nodes, as an (N, N) array."""
    if k < 1:
        raise ValueError("smoothness order k must be >= 1")
    n = b.n_nodes
    out = np.empty((n, n))
    anchor_dist = np.empty(n)
    for c in range(b.n_components):
        idx = b.component_indices(c)
        g = _geodesic_same_component(b, idx)
        out[np.ix_(idx, idx)] = g
        anchor_dist[idx] = g[:, 0] if idx[0] == b.anchors[c] else g[
            :, np.searchsorted(idx, b.anchors[c])]
    for ci in range(b.n_components):
        for cj in range(b.n_components):
            if ci == cj:
                continue
            ii = b.component_indices(ci)
            jj = b.component_indices(cj)
            cross = np.maximum(b.D, anchor_dist[ii][:, None] + anchor_dist[jj][None, :])
            out[np.ix_(ii, jj)] = cross
    return out


# ---------------------------------------------------------------------------
# witnesses


class LipschitzWitness:
    """Piecewise-linear boundary function inside the admissible class.

    ``values`` lives on the boundary nodes; admissibility means

        max_{i,j} |g(x_i) - g(x_j)| + D * max_{l <= k} ||disc. l-th deriv|| <= D.
    """

    def __init__(self, values, k, anchor_offsets, margin):
        self.values = values
        self.k = k
        self.anchor_offsets = anchor_offsets
        self.margin = margin  # D - (offset spread + D * deriv sup), >= 0

    def __repr__(self):
        return f"LipschitzWitness(k={self.k}, margin={self.margin:.3g})"


def _derivative_sup(b, values, k):
    """Largest sup over discrete derivatives of order 1..k (cyclic)."""
    worst = 0.0
    for c in range(b.n_components):
        idx = b.component_indices(c)
        h = b.component_lengths[c] / len(idx)
        g = values[idx]
        for _ in range(k):
            g = (np.roll(g, -1) - g) / h
            worst = max(worst, float(np.abs(g).max()))
    return worst


def _constraint_value(b, values, k):
    anchor_vals = values[np.asarray(b.anchors)]
    spread = float(anchor_vals.max() - anchor_vals.min()) if len(anchor_vals) > 1 else 0.0
    return spread + b.D * _derivative_sup(b, values, k)


def make_witness(b, values, k=1):
    """Validate node values as an admissible witness; raises if outside."""
    values = np.asarray(values, float)
    if values.shape != (b.n_nodes,):
        raise ValueError(f"expected {b.n_nodes} node values, got {values.shape}")
    if k < 1:
        raise ValueError("smoothness order k must be >= 1")
    cv = _constraint_value(b, values, k)
    if cv > b.D * (1 + 1e-10):
        raise ValueError(
            f"witness violates admissibility: constraint value {cv:.6g} > D = {b.D:.6g}")
    anchor_vals = values[np.asarray(b.anchors)]
    return LipschitzWitness(values, k, anchor_vals - anchor_vals[0], b.D - cv)


def _project(b, values, k):
    """Scale node values into the admissible class (touching its boundary)."""
    cv = _constraint_value(b, values, k)
    if cv > b.D:
        values = values * (b.D / cv)
    return values


def _mollify(b, values, passes):
    out = values.copy()
    for c in range(b.n_components):
        idx = b.component_indices(c)
        g = out[idx]
        for _ in range(passes):
            g = 0.25 * np.roll(g, 1) + 0.5 * g + 0.25 * np.roll(g, -1)
        out[idx] = g
    return out


def _cone(b, center):
    """d(., center) on the center's component, constant elsewhere."""
    c = b.component_id[center]
    vals = np.empty(b.n_nodes)
    for cc in range(b.n_components):
        idx = b.component_indices(cc)
        if cc == c:
            L = b.component_lengths[cc]
            d = np.abs(b.arc[idx] - b.arc[center])
            vals[idx] = np.minimum(d, L - d)
        else:
            vals[idx] = 0.0
    # zero anchor spread: other components sit at the cone's anchor value
    anchor_val = vals[b.anchors[c]]
    for cc in range(b.n_components):
        if cc != c:
            vals[b.component_indices(cc)] = anchor_val
    return vals


def sample_witnesses(b, n_samples, k=1, seed=0, families="all"):
    """Draw admissible witnesses; returns a list of node-value arrays.

    Families: cone distances d(., p) (mollified for k > 1), per-component
    constants with spread up to D, and random trigonometric functions,
    all rescaled into the admissible class.  With ``families="random"``
    the deterministic extremal members are omitted.
    """
    rng = np.random.default_rng(seed)
    out = []
    ncomp = b.n_components

    if families == "all":
        # deterministic extremal members: constants with spread exactly D
        if ncomp > 1:
            for ci in range(ncomp):
                for cj in range(ncomp):
                    if ci == cj:
                        continue
                    vals = np.full(b.n_nodes, 0.5 * b.D)
                    vals[b.component_indices(ci)] = 0.0
                    vals[b.component_indices(cj)] = b.D
                    out.append(_project(b, vals, k))
        # cones at every anchor
        for a in b.anchors:
            g = _cone(b, a)
            if k > 1:
                g = _mollify(b, g, 2 * k)
            out.append(_project(b, g, k))

    while len(out) < n_samples:
        u = rng.random()
        if u < 0.4:
            # cone at a random node, random clip level, mollified
            p = rng.integers(b.n_nodes)
            g = _cone(b, p)
            clip = rng.uniform(0.3, 1.0) * g.max()
            g = np.minimum(g, clip)
            g = _mollify(b, g, rng.integers(0, 3) + (2 * k if k > 1 else 0))
        elif u < 0.6 and ncomp > 1:
            # per-component constants
            g = np.empty(b.n_nodes)
            levels = rng.uniform(0.0, b.D, ncomp)
            if rng.random() < 0.5:
                levels[rng.integers(ncomp)] = 0.0
                levels[rng.integers(ncomp)] = b.D
            for c in range(ncomp):
                g[b.component_indices(c)] = levels[c]
        else:
            # random trigonometric function plus component offsets
            g = np.zeros(b.n_nodes)
            for c in range(ncomp):
                idx = b.component_indices(c)
                th = 2 * np.pi * b.arc[idx] / b.component_lengths[c]
                m_max = rng.integers(1, 6)
                gc = np.zeros(len(idx))
                for m in range(1, m_max + 1):
                    amp = rng.standard_normal(2) / m ** 2
                    gc += amp[0] * np.cos(m * th) + amp[1] * np.sin(m * th)
                g[idx] = gc + rng.uniform(-0.5, 0.5) * b.D
            if k > 1:
                g = _mollify(b, g, 2 * k)
        out.append(_project(b, g, k))
    return out[:n_samples]


def rho_oracle_sample(b, i, j, n_samples=1000, k=1, seed=0, families="all"):
    """Lower estimate of rho(x_i, x_j) from sampled admissible witnesses."""
    best = 0.0
    for g in sample_witnesses(b, n_samples, k=k, seed=seed, families=families):
        best = max(best, abs(g[i] - g[j]))
    return best
