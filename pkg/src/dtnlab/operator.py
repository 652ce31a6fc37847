"""Discrete Dirichlet-to-Neumann operators on planar domains.

Two constructions of the same object:

* ``schur_dtn`` — generic finite-element path.  P1 stiffness plus a
  potential mass term is assembled on an interior triangulation, the
  interior unknowns are eliminated, and the boundary Schur complement is
  diagonalized against the lumped arc-length boundary mass.
* ``exact_disk_dtn`` / ``exact_annulus_dtn`` — separation of variables on
  circular boundaries.  Harmonic (or modified-Bessel, for constant
  potential) radial modes give the eigenvalues in closed form; the
  eigenvectors are sampled trigonometric functions.

Either way the result is a :class:`DtnOperator`: eigenpairs orthonormal
with respect to the boundary quadrature weights, which downstream modules
use for semigroup calculus.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh
from scipy.special import iv, ive, kve

__all__ = [
    "PotentialField",
    "StiffnessSystem",
    "HarmonicExtension",
    "DtnOperator",
    "make_potential",
    "assemble_system",
    "harmonic_extension",
    "schur_dtn",
    "exact_disk_dtn",
    "exact_annulus_dtn",
    "disk_mode_eigenvalue",
    "spectral_branches",
    "coercivity_margin",
]


class PotentialField:
    """Nonnegative potential on the domain interior.

    Kinds: ``zero``, ``constant`` (value c >= 0), ``radial`` (profile of
    r = |x|), ``general`` (callable of (x, y) arrays).
    """

    def __init__(self, kind, value=None, func=None, r_samples=None, v_samples=None):
        self.kind = kind
        self.value = value
        self.func = func
        self.r_samples = None if r_samples is None else np.asarray(r_samples, float)
        self.v_samples = None if v_samples is None else np.asarray(v_samples, float)
        if kind == "constant" and value < 0:
            raise ValueError(f"potential must be nonnegative, got constant {value}")
        if kind == "radial" and self.v_samples is not None and self.v_samples.min() < 0:
            raise ValueError("radial potential samples must be nonnegative")

    def evaluate(self, points):
        pts = np.asarray(points, float)
        if self.kind == "zero":
            return np.zeros(pts.shape[0])
        if self.kind == "constant":
            return np.full(pts.shape[0], self.value)
        if self.kind == "radial":
            r = np.hypot(pts[:, 0], pts[:, 1])
            if self.func is not None:
                vals = np.asarray(self.func(r), float)
            else:
                vals = np.interp(r, self.r_samples, self.v_samples)
        else:
            vals = np.asarray(self.func(pts[:, 0], pts[:, 1]), float)
        if vals.min() < -1e-14:
            raise ValueError(
                f"potential must be nonnegative; min value {vals.min():.4g}")
        return np.maximum(vals, 0.0)

    @property
    def is_zero(self):
        return self.kind == "zero" or (self.kind == "constant" and self.value == 0)

    def constant_value(self):
        """The constant c if the potential is constant (zero counts), else None."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return float(self.value)
        return None

    def __repr__(self):
        if self.kind == "constant":
            return f"PotentialField(constant {self.value})"
        return f"PotentialField({self.kind})"


def make_potential(spec):
    """Potential from a short description: None/number/callable/dict."""
    if isinstance(spec, PotentialField):
        return spec
    if spec is None:
        return PotentialField("zero")
    if isinstance(spec, (int, float)):
        if spec == 0:
            return PotentialField("zero")
        return PotentialField("constant", value=float(spec))
    if callable(spec):
        return PotentialField("general", func=spec)
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind in ("zero", None):
            return PotentialField("zero")
        if kind == "constant":
            return PotentialField("constant", value=float(spec["value"]))
        if kind == "radial":
            if "func" in spec:
                return PotentialField("radial", func=spec["func"])
            return PotentialField("radial", r_samples=spec["r"], v_samples=spec["v"])
        if kind == "general":
            return PotentialField("general", func=spec["func"])
    raise ValueError(f"cannot interpret potential spec {spec!r}")


# ---------------------------------------------------------------------------
# assembly


class StiffnessSystem:
    """Assembled P1 system for the form  a_V(u, v) = (grad u, grad v) + (V u, v).

    Attributes
    ----------
    A : CSR matrix of a_V over all vertices (symmetrized)
    A0 : Laplace part alone
    M : consistent P1 mass matrix over all vertices
    M_gamma : (n_b,) lumped arc-length boundary weights
    boundary_idx, interior_idx : vertex index partitions
    """

    def __init__(self, mesh, boundary, potential, A, A0, M):
        self.mesh = mesh
        self.boundary = boundary
        self.potential = potential
        self.A = A
        self.A0 = A0
        self.M = M
        self.M_gamma = boundary.weights
        self.boundary_idx = mesh.boundary_map
        n = mesh.n_vertices
        mask = np.zeros(n, bool)
        mask[self.boundary_idx] = True
        self.interior_idx = np.where(~mask)[0]
        self._lu = None

    @property
    def A_II(self):
        return self.A[np.ix_(self.interior_idx, self.interior_idx)]

    @property
    def A_IB(self):
        return self.A[np.ix_(self.interior_idx, self.boundary_idx)]

    @property
    def A_BB(self):
        return self.A[np.ix_(self.boundary_idx, self.boundary_idx)]

    def interior_solver(self):
        """Cached factorization of the SPD interior block."""
        if self._lu is None:
            self._lu = spla.splu(self.A_II.tocsc())
        return self._lu


def assemble_system(mesh, boundary, potential=None):
    """Assemble stiffness + potential mass on a triangulation.

    The potential is evaluated at triangle centroids and enters through
    the consistent P1 element mass matrix; the full matrix is symmetrized
    to machine precision.

    Returns
    -------
    StiffnessSystem
    """
    V = make_potential(potential)
    p = mesh.vertices
    t = mesh.triangles
    p1, p2, p3 = p[t[:, 0]], p[t[:, 1]], p[t[:, 2]]
    area = mesh.areas()
    if not (area > 0).all():
        raise ValueError("triangulation has nonpositive areas")

    # edge vectors opposite each vertex; grad(hat_i) = rot90(e_i) / (2 area)
    e = np.stack([p3 - p2, p1 - p3, p2 - p1], axis=1)
    centroids = (p1 + p2 + p3) / 3.0
    v_c = V.evaluate(centroids)

    rows, cols, k_vals, k0_vals, m_vals = [], [], [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(t[:, i])
            cols.append(t[:, j])
            kij = (e[:, i, 0] * e[:, j, 0] + e[:, i, 1] * e[:, j, 1]) / (4.0 * area)
            mij = area / 12.0 * (2.0 if i == j else 1.0)
            k0_vals.append(kij)
            m_vals.append(mij)
            k_vals.append(kij + v_c * mij)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    n = mesh.n_vertices
    A = sp.coo_matrix((np.concatenate(k_vals), (rows, cols)), shape=(n, n)).tocsr()
    A0 = sp.coo_matrix((np.concatenate(k0_vals), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((np.concatenate(m_vals), (rows, cols)), shape=(n, n)).tocsr()
    A = (A + A.T) * 0.5
    A0 = (A0 + A0.T) * 0.5
    M = (M + M.T) * 0.5
    return StiffnessSystem(mesh, boundary, V, A, A0, M)


class HarmonicExtension:
    """Solution of the interior problem with prescribed boundary trace."""

    def __init__(self, values, trace, residual):
        self.values = values      # on all mesh vertices
        self.trace = trace        # the boundary data
        self.residual = residual  # relative residual of the interior solve


def harmonic_extension(system, trace):
    """Extend boundary data into the interior by solving the a_V problem."""
    trace = np.asarray(trace, float)
    nb = len(system.boundary_idx)
    if trace.shape != (nb,):
        raise ValueError(f"expected {nb} boundary values, got {trace.shape}")
    rhs = -system.A_IB @ trace
    u_i = system.interior_solver().solve(rhs)
    res = np.linalg.norm(system.A_II @ u_i - rhs)
    scale = np.linalg.norm(rhs)
    values = np.empty(system.mesh.n_vertices)
    values[system.boundary_idx] = trace
    values[system.interior_idx] = u_i
    return HarmonicExtension(values, trace, res / max(scale, 1e-300))


# ---------------------------------------------------------------------------
# the operator


class DtnOperator:
    """Self-adjoint DtN operator as weight-orthonormal eigenpairs.

    Attributes
    ----------
    eigenvalues : (K,) ascending
    eigenvectors : (n_b, K), orthonormal under diag(weights)
    weights : boundary quadrature weights
    boundary : the BoundarySpace the operator lives on
    provenance : "exact-spectral" or "fem-schur"
    meta : dict with construction details (potential, mode numbers, ...)
    """

    def __init__(self, eigenvalues, eigenvectors, boundary, provenance, meta=None):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.boundary = boundary
        self.weights = boundary.weights
        self.provenance = provenance
        self.meta = meta or {}

    @property
    def n_nodes(self):
        return self.eigenvectors.shape[0]

    @property
    def n_eigenpairs(self):
        return self.eigenvectors.shape[1]

    @property
    def lambda_min(self):
        return float(self.eigenvalues[0])

    def coefficients(self, phi):
        """Expansion coefficients <phi, phi_k> in the weighted inner product."""
        return self.eigenvectors.T @ (self.weights * phi)

    def apply(self, phi):
        """Apply the operator itself (normal-derivative map) to node values."""
        return self.eigenvectors @ (self.eigenvalues * self.coefficients(phi))

    def as_matrix(self):
        """Dense matrix acting on node values."""
        return self.eigenvectors @ (self.eigenvalues[:, None]
                                    * (self.eigenvectors.T * self.weights[None, :]))

    def __repr__(self):
        return (f"DtnOperator({self.provenance}, n={self.n_nodes}, "
                f"K={self.n_eigenpairs}, lambda_min={self.lambda_min:.3g})")


def schur_dtn(system):
    """DtN operator by eliminating the interior of an assembled system.

    Forms N = A_BB - A_BI A_II^{-1} A_IB (dense on the boundary) and
    solves the generalized symmetric eigenproblem N phi = lambda M_gamma phi
    with the lumped arc-length boundary mass.

    Returns
    -------
    DtnOperator with provenance ``"fem-schur"``.
    """
    A_IB = system.A_IB.toarray()
    X = system.interior_solver().solve(A_IB)
    N = system.A_BB.toarray() - A_IB.T @ X
    N = 0.5 * (N + N.T)

    w = system.M_gamma
    d = 1.0 / np.sqrt(w)
    lam, psi = eigh(d[:, None] * N * d[None, :])
    phi = d[:, None] * psi
    meta = {
        "potential": repr(system.potential),
        "constant_potential": system.potential.constant_value(),
        "n_vertices": system.mesh.n_vertices,
    }
    return DtnOperator(lam, phi, system.boundary, "fem-schur", meta)


# ---------------------------------------------------------------------------
# exact circular backends


def disk_mode_eigenvalue(c, n):
    """DtN eigenvalue of angular mode n on the unit disk, potential c >= 0.

    c = 0 gives |n|; c > 0 gives sqrt(c) I_n'(sqrt(c)) / I_n(sqrt(c)).
    """
    n = abs(int(n))
    if c == 0:
        return float(n)
    s = np.sqrt(c)
    # I_n'(s) = (I_{n-1}(s) + I_{n+1}(s)) / 2
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = s * 0.5 * (iv(n - 1, s) + iv(n + 1, s)) / iv(n, s)
    if np.isfinite(lam):
        return float(lam)
    # deep orders underflow in double precision; the large-order expansion
    # of the ratio is accurate to O(c^2 / n^3) there
    return float(n + c / (2.0 * (n + 1.0)))


def _annulus_mode_form(a, b, c, n):
    """Per-mode 2x2 form and mass matrices on the annulus boundary pair.

    The trace basis is (1 on the inner circle, 0 on the outer) and vice
    versa, times cos/sin(n theta).  G is the energy-form matrix of their
    radial solutions, W the boundary mass; both are exactly symmetric
    (the off-diagonal reduces by the Wronskian to pi-ish / Delta).
    """
    wa = (2 * np.pi if n == 0 else np.pi) * a
    wb = (2 * np.pi if n == 0 else np.pi) * b
    W = np.diag([wa, wb])

    if c == 0:
        L = np.log(b / a)
        if n == 0:
            G = (2 * np.pi / L) * np.array([[1.0, -1.0], [-1.0, 1.0]])
        else:
            nL = n * L
            coth = 1.0 / np.tanh(nL)
            csch = 1.0 / np.sinh(nL) if nL < 700 else 0.0
            G = np.pi * n * np.array([[coth, -csch], [-csch, coth]])
        return G, W

    s = np.sqrt(c)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ia_, ka_ = ive(n, s * a), kve(n, s * a)
        ib_, kb_ = ive(n, s * b), kve(n, s * b)
        ipa = 0.5 * (ive(abs(n - 1), s * a) + ive(n + 1, s * a))
        kpa = -0.5 * (kve(abs(n - 1), s * a) + kve(n + 1, s * a))
        ipb = 0.5 * (ive(abs(n - 1), s * b) + ive(n + 1, s * b))
        kpb = -0.5 * (kve(abs(n - 1), s * b) + kve(n + 1, s * b))

        # every product f(s r) g(s y) of scaled values carries e^{s(r-y)}
        E = np.exp(s * (a - b))
        delta = ia_ * kb_ * E - ka_ * ib_ / E

        # interpolatory radial solutions: u1 = 1 at r=a, u2 = 1 at r=b
        u1p_a = s * (ipa * kb_ * E - kpa * ib_ / E) / delta
        u2p_b = s * (ia_ * kpb * E - ka_ * ipb / E) / delta
        # Wronskian I'K - K'I = 1/x collapses the cross terms
        u1p_b = 1.0 / (b * delta)
        u2p_a = -1.0 / (a * delta)

        B = np.array([[-u1p_a, -u2p_a], [u1p_b, u2p_b]])
    if not (np.isfinite(B).all() and delta != 0):
        # high orders at small argument over/underflow in double precision;
        # redo the mode in arbitrary precision (the entries are O(n) floats)
        B = _annulus_mode_entries_mp(a, b, s, n)
    G = W @ B
    G = 0.5 * (G + G.T)
    return G, W


def _annulus_mode_entries_mp(a, b, s, n):
    import mpmath as mp

    with mp.workdps(40):
        xa, xb = mp.mpf(s) * a, mp.mpf(s) * b
        ia_, ka_ = mp.besseli(n, xa), mp.besselk(n, xa)
        ib_, kb_ = mp.besseli(n, xb), mp.besselk(n, xb)
        ipa = (mp.besseli(abs(n - 1), xa) + mp.besseli(n + 1, xa)) / 2
        kpa = -(mp.besselk(abs(n - 1), xa) + mp.besselk(n + 1, xa)) / 2
        ipb = (mp.besseli(abs(n - 1), xb) + mp.besseli(n + 1, xb)) / 2
        kpb = -(mp.besselk(abs(n - 1), xb) + mp.besselk(n + 1, xb)) / 2
        delta = ia_ * kb_ - ka_ * ib_
        u1p_a = s * (ipa * kb_ - kpa * ib_) / delta
        u2p_b = s * (ia_ * kpb - ka_ * ipb) / delta
        u1p_b = 1 / (b * delta)
        u2p_a = -1 / (a * delta)
        return np.array([[-float(u1p_a), -float(u2p_a)],
                         [float(u1p_b), float(u2p_b)]])


def _annulus_branches(a, b, c, n_max, n_min=0):
    """Spectral branches (mode, eigenvalue, 2 coefficients) for the annulus."""
    ns, lams, coeffs = [], [], []
    for n in range(n_min, n_max + 1):
        G, W = _annulus_mode_form(a, b, c, n)
        lam, vec = eigh(G, W)
        for j in range(2):
            ns.append(n)
            lams.append(lam[j])
            coeffs.append(vec[:, j])
    return np.array(ns), np.array(lams), np.array(coeffs)


def spectral_branches(kind, c, n_max, r_inner=None, r_outer=None, n_min=0):
    """Closed-form spectral data per angular mode for circular boundaries.

    Returns (mode_numbers, eigenvalues, component_coefficients) ordered by
    mode; each branch with mode n >= 1 stands for a degenerate cos/sin
    pair.  The coefficients give the eigenfunction amplitude on each
    boundary circle, normalized against the continuum boundary measure.
    """
    if kind == "unit-disk":
        ns = np.arange(n_min, n_max + 1)
        lam = np.array([disk_mode_eigenvalue(c, n) for n in ns])
        coeff = np.where(ns == 0, 1.0 / np.sqrt(2 * np.pi),
                         1.0 / np.sqrt(np.pi))[:, None]
        return ns, lam, coeff
    if kind == "annulus":
        return _annulus_branches(r_inner, r_outer, c, n_max, n_min=n_min)
    raise ValueError(f"no exact spectral backend for domain kind {kind!r}")


def _require_circular(b, kind):
    dom = b.domain
    if dom.kind != kind:
        raise ValueError(
            f"exact backend requires a {kind} boundary, got {dom.kind!r}")


def exact_disk_dtn(b, c=0.0, n_modes=None):
    """Exact DtN eigenpairs on the unit disk with constant potential c.

    ``n_modes`` is the largest angular mode carried; it must stay below
    n_b/2 so the sampled trigonometric eigenvectors remain orthonormal
    under the node weights (no aliasing).

    Returns
    -------
    DtnOperator with provenance ``"exact-spectral"``.
    """
    _require_circular(b, "unit-disk")
    if c < 0:
        raise ValueError("constant potential must be nonnegative")
    n_b = b.n_nodes
    max_modes = (n_b - 1) // 2
    if n_modes is None:
        n_modes = max_modes
    if n_modes > max_modes:
        raise ValueError(
            f"n_modes={n_modes} aliases on {n_b} nodes; maximum is {max_modes}")

    th = b.params
    ns, lams, coeff = spectral_branches("unit-disk", c, n_modes)
    cols, vals = [], []
    for n, lam, cf in zip(ns, lams, coeff[:, 0]):
        if n == 0:
            cols.append(np.full(n_b, cf))
            vals.append(lam)
        else:
            cols.append(cf * np.cos(n * th))
            vals.append(lam)
            cols.append(cf * np.sin(n * th))
            vals.append(lam)
    vecs = np.stack(cols, axis=1)
    vals = np.array(vals)
    meta = {
        "exact": {"kind": "unit-disk", "c": float(c)},
        "constant_potential": float(c),
        "n_modes": int(n_modes),
    }
    return DtnOperator(vals, vecs, b, "exact-spectral", meta)


def exact_annulus_dtn(b, c=0.0, n_modes=None):
    """Exact DtN eigenpairs on an annulus with constant potential c.

    Separation of variables couples the two boundary circles through a
    2x2 problem per angular mode (hyperbolic functions of n log(b/a) for
    c = 0, modified-Bessel cross products for c > 0).

    Returns
    -------
    DtnOperator with provenance ``"exact-spectral"``.
    """
    _require_circular(b, "annulus")
    if c < 0:
        raise ValueError("constant potential must be nonnegative")
    dom = b.domain
    inner = b.component_indices(0)
    outer = b.component_indices(1)
    max_modes = (min(len(inner), len(outer)) - 1) // 2
    if n_modes is None:
        n_modes = max_modes
    if n_modes > max_modes:
        raise ValueError(
            f"n_modes={n_modes} aliases on ({len(inner)}, {len(outer)}) nodes; "
            f"maximum is {max_modes}")

    ns, lams, coeffs = spectral_branches(
        "annulus", c, n_modes, dom.r_inner, dom.r_outer)
    n_b = b.n_nodes
    th_in = b.params[inner]
    th_out = b.params[outer]
    cols, vals = [], []
    for n, lam, cf in zip(ns, lams, coeffs):
        if n == 0:
            v = np.empty(n_b)
            v[inner] = cf[0]
            v[outer] = cf[1]
            cols.append(v)
            vals.append(lam)
        else:
            for trig in (np.cos, np.sin):
                v = np.empty(n_b)
                v[inner] = cf[0] * trig(n * th_in)
                v[outer] = cf[1] * trig(n * th_out)
                cols.append(v)
                vals.append(lam)
    vecs = np.stack(cols, axis=1)
    vals = np.array(vals)
    order = np.argsort(vals, kind="stable")
    meta = {
        "exact": {"kind": "annulus", "c": float(c),
                  "r_inner": dom.r_inner, "r_outer": dom.r_outer},
        "constant_potential": float(c),
        "n_modes": int(n_modes),
    }
    return DtnOperator(vals[order], vecs[:, order], b, "exact-spectral", meta)


# ---------------------------------------------------------------------------
# coercivity


def coercivity_margin(system, n_samples=64, seed=0):
    """Fit constants (mu, omega) in the lower bound

        a_V(u, u) + omega ||trace u||^2  >=  mu ||u||_{W^{1,2}}^2

    over sampled extensions of random smooth boundary data (the constant
    trace is always included — it forces omega > 0 when V = 0).  Any
    omega large enough works with mu growing along with it, so the
    reported pair maximizes the normalized margin mu / (1 + omega); the
    whole fitted curve mu(omega) is returned alongside.

    Returns
    -------
    dict with keys ``mu``, ``omega``, ``n_samples``, ``omega_grid``,
    ``mu_curve``.
    """
    rng = np.random.default_rng(seed)
    b = system.boundary
    nb = len(system.boundary_idx)

    traces = [np.ones(nb)]
    for _ in range(n_samples - 1):
        phi = np.zeros(nb)
        for comp in range(b.n_components):
            idx = b.component_indices(comp)
            th = 2 * np.pi * b.arc[idx] / b.component_lengths[comp]
            phi_c = rng.standard_normal() * np.ones(len(idx))
            for m in range(1, 9):
                amp = rng.standard_normal(2) / (1 + m) ** 2
                phi_c += amp[0] * np.cos(m * th) + amp[1] * np.sin(m * th)
            phi[idx] = phi_c
        traces.append(phi)

    a_vals, tr_vals, w12_vals = [], [], []
    for phi in traces:
        u = harmonic_extension(system, phi).values
        a_vals.append(u @ (system.A @ u))
        tr_vals.append(phi @ (system.M_gamma * phi))
        w12_vals.append(u @ (system.A0 @ u) + u @ (system.M @ u))
    a_vals = np.array(a_vals)
    tr_vals = np.array(tr_vals)
    w12_vals = np.array(w12_vals)

    omegas = np.concatenate([[0.0], np.logspace(-3, 2, 41)])
    mus = np.array([((a_vals + om * tr_vals) / w12_vals).min()
                    for om in omegas])
    best = int(np.argmax(mus / (1.0 + omegas)))
    return {"mu": float(mus[best]), "omega": float(omegas[best]),
            "n_samples": int(n_samples),
            "omega_grid": omegas, "mu_curve": mus}
