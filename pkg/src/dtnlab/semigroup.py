"""Semigroup calculus for discrete Dirichlet-to-Neumann operators.

Everything here is exact spectral calculus on a :class:`DtnOperator` —
no time stepping.  Complex time z with Re z > 0 is allowed throughout
(the generator is a finite symmetric matrix, so e^{-z N} is entire in z;
the half-plane restriction mirrors the continuum object being modeled).

The kernel of the flow, K_z(x, y) = sum_k e^{-z lam_k} phi_k(x) phi_k(y),
is assembled densely from the eigenpairs, except on exact circular
backends where the angular-mode structure gives the far cheaper cosine
series — that path also extends the mode sum well past the node count,
which matters for small times.
"""

from __future__ import annotations

from math import factorial
from itertools import product as iproduct

import numpy as np
from scipy.linalg import expm
from scipy.special import roots_laguerre

from .operator import DtnOperator, spectral_branches

__all__ = [
    "require_time",
    "KernelMatrix",
    "apply_semigroup",
    "kernel_matrix",
    "modes_for_time",
    "power_semigroup",
    "subordinate",
    "subordination_moment",
    "spectral_multiplier",
    "commutator",
    "duhamel_residual",
    "disk_poisson_kernel",
]


def require_time(z, allow_zero=False):
    """Validate a (complex) time for the flow: Re z > 0, or z = 0 if allowed."""
    z = complex(z)
    if z == 0:
        if allow_zero:
            return z
        raise ValueError("time must have positive real part; got 0")
    if z.real <= 0:
        raise ValueError(
            f"time must have positive real part; got {z} "
            f"(angle {np.angle(z) / np.pi:.3f} pi)")
    return z


def _coef(op, phi):
    phi = np.asarray(phi)
    if phi.shape != (op.n_nodes,):
        raise ValueError(f"expected {op.n_nodes} boundary values, got {phi.shape}")
    return op.eigenvectors.T @ (op.weights * phi)


def apply_semigroup(op, z, phi):
    """e^{-z N} phi by spectral calculus.  z = 0 returns phi unchanged."""
    z = require_time(z, allow_zero=True)
    if z == 0:
        return np.array(phi, copy=True)
    factors = np.exp(-z * op.eigenvalues)
    if z.imag == 0:
        factors = factors.real
    return op.eigenvectors @ (factors * _coef(op, phi))


def power_semigroup(op, m, z, phi):
    """e^{-z (N + I)^m} phi — the flow generated by the m-th power of N + I."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"power must be a positive integer, got {m}")
    z = require_time(z, allow_zero=True)
    if z == 0:
        return np.array(phi, copy=True)
    factors = np.exp(-z * (op.eigenvalues + 1.0) ** m)
    if z.imag == 0:
        factors = factors.real
    return op.eigenvectors @ (factors * _coef(op, phi))


def spectral_multiplier(op, f, phi, value_at_zero=None):
    """f(N) phi for a scalar function f evaluated on the spectrum.

    ``value_at_zero`` overrides f at (numerically) zero eigenvalues, for
    power-type multipliers undefined at the origin.
    """
    lam = op.eigenvalues
    with np.errstate(all="ignore"):
        try:
            vals = np.asarray(f(lam))
            if vals.shape != lam.shape:
                raise TypeError
        except Exception:
            vals = np.array([f(l) for l in lam])
    vals = vals.astype(complex) if np.iscomplexobj(vals) else vals.astype(float)
    if value_at_zero is not None:
        vals = np.where(np.abs(lam) < 1e-12, value_at_zero, vals)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(np.argmax(bad))
        raise ValueError(
            f"multiplier undefined at eigenvalue lambda_{k} = {lam[k]:.6g}")
    return op.eigenvectors @ (vals * _coef(op, phi))


# ---------------------------------------------------------------------------
# kernels


class KernelMatrix:
    """Kernel values K_z(x_a, x_b) on all boundary node pairs.

    values : (n_b, n_b) array, real for real z, complex otherwise; symmetric
    z : the (complex) time
    provenance : which construction produced it
    meta : mode counts / truncation details
    """

    def __init__(self, values, z, provenance, meta=None):
        self.values = values
        self.z = z
        self.provenance = provenance
        self.meta = meta or {}

    @property
    def n_nodes(self):
        return self.values.shape[0]

    def __repr__(self):
        return f"KernelMatrix(z={self.z}, n={self.n_nodes}, {self.provenance})"


def modes_for_time(t, tol=1e-14, rate=1.0):
    """Angular modes needed so the e^{-t*rate*n} tail drops below tol."""
    if t <= 0:
        raise ValueError("need a positive decay time")
    return max(8, int(np.ceil(np.log(1.0 / tol) / (t * rate))))


_branch_cache = {}


def _branches_upto(key, kind, c, n_max, r_inner=None, r_outer=None):
    """Mode-major spectral branches, cached and extended incrementally
    (the deep annulus modes with a potential are the expensive ones)."""
    cached = _branch_cache.get(key)
    if cached is not None and cached[0] >= n_max:
        ns, lams, coeffs = cached[1]
        keep = ns <= n_max
        return ns[keep], lams[keep], coeffs[keep]
    if cached is not None and kind == "annulus":
        start = cached[0] + 1
        ns2, lams2, coeffs2 = spectral_branches(
            kind, c, n_max, r_inner=r_inner, r_outer=r_outer,
            n_min=start)
        ns0, lams0, coeffs0 = cached[1]
        data = (np.concatenate([ns0, ns2]),
                np.concatenate([lams0, lams2]),
                np.concatenate([coeffs0, coeffs2]))
    else:
        ns, lams, coeffs = spectral_branches(kind, c, n_max,
                                             r_inner=r_inner, r_outer=r_outer)
        order = np.argsort(ns, kind="stable")
        data = (ns[order], lams[order], coeffs[order])
    _branch_cache[key] = (n_max, data)
    return data


def _exact_kernel(op, z, tol):
    info = op.meta["exact"]
    kind = info["kind"]
    c = info["c"]
    b = op.boundary
    if kind == "unit-disk":
        rate = 1.0
        key = ("unit-disk", c)
        n_max = modes_for_time(z.real, tol, rate)
        ns, lams, coeffs = _branches_upto(key, kind, c, n_max)
        th = b.params
        # same uniform grid: the kernel is a function of theta_i - theta_j
        n_b = b.n_nodes
        dth = 2 * np.pi * np.arange(n_b) / n_b
        w = np.exp(-z * lams) * coeffs[:, 0] ** 2
        prof = w @ np.cos(np.outer(ns, dth))
        idx = (np.arange(n_b)[:, None] - np.arange(n_b)[None, :]) % n_b
        K = prof[idx]
        meta = {"path": "exact-circulant", "n_modes": int(n_max), "tol": tol}
        return K, meta

    a, r_out = info["r_inner"], info["r_outer"]
    key = ("annulus", a, r_out, c)
    rate = 1.0 / r_out
    n_max = modes_for_time(z.real, tol, rate)
    ns, lams, coeffs = _branches_upto(key, kind, c, n_max, a, r_out)
    n_b = b.n_nodes
    K = np.zeros((n_b, n_b), complex)
    for ci in range(2):
        for cj in range(ci, 2):
            ii = b.component_indices(ci)
            jj = b.component_indices(cj)
            th_i = b.params[ii]
            th_j = b.params[jj]
            wgt = np.exp(-z * lams) * coeffs[:, ci] * coeffs[:, cj]
            keep = np.abs(wgt) > 0.0
            block = np.zeros((len(ii), len(jj)), complex)
            dth = th_i[:, None] - th_j[None, :]
            step = 256
            nz = np.where(keep)[0]
            for s0 in range(0, len(nz), step):
                sel = nz[s0:s0 + step]
                block += np.einsum("m,mij->ij", wgt[sel],
                                   np.cos(ns[sel][:, None, None] * dth[None]))
            K[np.ix_(ii, jj)] = block
            if cj != ci:
                K[np.ix_(jj, ii)] = block.T
    meta = {"path": "exact-mode-sum", "n_modes": int(n_max), "tol": tol}
    return K, meta


def kernel_matrix(op, z, tol=1e-14):
    """Kernel of e^{-z N} on all boundary node pairs.

    Exact circular backends sum the angular-mode cosine series with an
    adaptive mode count (tail below ``tol`` at Re z); other operators use
    the dense eigenpair expansion, valid down to times where the stored
    spectrum still resolves the kernel.
    """
    z = require_time(z)
    if op.provenance == "exact-spectral" and "exact" in op.meta:
        K, meta = _exact_kernel(op, z, tol)
    else:
        factors = np.exp(-z * op.eigenvalues)
        K = (op.eigenvectors * factors[None, :]) @ op.eigenvectors.T
        meta = {"path": "dense-spectral", "n_modes": op.n_eigenpairs}
    if z.imag == 0:
        K = K.real
    K = 0.5 * (K + K.T)
    return KernelMatrix(K, z, op.provenance, meta)


def disk_poisson_kernel(delta_theta, z):
    """Closed-form unit-disk kernel (no potential) at angular offset.

    With r = e^{-z}:  (1/2pi) (1 - r^2) / (1 - 2 r cos(dtheta) + r^2).
    Valid for any complex z with Re z > 0.
    """
    z = require_time(z)
    r = np.exp(-z)
    d = np.asarray(delta_theta, float)
    val = (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(d) + r * r) / (2 * np.pi)
    if z.imag == 0:
        val = val.real
    return val


# ---------------------------------------------------------------------------
# subordination


def _subordination_factors(z, a_vals, h0=0.1):
    """exp(-z a) for a >= 0 via the inverse-square-root subordination
    integral, log-substituted trapezoid on a rotated contour.

    Returns (values, error_estimate) — the estimate compares step h
    against 2h.
    """
    theta = np.angle(z)
    if abs(theta) >= np.pi / 2:
        raise ValueError(f"subordination needs |arg z| < pi/2, got {z}")
    h = h0 / max(1.0, np.tan(abs(theta)))
    x_lo = -np.log(60.0 / np.cos(theta))
    x = np.arange(x_lo, 92.0 + h, h)
    eith = np.exp(1j * theta)
    c = (np.abs(z) * np.asarray(a_vals, float) / 2.0) ** 2
    expo = (-x[:, None] / 2.0 - eith * np.exp(-x)[:, None]
            - eith * np.outer(np.exp(x), c))
    integ = np.exp(expo)
    pref = np.exp(1j * theta / 2.0) / np.sqrt(np.pi)
    fine = pref * integ.sum(axis=0) * h
    coarse = pref * integ[::2].sum(axis=0) * (2 * h)
    est = np.abs(fine - coarse).max()
    return fine, est


def _subordination_factors_laguerre(z, a_vals, n_nodes=200):
    """Same integral by generalized Gauss-Laguerre after s = |z|^2 u / 4."""
    theta = np.angle(z)
    if abs(theta) >= np.pi / 2:
        raise ValueError(f"subordination needs |arg z| < pi/2, got {z}")
    u, w = roots_laguerre(n_nodes)
    eith = np.exp(1j * theta)
    c = (np.abs(z) * np.asarray(a_vals, float) / 2.0) ** 2

    def quad(uu, ww):
        expo = -eith / uu[:, None] - eith * np.outer(uu, c) + uu[:, None]
        # the e^{+u} factor undoes the Laguerre weight; cap it so the far
        # nodes (weights ~ e^{-u}) cannot overflow to inf * 0
        expo = np.minimum(expo.real, 700.0) + 1j * expo.imag
        f = uu[:, None] ** -1.5 * np.exp(expo)
        return np.exp(1j * theta / 2.0) / np.sqrt(np.pi) * (ww @ f)

    fine = quad(u, w)
    u2, w2 = roots_laguerre(n_nodes // 2)
    est = np.abs(fine - quad(u2, w2)).max()
    return fine, est


def subordinate(op, m, z, phi, quadrature=None):
    """e^{-z (N+I)^m} phi obtained by subordinating the squared flow.

    Integrates mu_z(s) e^{-s (N+I)^{2m}} phi ds, which must reproduce
    ``power_semigroup(op, m, z, phi)``.  The default quadrature is a
    log-substituted trapezoid rule (machine precision over the whole
    right half-plane); ``{"scheme": "gauss-laguerre", "n": 200}`` selects
    the classical-node alternative.  A nested error estimate above the
    tolerance raises with the estimate in the message.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"power must be a positive integer, got {m}")
    z = require_time(z)
    q = dict(quadrature or {})
    scheme = q.get("scheme", "log-trapezoid")
    tol = q.get("tol", 1e-8)
    a_vals = (op.eigenvalues + 1.0) ** m
    if scheme == "log-trapezoid":
        factors, est = _subordination_factors(z, a_vals, h0=q.get("h", 0.1))
    elif scheme == "gauss-laguerre":
        factors, est = _subordination_factors_laguerre(z, a_vals,
                                                       n_nodes=q.get("n", 200))
    else:
        raise ValueError(f"unknown quadrature scheme {scheme!r}")
    if est > tol:
        raise ValueError(
            f"subordination quadrature did not converge: error estimate "
            f"{est:.3e} > tolerance {tol:.1e}")
    if z.imag == 0:
        factors = factors.real
    return op.eigenvectors @ (factors * _coef(op, phi))


def subordination_moment(beta, h=0.02):
    """Moment integral of the subordination density at unit time,

        int_0^inf (1/sqrt(4 pi)) s^{-3/2} e^{-1/4s} s^beta ds,

    by log-substituted trapezoid.  Finite only for beta < 1/2.
    """
    if beta >= 0.5:
        raise ValueError(f"moment diverges for beta >= 1/2, got {beta}")
    # s = e^x: integrand (1 / 2 sqrt(pi)) e^{x (beta - 1/2)} e^{-e^{-x}/4};
    # upper range set by the e^{-x (1/2 - beta)} tail
    x_hi = 40.0 / (0.5 - beta)
    x = np.arange(-10.0, x_hi, h)
    integ = np.exp(x * (beta - 0.5) - np.exp(-x) / 4.0)
    return float(integ.sum() * h / (2 * np.sqrt(np.pi)))


# ---------------------------------------------------------------------------
# commutators


def commutator(E, g):
    """Entrywise commutator [M_g, E]: (g(x_a) - g(x_b)) E_ab.

    ``E`` may be a matrix, a KernelMatrix, or a DtnOperator (its dense
    matrix is used); ``g`` a node-value array or a witness object with a
    ``values`` attribute.  Iterating d times multiplies by the d-th power
    of the node-value differences.
    """
    if isinstance(E, KernelMatrix):
        E = E.values
    elif isinstance(E, DtnOperator):
        E = E.as_matrix()
    E = np.asarray(E)
    vals = np.asarray(getattr(g, "values", g), float)
    if vals.shape != (E.shape[0],):
        raise ValueError(f"witness has {vals.shape} values for {E.shape} matrix")
    return (vals[:, None] - vals[None, :]) * E


# ---------------------------------------------------------------------------
# expansion of iterated commutators of the flow


def _compositions(n, k):
    """Ordered tuples of k positive integers summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _simplex_nodes(k, n_quad):
    """Tensor-product Gauss nodes on the open k-simplex.

    Iterated substitution t_1 = x_1, t_2 = x_2 (1 - x_1), ... maps the
    cube onto the simplex; the weight picks up the remainder Jacobians.
    Yields (t values of length k+1 summing to 1, weight).
    """
    x, w = np.polynomial.legendre.leggauss(n_quad)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    for idx in iproduct(range(n_quad), repeat=k):
        t = []
        rem = 1.0
        wt = 1.0
        for d in range(k):
            xi = x[idx[d]]
            wt *= w[idx[d]] * rem
            t.append(xi * rem)
            rem *= 1.0 - xi
        t.append(rem)
        yield t, wt


def duhamel_residual(A, B, z, n=1, n_quad=64):
    """Check the simplex-integral expansion of iterated commutators of e^{-zA}.

    The n-th commutator of the flow with the multiplication-type matrix B,
    computed directly as nested [B, .] of the matrix exponential, is
    compared with the sum over orders k <= n of

        (-z)^k sum over compositions (j_1..j_k) of n, with multiplicity
        n!/(j_1! ... j_k!), of the simplex integral of
        T_{t_{k+1} z} C_{j_k} T_{t_k z} ... C_{j_1} T_{t_1 z},

    where C_j is the j-fold commutator of B with A.  Returns the operator
    norm of the difference (caller judges adequacy of the quadrature).
    """
    if n < 1:
        raise ValueError("expansion order must be >= 1")
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("need two square matrices of equal size")
    z = require_time(z)

    def delta(E, j):
        for _ in range(j):
            E = B @ E - E @ B
        return E

    direct = delta(expm(-z * A), n)

    dim = A.shape[0]
    total = np.zeros((dim, dim), complex)
    exp_cache = {}

    def flow(t):
        key = round(t, 15)
        if key not in exp_cache:
            exp_cache[key] = expm(-t * z * A)
        return exp_cache[key]

    for k in range(1, n + 1):
        comm_pows = {j: delta(A, j) for j in range(1, n + 1)}
        for js in _compositions(n, k):
            mult = factorial(n)
            for j in js:
                mult //= factorial(j)
            acc = np.zeros((dim, dim), complex)
            for t, wt in _simplex_nodes(k, n_quad):
                M = flow(t[0])
                for i in range(k):
                    M = flow(t[i + 1]) @ comm_pows[js[i]] @ M
                acc += wt * M
            total += (-z) ** k * mult * acc
    return float(np.linalg.norm(direct - total, 2))
