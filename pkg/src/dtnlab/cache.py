"""Disk cache for assembled operators.

Stores one ``.npz`` per operator (eigenvalues, eigenvectors, boundary
weights, metadata) keyed by a content hash of the domain, the potential,
the backend and the resolution.  Files carry a format version stamp; a
stale file is rebuilt with a warning rather than failing.

The cache directory defaults to ``~/.cache/dtnlab`` and can be overridden
by the ``DTNLAB_CACHE`` environment variable or per call.
"""

import hashlib
import json
import os
import warnings
from pathlib import Path

import numpy as np

from .geometry import build_boundary_space, make_domain
from .meshing import triangulate
from .operator import (DtnOperator, assemble_system, exact_annulus_dtn,
                       exact_disk_dtn, make_potential, schur_dtn)

CACHE_VERSION = 1


def default_cache_dir():
    """Cache directory: $DTNLAB_CACHE if set, else ~/.cache/dtnlab."""
    env = os.environ.get("DTNLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dtnlab"


def domain_signature(domain):
    """Canonical JSON-able description of a domain's geometry."""
    d = make_domain(domain)
    sig = {"kind": d.kind}
    if d.kind == "annulus":
        sig["r_inner"] = d.r_inner
        sig["r_outer"] = d.r_outer
    elif d.kind == "star-shaped":
        sig["a0"] = d.a0
        sig["cos"] = [float(c) for c in d.cos_coeffs]
        sig["sin"] = [float(s) for s in d.sin_coeffs]
    return sig


def potential_signature(potential, domain):
    """Canonical description of a potential.

    Constant potentials are described by their value; anything else is
    fingerprinted by its values on a fixed polar probe grid scaled to the
    domain, so two callables that agree on the domain share a cache entry.
    """
    p = make_potential(potential)
    c = p.constant_value()
    if c is not None:
        return {"kind": "constant", "value": float(c)}
    d = make_domain(domain)
    if d.kind == "annulus":
        radii = np.linspace(d.r_inner, d.r_outer, 17)
    elif d.kind == "star-shaped":
        radii = np.linspace(0.0, float(d.a0 + np.abs(d.cos_coeffs).sum()
                                       + np.abs(d.sin_coeffs).sum()), 17)
    else:
        radii = np.linspace(0.0, 1.0, 17)
    th = np.linspace(0.0, 2 * np.pi, 31, endpoint=False)
    rr, tt = np.meshgrid(radii, th)
    pts = np.stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()],
                   axis=-1)
    vals = p.evaluate(pts)
    digest = hashlib.sha256(np.ascontiguousarray(vals).tobytes()).hexdigest()
    return {"kind": p.kind, "samples_sha256": digest}


def cache_key(domain, potential, backend, resolution):
    """Content hash identifying one assembled operator."""
    payload = {
        "domain": domain_signature(domain),
        "potential": potential_signature(potential, domain),
        "backend": backend,
        "resolution": int(resolution),
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:24]


def save_operator(op, domain, potential, backend, resolution, cache_dir=None):
    """Write one operator to the cache; returns the file path."""
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / (cache_key(domain, potential, backend, resolution)
                        + ".npz")
    np.savez(
        path,
        version=np.int64(CACHE_VERSION),
        eigenvalues=op.eigenvalues,
        eigenvectors=op.eigenvectors,
        weights=op.weights,
        provenance=np.str_(op.provenance),
        meta=np.str_(json.dumps(op.meta, sort_keys=True)),
        domain=np.str_(json.dumps(domain_signature(domain), sort_keys=True)),
        n_nodes=np.int64(op.n_nodes),
    )
    return path


def load_operator(domain, potential, backend, resolution, cache_dir=None):
    """Fetch a cached operator, or None on a miss or a stale file."""
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    path = cache_dir / (cache_key(domain, potential, backend, resolution)
                        + ".npz")
    if not path.exists():
        return None
    with np.load(path, allow_pickle=False) as z:
        if int(z["version"]) != CACHE_VERSION:
            warnings.warn(
                f"cache file {path.name} has version {int(z['version'])}, "
                f"expected {CACHE_VERSION}; rebuilding", stacklevel=2)
            return None
        eigenvalues = z["eigenvalues"]
        eigenvectors = z["eigenvectors"]
        weights = z["weights"]
        provenance = str(z["provenance"])
        meta = json.loads(str(z["meta"]))
        n_nodes = int(z["n_nodes"])
    b = build_boundary_space(make_domain(domain), n_nodes)
    if not np.allclose(b.weights, weights, rtol=1e-12, atol=1e-15):
        warnings.warn(
            f"cache file {path.name} does not match the rebuilt boundary "
            "space; rebuilding", stacklevel=2)
        return None
    return DtnOperator(eigenvalues, eigenvectors, b, provenance, meta)


def build_operator(domain, potential, backend, resolution):
    """Assemble one operator from scratch.

    backend "exact" uses the spectral backends (disk or annulus with a
    constant potential); backend "fem" meshes the interior and takes the
    boundary flux map of the discrete harmonic extension.
    """
    d = make_domain(domain)
    p = make_potential(potential)
    b = build_boundary_space(d, resolution)
    if backend == "exact":
        c = p.constant_value()
        if c is None:
            raise ValueError(
                "exact backend requires a constant potential")
        if d.kind == "unit-disk":
            return exact_disk_dtn(b, c)
        if d.kind == "annulus":
            return exact_annulus_dtn(b, c)
        raise ValueError(
            f"exact backend supports disk and annulus, not {d.kind}")
    if backend == "fem":
        mesh = triangulate(d, b)
        system = assemble_system(mesh, b, p)
        return schur_dtn(system)
    raise ValueError(f"unknown backend {backend!r} (use 'exact' or 'fem')")


def fetch_operator(domain, potential, backend, resolution, cache_dir=None,
                   use_cache=True):
    """Load from cache or build and store; returns (operator, source).

    ``source`` is "cache" on a hit, "built" otherwise.  With
    ``use_cache=False`` nothing is read or written.
    """
    if use_cache:
        op = load_operator(domain, potential, backend, resolution, cache_dir)
        if op is not None:
            return op, "cache"
    op = build_operator(domain, potential, backend, resolution)
    if use_cache:
        save_operator(op, domain, potential, backend, resolution, cache_dir)
    return op, "built"
