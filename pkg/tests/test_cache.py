"""Operator cache: keys, round trips, staleness handling."""

import json

import numpy as np
import pytest

from dtnlab import (CACHE_VERSION, build_operator, cache_key,
                    default_cache_dir, fetch_operator, kernel_matrix,
                    load_operator, save_operator)
from dtnlab.cache import domain_signature, potential_signature


def test_cache_key_is_stable_and_discriminating():
    k = cache_key("unit-disk", 0.0, "exact", 128)
    assert len(k) == 24
    assert k == cache_key("unit-disk", 0.0, "exact", 128)
    # every ingredient moves the key
    assert k != cache_key("unit-disk", 1.0, "exact", 128)
    assert k != cache_key("unit-disk", 0.0, "fem", 128)
    assert k != cache_key("unit-disk", 0.0, "exact", 96)
    assert k != cache_key(("annulus", 0.5, 1.0), 0.0, "exact", 128)


def test_potential_signature_fingerprints_callables():
    # constants are stored by value, not by identity
    s0 = potential_signature(0.0, "unit-disk")
    assert s0 == {"kind": "constant", "value": 0.0}
    f = lambda x, y: 1.0 + x**2
    g = lambda x, y: 1.0 + x * x
    sf = potential_signature(f, "unit-disk")
    sg = potential_signature(g, "unit-disk")
    assert sf == sg  # same values on the probe grid, same entry
    sh = potential_signature(lambda x, y: 2.0 + x**2, "unit-disk")
    assert sh != sf
    sig = domain_signature(("annulus", 0.5, 1.0))
    assert sig == {"kind": "annulus", "r_inner": 0.5, "r_outer": 1.0}


def test_default_cache_dir_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("DTNLAB_CACHE", str(tmp_path / "alt"))
    assert default_cache_dir() == tmp_path / "alt"
    monkeypatch.delenv("DTNLAB_CACHE")
    assert default_cache_dir().name == "dtnlab"


def test_round_trip_reproduces_operator(tmp_path):
    op = build_operator("unit-disk", 1.0, "exact", 64)
    path = save_operator(op, "unit-disk", 1.0, "exact", 64, cache_dir=tmp_path)
    assert path.exists() and path.suffix == ".npz"
    back = load_operator("unit-disk", 1.0, "exact", 64, cache_dir=tmp_path)
    assert back is not None
    np.testing.assert_array_equal(back.eigenvalues, op.eigenvalues)
    np.testing.assert_array_equal(back.eigenvectors, op.eigenvectors)
    assert back.provenance == op.provenance
    assert back.meta == op.meta
    # kernels agree bit for bit
    K1 = kernel_matrix(op, 0.5).values
    K2 = kernel_matrix(back, 0.5).values
    np.testing.assert_array_equal(K1, K2)


def test_load_misses_return_none(tmp_path):
    assert load_operator("unit-disk", 3.0, "exact", 64, cache_dir=tmp_path) is None


def test_stale_version_warns_and_rebuilds(tmp_path):
    op = build_operator("unit-disk", 0.0, "exact", 64)
    path = save_operator(op, "unit-disk", 0.0, "exact", 64, cache_dir=tmp_path)
    with np.load(path, allow_pickle=False) as z:
        data = dict(z)
    data["version"] = np.int64(CACHE_VERSION + 1)
    np.savez(path, **data)
    with pytest.warns(UserWarning, match="version"):
        assert load_operator("unit-disk", 0.0, "exact", 64,
                             cache_dir=tmp_path) is None
    # fetch transparently rebuilds and refreshes the file
    with pytest.warns(UserWarning, match="version"):
        op2, source = fetch_operator("unit-disk", 0.0, "exact", 64,
                                     cache_dir=tmp_path)
    assert source == "built"
    op3, source = fetch_operator("unit-disk", 0.0, "exact", 64,
                                 cache_dir=tmp_path)
    assert source == "cache"
    np.testing.assert_array_equal(op2.eigenvalues, op3.eigenvalues)


def test_corrupt_weights_warn_and_rebuild(tmp_path):
    op = build_operator("unit-disk", 0.0, "exact", 64)
    path = save_operator(op, "unit-disk", 0.0, "exact", 64, cache_dir=tmp_path)
    with np.load(path, allow_pickle=False) as z:
        data = dict(z)
    data["weights"] = data["weights"] * 1.001
    np.savez(path, **data)
    with pytest.warns(UserWarning, match="boundary"):
        assert load_operator("unit-disk", 0.0, "exact", 64,
                             cache_dir=tmp_path) is None


def test_fetch_operator_cold_then_hot(tmp_path):
    op1, src1 = fetch_operator(("annulus", 0.5, 1.0), 2.0, "exact", 96,
                               cache_dir=tmp_path)
    op2, src2 = fetch_operator(("annulus", 0.5, 1.0), 2.0, "exact", 96,
                               cache_dir=tmp_path)
    assert (src1, src2) == ("built", "cache")
    np.testing.assert_array_equal(op1.eigenvalues, op2.eigenvalues)
    np.testing.assert_array_equal(op1.eigenvectors, op2.eigenvectors)
    op3, src3 = fetch_operator(("annulus", 0.5, 1.0), 2.0, "exact", 96,
                               cache_dir=tmp_path, use_cache=False)
    assert src3 == "built"
    np.testing.assert_allclose(op3.eigenvalues, op1.eigenvalues, rtol=1e-14)


def test_build_operator_validation(tmp_path):
    with pytest.raises(ValueError, match="constant potential"):
        build_operator("unit-disk", lambda x, y: x**2, "exact", 64)
    with pytest.raises(ValueError, match="unknown backend"):
        build_operator("unit-disk", 0.0, "spectral", 64)
    star = {"kind": "star-shaped", "a0": 1.0, "cos": [0.1], "sin": []}
    with pytest.raises(ValueError, match="disk and annulus"):
        build_operator(star, 0.0, "exact", 64)
    # the fem backend accepts any domain and potential
    op = build_operator(star, 0.5, "fem", 64)
    assert op.provenance == "fem-schur"
    assert op.n_nodes == 64


def test_fem_cache_round_trip(tmp_path):
    op, src = fetch_operator("unit-disk", 1.0, "fem", 64, cache_dir=tmp_path)
    assert src == "built"
    back, src2 = fetch_operator("unit-disk", 1.0, "fem", 64, cache_dir=tmp_path)
    assert src2 == "cache"
    np.testing.assert_array_equal(back.eigenvalues, op.eigenvalues)
    assert back.provenance == "fem-schur"
    K1 = kernel_matrix(op, 1.0).values
    K2 = kernel_matrix(back, 1.0).values
    np.testing.assert_array_equal(K1, K2)
