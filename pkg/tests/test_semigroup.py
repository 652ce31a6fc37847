import numpy as np
import pytest

from dtnlab import (apply_semigroup, commutator, disk_poisson_kernel,
                    duhamel_residual, kernel_matrix, modes_for_time,
                    power_semigroup, spectral_multiplier, subordinate,
                    subordination_moment)

from oracles import (WEIGHT_MOMENTS, half_power_density_integral,
                     poisson_profile, weight_moment)


def random_trace(op, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(op.n_nodes)


def test_semigroup_law(disk_op1):
    phi = random_trace(disk_op1)
    once = apply_semigroup(disk_op1, 0.7, phi)
    twice = apply_semigroup(disk_op1, 0.3, apply_semigroup(disk_op1, 0.4, phi))
    assert np.allclose(once, twice, atol=1e-12)
    # complex times compose as well
    za, zb = 0.2 + 0.1j, 0.5 - 0.05j
    lhs = apply_semigroup(disk_op1, za + zb, phi.astype(complex))
    rhs = apply_semigroup(disk_op1, za, apply_semigroup(disk_op1, zb, phi))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_time_zero_and_rejections(disk_op0):
    phi = random_trace(disk_op0)
    assert np.array_equal(apply_semigroup(disk_op0, 0.0, phi), phi)
    with pytest.raises(ValueError, match="positive real part"):
        apply_semigroup(disk_op0, -0.1, phi)
    with pytest.raises(ValueError, match="positive real part"):
        kernel_matrix(disk_op0, -1.0 + 0.5j)
    with pytest.raises(ValueError):
        kernel_matrix(disk_op0, 0.0)


def test_real_time_output_is_real(disk_op1):
    phi = random_trace(disk_op1)
    out = apply_semigroup(disk_op1, 0.5, phi)
    assert out.dtype.kind == "f"
    K = kernel_matrix(disk_op1, 0.5)
    assert K.values.dtype.kind == "f"


def test_kernel_matches_closed_form(disk_op0):
    b = disk_op0.boundary
    for t in (0.1, 0.5, 2.0):
        K = kernel_matrix(disk_op0, t).values
        dth = b.params[:, None] - b.params[None, :]
        assert np.abs(K - poisson_profile(dth, t)).max() < 1e-12


def test_disk_poisson_kernel_helper():
    dth = np.linspace(0, np.pi, 9)
    assert np.allclose(disk_poisson_kernel(dth, 0.3),
                       poisson_profile(dth, 0.3), atol=1e-14)


def test_kernel_row_sums(disk_op0, disk_op1):
    b = disk_op0.boundary
    K0 = kernel_matrix(disk_op0, 0.5).values
    assert np.allclose(K0 @ b.weights, 1.0, atol=1e-12)
    K1 = kernel_matrix(disk_op1, 0.5).values
    s = K1 @ b.weights
    assert (s < 1.0).all()
    assert (K1 > 0).all()


def test_kernel_symmetry_and_conjugation(disk_op1):
    z = 0.4 + 0.3j
    K = kernel_matrix(disk_op1, z).values
    assert np.allclose(K, K.T, atol=1e-12)
    Kc = kernel_matrix(disk_op1, np.conjugate(z)).values
    assert np.allclose(Kc, np.conjugate(K), atol=1e-12)


def test_kernel_quadrature_identity(disk_op1):
    # K_{s+t} = K_s W K_t: the quadrature reproduces the flow composition
    b = disk_op1.boundary
    Ks = kernel_matrix(disk_op1, 0.3).values
    Kt = kernel_matrix(disk_op1, 0.9).values
    Kst = kernel_matrix(disk_op1, 1.2).values
    assert np.abs(Ks @ (b.weights[:, None] * Kt) - Kst).max() < 1e-12


def test_fem_kernel_agrees_with_exact(fem_disk_bundle, disk_op0):
    *_, fem = fem_disk_bundle
    for t in (0.5, 2.0):
        Kf = kernel_matrix(fem, t).values
        Ke = kernel_matrix(disk_op0, t).values
        assert np.abs(Kf - Ke).max() < 2e-3


def test_spectral_multiplier(disk_op1):
    phi = random_trace(disk_op1)
    out = spectral_multiplier(disk_op1, lambda lam: np.exp(-0.5 * lam), phi)
    assert np.allclose(out, apply_semigroup(disk_op1, 0.5, phi), atol=1e-12)
    with pytest.raises(ValueError, match="undefined at eigenvalue"):
        spectral_multiplier(disk_op1, lambda lam: 1.0 / (lam - lam[1]), phi)


def test_imaginary_powers_contract(disk_op0):
    # lam^{is} has unit modulus away from zero; with the zero mode pinned
    # to 1 the multiplier preserves the weighted L2 norm
    b = disk_op0.boundary
    phi = random_trace(disk_op0)
    # project onto the resolved span first (127 eigenpairs on 128 nodes)
    V = disk_op0.eigenvectors
    phi = V @ (V.T @ (b.weights * phi))
    out = spectral_multiplier(disk_op0, lambda lam: lam ** 0.7j, phi,
                              value_at_zero=1.0)
    n_in = np.sqrt(b.weights @ np.abs(phi) ** 2)
    n_out = np.sqrt(b.weights @ np.abs(out) ** 2)
    assert n_out == pytest.approx(n_in, rel=1e-10)


def test_power_semigroup_shift(disk_op1):
    # m = 1 flow is e^{-z} times the plain semigroup
    phi = random_trace(disk_op1)
    lhs = power_semigroup(disk_op1, 1, 0.8, phi)
    rhs = np.exp(-0.8) * apply_semigroup(disk_op1, 0.8, phi)
    assert np.allclose(lhs, rhs, atol=1e-12)
    with pytest.raises(ValueError, match="positive integer"):
        power_semigroup(disk_op1, 0, 0.5, phi)


def test_subordination_round_trip(disk_op1):
    phi = random_trace(disk_op1)
    for z in (0.7, 2.0, 0.5 * np.exp(0.45j * np.pi)):
        direct = power_semigroup(disk_op1, 1, z, phi.astype(complex))
        sub = subordinate(disk_op1, 1, z, phi.astype(complex))
        assert np.abs(direct - sub).max() < 1e-10
    # m = 2: half-power of the fourth-power flow
    direct2 = power_semigroup(disk_op1, 2, 0.9, phi)
    sub2 = subordinate(disk_op1, 2, 0.9, phi)
    assert np.abs(direct2 - sub2).max() < 1e-10


def test_subordination_scalar_identity():
    for t in (0.1, 1.0):
        for a in (0.0, 0.5, 1.0, 5.0):
            val = half_power_density_integral(a, t)
            assert abs(val - np.exp(-t * a)) < 1e-10


def test_laguerre_scheme_reports_its_error(disk_op1):
    phi = random_trace(disk_op1)
    with pytest.raises(ValueError, match="did not converge"):
        subordinate(disk_op1, 1, 0.5, phi,
                    quadrature={"scheme": "gauss-laguerre", "n": 200})
    # honest at a loose tolerance
    out = subordinate(disk_op1, 1, 0.5, phi,
                      quadrature={"scheme": "gauss-laguerre", "n": 200,
                                  "tol": 1e-3})
    ref = power_semigroup(disk_op1, 1, 0.5, phi)
    assert np.abs(out - ref).max() < 1e-3


def test_subordination_moments():
    for beta, frozen in WEIGHT_MOMENTS.items():
        got = subordination_moment(beta)
        assert got == pytest.approx(frozen, rel=1e-9)
        assert got == pytest.approx(weight_moment(beta), rel=1e-9)
    with pytest.raises(ValueError):
        subordination_moment(0.5)


def test_commutator_entries(disk_op0):
    E = kernel_matrix(disk_op0, 0.5)
    g = np.sin(disk_op0.boundary.params)
    C = commutator(E, g)
    expected = (g[:, None] - g[None, :]) * E.values
    assert np.allclose(C, expected, atol=1e-14)


def test_duhamel_residuals():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((4, 4))
    A = 0.5 * (A + A.T)
    B = np.diag(rng.standard_normal(4))
    assert duhamel_residual(A, B, 0.3, n=1) < 1e-12
    assert duhamel_residual(A, B, 0.3, n=2) < 1e-10
    # commuting pair: the expansion is exact at every order
    B2 = 2.0 * A + np.eye(4)
    assert duhamel_residual(A, B2, 0.3, n=1) < 1e-13
    assert duhamel_residual(A, B2, 0.5 + 0.2j, n=2) < 1e-13


def test_modes_for_time():
    assert modes_for_time(1e-3) > modes_for_time(1.0)
    assert modes_for_time(100.0) >= 8
    # halving the rate doubles the requirement
    assert modes_for_time(0.01, rate=0.5) == pytest.approx(
        2 * modes_for_time(0.01, rate=1.0), rel=0.01)


def test_kernel_truncation_matches_dense(disk_op1):
    # circulant fast path equals the dense eigenvector path
    K_fast = kernel_matrix(disk_op1, 0.4).values
    V = disk_op1.eigenvectors
    E = np.exp(-0.4 * disk_op1.eigenvalues)
    K_dense = (V * E) @ V.T
    assert np.abs(K_fast - K_dense).max() < 1e-10
