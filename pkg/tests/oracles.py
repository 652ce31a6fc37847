"""Independent reference computations used to pin expected values.

Everything here deliberately avoids the package's own code paths:
eigenvalues come from radial ODE shooting, kernels from closed forms,
and quadrature identities from scipy.integrate.quad, so the tests
compare two genuinely different routes to each number.
"""

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import gamma


def disk_flux_ratio(c, n, r0=1e-7):
    """u'(1)/u(1) for u'' + u'/r = (n^2/r^2 + c) u, regular at r = 0.

    In x = log r the equation is u_xx = (n^2 + c e^{2x}) u; the regular
    branch starts as e^{n x} and the ratio is scale-free, so the series
    start is normalized to u(x0) ~ 1.
    """
    a = c / (4.0 * (n + 1.0))
    x0 = np.log(r0)
    u0 = 1.0 + a * np.exp(2 * x0)
    p0 = n + (n + 2.0) * a * np.exp(2 * x0)

    def rhs(x, y):
        return [y[1], (n * n + c * np.exp(2 * x)) * y[0]]

    sol = solve_ivp(rhs, (x0, 0.0), [u0, p0], rtol=1e-12, atol=1e-14,
                    method="DOP853")
    u, p = sol.y[:, -1]
    return p / u


def annulus_mode_eigs(a, b, c, n):
    """Per-mode flux-map eigenvalues on the annulus a < r < b.

    Shoots two independent solutions of u_xx = (n^2 + c e^{2x}) u across
    x in [log a, log b], forms the 2x2 map from boundary traces to
    outward fluxes, and returns its (real) eigenvalues sorted.
    """
    xa, xb = np.log(a), np.log(b)

    def rhs(x, y):
        return [y[1], (n * n + c * np.exp(2 * x)) * y[0]]

    s1 = solve_ivp(rhs, (xa, xb), [1.0, 0.0], rtol=1e-12, atol=1e-14,
                   method="DOP853")
    s2 = solve_ivp(rhs, (xa, xb), [0.0, 1.0], rtol=1e-12, atol=1e-14,
                   method="DOP853")
    y1b, p1b = s1.y[:, -1]
    y2b, p2b = s2.y[:, -1]
    B = np.array([[y1b / (a * y2b), -1.0 / (a * y2b)],
                  [(p1b - y1b * p2b / y2b) / b, p2b / (b * y2b)]])
    return np.sort(np.linalg.eigvals(B).real)


def poisson_profile(delta_theta, t):
    """Closed-form heat kernel of the flux map on the unit circle."""
    r = np.exp(-t)
    return ((1.0 - r * r)
            / (2 * np.pi * (1.0 - 2 * r * np.cos(delta_theta) + r * r)))


def half_power_density_integral(a, t):
    """quad of (4 pi)^{-1/2} t s^{-3/2} e^{-t^2/4s} e^{-s a^2} over s > 0.

    Equals e^{-t a} exactly; the quadrature value is the oracle.
    """

    def f(s):
        return (t / np.sqrt(4 * np.pi) * s ** -1.5
                * np.exp(-t * t / (4 * s) - s * a * a))

    return quad(f, 0, 1, limit=400)[0] + quad(f, 1, np.inf, limit=400)[0]


def weight_moment(beta):
    """Closed form 4^{-beta} Gamma(1/2 - beta) / sqrt(pi), beta < 1/2."""
    return 4.0 ** -beta * gamma(0.5 - beta) / np.sqrt(np.pi)


# Frozen values from the oracles above (12 digits, DOP853 rtol 1e-12).
DISK_C1_MODES = [0.446389965897, 1.240193723870, 2.163306117611,
                 3.123469314143, 4.099178382400, 5.082842407832]

# annulus radii (0.5, 1.0); per-mode pairs, modes 0..3
ANNULUS_C0_MODES = [(0.0, 4.328085122667),
                    (0.438447187191, 4.561552812809),
                    (1.513203773589, 5.286796226412),
                    (2.757088745365, 6.528625540349)]
ANNULUS_C2_MODES = [(0.479267024196, 4.504380644678),
                    (0.880032344563, 4.737018899058),
                    (1.867353349304, 5.459142717328),
                    (3.023089120361, 6.690565280913)]

WEIGHT_MOMENTS = {0.1: 1.089461392359, 0.25: 1.446409084632,
                  0.4: 3.082774380312}
