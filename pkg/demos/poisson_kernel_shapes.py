"""Shapes of the boundary heat kernel across time scales.

e^{-tN} on the circle (no potential) is convolution by the Poisson
kernel for radius e^{-t}: a spike of height ~ 1/(pi t) that spreads and
flattens toward the uniform density 1/(2 pi).  The script prints kernel
sections at several times, checks them against the closed form, and
shows how the off-diagonal decay matches the (1 + dist/t)^{-2} profile
that all the bound checks in dtnlab.verify are built on.

Run:
    python3 demos/poisson_kernel_shapes.py
    python3 demos/poisson_kernel_shapes.py --n 256 --plot kernel.png
"""

import argparse

import numpy as np

from dtnlab import (build_boundary_space, disk_poisson_kernel, exact_disk_dtn,
                    kernel_matrix, make_domain)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=128, help="boundary nodes")
    ap.add_argument("--times", type=float, nargs="+",
                    default=[0.01, 0.1, 0.5, 2.0])
    ap.add_argument("--plot", help="write kernel sections to this file")
    args = ap.parse_args()

    b = build_boundary_space(make_domain("unit-disk"), args.n)
    op = exact_disk_dtn(b)
    th = b.params

    print(f"{'t':>6} {'K_t(x,x)':>12} {'1/(pi t)':>12} "
          f"{'closed-form err':>16} {'row sum':>10}")
    for t in args.times:
        K = kernel_matrix(op, t).values
        closed = disk_poisson_kernel(th[:, None] - th[None, :], t)
        err = np.abs(K - closed).max()
        row = float(K[0] @ b.weights)
        print(f"{t:>6} {K[0, 0]:>12.4f} {1/(np.pi*t):>12.4f} "
              f"{err:>16.2e} {row:>10.6f}")
    h = 2 * np.pi / args.n
    print(f"\nthe diagonal follows 1/(pi t) until t ~ 1, then saturates at "
          f"the uniform\ndensity; rows integrate to one (mass conservation) "
          f"once t clears the node\nspacing h = {h:.3f} - below that the "
          f"trapezoid rule cannot resolve the peak\nand overshoots, even "
          f"though the kernel values themselves stay exact")

    # off-diagonal decay vs the reference profile
    t = 0.1
    K = kernel_matrix(op, t).values
    dist = 2.0 * np.abs(np.sin((th - th[0]) / 2.0))
    profile = (1.0 + dist / t) ** -2.0
    ratio = K[0] * t / profile  # t K_t against the dimensionless profile
    print(f"\nat t = {t}: t*K_t(x0, .) / (1 + dist/t)^-2 ranges "
          f"{ratio.min():.3f} .. {ratio.max():.3f}")
    print("bounded above and below: the kernel really is Poisson-shaped")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
        order = np.argsort(th)
        for t in args.times:
            K = kernel_matrix(op, t).values
            ax1.plot(th[order], K[0][order], label=f"t={t}")
            ax2.semilogy(th[order], np.maximum(K[0][order], 1e-12),
                         label=f"t={t}")
        ax1.set_xlabel("angle")
        ax1.set_ylabel("kernel section at x0 = 0")
        ax2.set_xlabel("angle")
        ax2.set_title("log scale")
        ax1.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
