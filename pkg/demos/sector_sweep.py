"""The flow at complex time: holomorphy into the right half-plane.

e^{-zN} stays a bounded integral operator for Re z > 0, with bounds that
degrade as z approaches the imaginary axis like a power of cos(arg z).
Sweeping rays of fixed angle shows both effects: the weighted kernel
sup stays flat on each ray, and the L1 operator norm grows as the ray
tilts while remaining finite and refinement-stable.

Run:
    python3 demos/sector_sweep.py
    python3 demos/sector_sweep.py --angles 0 0.5 1.0 1.4 --plot rays.png
"""

import argparse

import numpy as np

from dtnlab import (BoundSpec, SweepGrid, build_boundary_space,
                    exact_disk_dtn, kernel_matrix, make_domain,
                    poisson_sup_ratio, sector_holomorphy_sweep)
from dtnlab.cli import sweep_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--angles", type=float, nargs="+",
                    default=[0.0, np.pi / 6, np.pi / 4, np.pi / 3])
    ap.add_argument("--plot", help="write per-ray curves to this file")
    args = ap.parse_args()

    ops = [exact_disk_dtn(build_boundary_space(make_domain("unit-disk"), n))
           for n in (args.n // 2, args.n)]
    times = np.geomspace(1e-2, 10.0, 7)
    # quadrature-based norms need t above the coarsest node spacing;
    # kernel-value sweeps below do not
    times_l1 = np.geomspace(0.2, 10.0, 6)

    print("L1 -> L1 norm along rays z = t e^{i theta}:")
    rep = sector_holomorphy_sweep(ops, args.angles, times_l1)
    for row in rep.measured["per_angle"]:
        print(f"  theta = {row['angle']:.3f}: sup column sum "
              f"{row['sup_l1_norm']:.4f} (refinement change "
              f"{row['max_change']:.1e})")
    print(f"verdict: {rep.verdict} - contraction on the real axis, finite "
          f"growth off it\n")

    grid = SweepGrid(tuple(times), tuple(args.angles))
    rep = poisson_sup_ratio(ops, grid, spec=BoundSpec(cos_power=24.0))
    print(f"weighted kernel sup with a (cos theta)^24 allowance: "
          f"{rep.measured['sup_ratio']:.4f} ({rep.verdict})")
    print("one finite constant covers every ray once the angular "
          "degradation is weighted out\n")

    # raw magnitudes on one ray, to see the degradation directly
    th = args.angles[-1]
    print(f"kernel magnitude along theta = {th:.3f}:")
    print(f"{'t':>8} {'max |K_z|':>12} {'at angle 0':>12}")
    op = ops[-1]
    for t in np.geomspace(1e-2, 1.0, 5):
        z = t * np.exp(1j * th)
        m_ray = np.abs(kernel_matrix(op, z).values).max()
        m_real = np.abs(kernel_matrix(op, float(t)).values).max()
        print(f"{t:>8.3g} {m_ray:>12.4f} {m_real:>12.4f}")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        rows = np.array(sweep_rows(op, list(np.geomspace(1e-2, 10, 25)),
                                   args.angles))
        for th in args.angles:
            sel = rows[:, 1] == th
            ax.loglog(rows[sel, 0], rows[sel, 2], ".-",
                      label=f"theta={th:.2f}")
        ax.set_xlabel("|z|")
        ax.set_ylabel("weighted kernel sup")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"\nwrote {args.plot}")


if __name__ == "__main__":
    main()
