"""Eigenvalues of the boundary flux map, exact vs meshed.

The flux map sends Dirichlet boundary data to the normal derivative of
its (potential-perturbed) harmonic extension.  On the disk its spectrum
is known mode by mode, which makes it a sharp yardstick for the finite
element path: mesh the interior, assemble stiffness + potential mass,
eliminate the interior block, and diagonalize the boundary complement.

Run:
    python3 demos/steklov_spectrum.py
    python3 demos/steklov_spectrum.py --potential 2.0 --resolutions 64 128 256
    python3 demos/steklov_spectrum.py --annulus --plot spectrum.png
"""

import argparse

import numpy as np

from dtnlab import (assemble_system, build_boundary_space, exact_annulus_dtn,
                    exact_disk_dtn, make_domain, make_potential, schur_dtn,
                    triangulate)


def fem_operator(domain, n, c):
    b = build_boundary_space(domain, n)
    mesh = triangulate(domain, b)
    system = assemble_system(mesh, b, make_potential(c))
    return schur_dtn(system), mesh


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential", type=float, default=0.0,
                    help="constant potential c >= 0")
    ap.add_argument("--resolutions", type=int, nargs="+",
                    default=[64, 128, 256])
    ap.add_argument("--annulus", action="store_true",
                    help="use the annulus 0.5 < r < 1 instead of the disk")
    ap.add_argument("--n-show", type=int, default=12,
                    help="how many eigenvalues to print")
    ap.add_argument("--plot", help="write a comparison plot to this file")
    args = ap.parse_args()

    if args.annulus:
        domain = make_domain(("annulus", 0.5, 1.0))
    else:
        domain = make_domain("unit-disk")
    c = args.potential

    n_ref = max(args.resolutions)
    b_ref = build_boundary_space(domain, n_ref)
    exact = (exact_annulus_dtn(b_ref, c) if args.annulus
             else exact_disk_dtn(b_ref, c))
    lam = np.sort(exact.eigenvalues)[:args.n_show]
    print(f"domain: {domain.kind}, potential c = {c}")
    print(f"exact spectrum (first {args.n_show}):")
    print("  " + "  ".join(f"{v:.6f}" for v in lam))
    if c == 0 and not args.annulus:
        print("  (integers n with multiplicity two: the mode-n flux of "
          "r^n cos/sin is n)")
    print()

    print(f"{'n':>6} {'vertices':>9} {'max rel err':>12}  spectrum head")
    errs = []
    for n in args.resolutions:
        op, mesh = fem_operator(domain, n, c)
        got = np.sort(op.eigenvalues)[:args.n_show]
        err = np.abs(got - lam) / np.maximum(lam, 1.0)
        errs.append((n, err.max()))
        head = "  ".join(f"{v:.4f}" for v in got[:6])
        print(f"{n:>6} {mesh.vertices.shape[0]:>9} {err.max():>12.2e}  {head}")
    if len(errs) > 1:
        n0, e0 = errs[0]
        n1, e1 = errs[-1]
        rate = np.log(e0 / e1) / np.log(n1 / n0)
        print(f"\nobserved convergence rate ~ n^-{rate:.2f} "
              f"(piecewise-linear elements give about 2)")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        k = np.arange(args.n_show)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(k, lam, "ko-", label="exact", ms=4)
        for n in args.resolutions:
            op, _ = fem_operator(domain, n, c)
            ax.plot(k, np.sort(op.eigenvalues)[:args.n_show], ".--",
                    label=f"mesh n={n}", ms=4)
        ax.set_xlabel("index")
        ax.set_ylabel("eigenvalue")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
