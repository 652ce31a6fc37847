"""Mass conservation, leakage, and kernel ordering under a potential.

Two structural facts about the boundary flow e^{-tN_V}:

  * without a potential the kernel rows integrate to exactly one
    (constants are harmonic, their flux is zero); any V >= 0 makes the
    rows integrate to strictly less than one, at a rate controlled by
    the bottom eigenvalue;
  * raising the potential pointwise lowers the kernel pointwise:
    K^{V1}_t >= K^{V2}_t entrywise when V1 <= V2.

Both are checked here on matched finite element discretizations so the
comparison is entry by entry on the same nodes.

Run:
    python3 demos/mass_and_order.py
    python3 demos/mass_and_order.py --n 192 --c-large 4.0
"""

import argparse

import numpy as np

from dtnlab import (assemble_system, build_boundary_space, domination_check,
                    kernel_matrix, make_domain, make_potential, schur_dtn,
                    submarkov_check, triangulate)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--c-large", type=float, default=1.0,
                    help="the larger constant potential")
    ap.add_argument("--times", type=float, nargs="+",
                    default=[0.1, 0.5, 1.0, 2.0, 5.0])
    args = ap.parse_args()

    domain = make_domain("unit-disk")
    b = build_boundary_space(domain, args.n)
    mesh = triangulate(domain, b)
    op0 = schur_dtn(assemble_system(mesh, b))
    op1 = schur_dtn(assemble_system(mesh, b, make_potential(args.c_large)))

    print(f"mesh: {mesh.vertices.shape[0]} vertices, boundary n = {args.n}")
    print(f"bottom eigenvalues: V=0 -> {op0.lambda_min:.2e}, "
          f"V={args.c_large} -> {op1.lambda_min:.6f}\n")

    print(f"{'t':>6} {'row sum, V=0':>14} {'row sum, V=c':>14} "
          f"{'e^(-t lam0)':>12}")
    for t in args.times:
        s0 = kernel_matrix(op0, t).values @ op0.weights
        s1 = kernel_matrix(op1, t).values @ op1.weights
        print(f"{t:>6} {s0.max():>14.8f} {s1.max():>14.8f} "
              f"{np.exp(-t * op1.lambda_min):>12.6f}")
    print("\nV=0 rows stay pinned at one; with a potential the surviving "
          "mass tracks\nthe bottom-eigenvalue decay (the slowest mode is "
          "nearly constant)")

    rep = submarkov_check(op0, args.times)
    print(f"\nsub-markov check, V=0: {rep.verdict} "
          f"(max deviation {rep.measured['max_deviation_from_one']:.1e})")
    rep = submarkov_check(op1, args.times)
    print(f"sub-markov check, V={args.c_large}: {rep.verdict} "
          f"(max row sum {rep.measured['max_row_sum']:.6f})")

    rep = domination_check(op0, op1, args.times)
    m = rep.measured
    print(f"\ndomination check 0 <= V <= {args.c_large}: {rep.verdict}")
    print(f"  min entrywise difference K0 - K1: {m['min_kernel_difference']:.3e}")
    print(f"  min entry of K1 (positivity):     {m['min_kernel_entry']:.3e}")
    print(f"  min heat-trace gap:               {m['min_trace_gap']:.3e}")
    print("all three stay nonnegative: more absorption means a smaller "
          "kernel,\neverywhere and at every time")


if __name__ == "__main__":
    main()
