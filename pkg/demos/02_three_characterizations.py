#!/usr/bin/env python3
"""One method, three interchangeable descriptions of its search direction.

The direction at iteration k can be written

  recursive:        p_k = -g_k + (g_k^T g_k / g_{k-1}^T g_{k-1}) p_{k-1}
  gradient history: p_k = c_k * sum_{i<=k} g_i / (g_i^T g_i),  c_k = -g_k^T g_k
  shortest residual: p_k = -ghat_k, the minimum-norm point of the affine
                     hull of the gradients so far (a rescaling of the others)

Run all three on the same problem in exact arithmetic: the iterates agree
Fraction-for-Fraction.  Then replace c_k with arbitrary nonzero scales and
watch the iterates not move — the exact linesearch absorbs any rescaling
of the direction, which is why the three descriptions are one method.

Run:  python3 demos/02_three_characterizations.py
"""

from fractions import Fraction

from cglens import (
    RATIONAL,
    DirectionScaling,
    ProblemSpec,
    generate_problem,
    run_cg,
    scalar_token,
)


def fmt_vec(v):
    return "(" + ", ".join(scalar_token(x) for x in v) + ")"


def main():
    P = generate_problem(ProblemSpec(kind="laplacian1d", n=6), RATIONAL)
    print(f"problem {P.label}: the 1-d Laplacian stencil on 6 points, exact rationals")
    print()

    modes = ("recursive", "gradient_sum", "shortest_residuals")
    traces = {m: run_cg(P, direction_mode=m) for m in modes}

    r = traces["recursive"].r
    print(f"all three terminate with a zero gradient after r = {r} steps")
    for m in modes:
        assert traces[m].r == r, m
    print()

    print("iterates, side by side (exact equality asserted):")
    for k in range(r + 1):
        xs = [traces[m].records[k].x_k for m in modes]
        assert all((x == xs[0]).all() for x in xs[1:])
        print(f"  x_{k} = {fmt_vec(xs[0])}")
    print("identical under every characterization.")
    print()

    print("the direction scales c_k do differ between characterizations:")
    header = "  k   " + "".join(f"{m:>22}" for m in modes)
    print(header)
    for k in range(r):
        row = f"  {k}   "
        for m in modes:
            row += f"{scalar_token(traces[m].records[k].c_k):>22}"
        print(row)
    print("(shortest-residuals uses c_k = -||ghat_k||^2, the scale at which the")
    print(" direction itself is the minimum-norm point, negated)")
    print()

    # arbitrary rescaling: iterates still identical
    whimsical = DirectionScaling(mode="custom",
                                 custom_value=lambda k: Fraction(7, 3) + k)
    scaled = run_cg(P, direction_mode="gradient_sum", scaling=whimsical)
    for k in range(r + 1):
        assert (scaled.records[k].x_k == traces["recursive"].records[k].x_k).all()
    print("rescaling every direction by c_k = -(7/3 + k): iterates unchanged")
    print("(asserted exactly) — the linesearch absorbs the scale into theta_k:")
    for k in range(r):
        a = traces["gradient_sum"].records[k]
        b = scaled.records[k]
        print(f"  k={k}: c_k {scalar_token(a.c_k):>12} -> {scalar_token(b.c_k):>8}, "
              f"theta_k {scalar_token(a.theta_k):>12} -> {scalar_token(b.theta_k)}")


if __name__ == "__main__":
    main()
