#!/usr/bin/env python3
"""Where float64 keeps the theory and where it lets go.

In exact arithmetic the successive gradients are mutually orthogonal —
it is a theorem, and the rational backend reproduces it with residual
exactly zero.  In float64 the story has an envelope:

  * on well-structured problems the identities hold to ~1e-10 even at
    tight run tolerances;
  * on random dense SPD problems with real conditioning, orthogonality
    of the computed gradients decays as the run is pushed to tighter
    stopping tolerances — and the decay is a property of the arithmetic,
    not of this implementation: a bare-bones textbook implementation
    loses orthogonality at the same points.

This script maps that envelope.  It is the evidence behind the run
tolerances the verification defaults and the acceptance tests use for
random instances (loose, 1e-2) versus structured ones (tight, 1e-7).

Run:  python3 demos/04_float_envelope.py        (< 1 s)
"""

import math
import statistics

import numpy as np

from cglens import (
    RATIONAL,
    ProblemSpec,
    check_gradient_orthogonality,
    generate_problem,
    run_cg,
    run_full_suite,
)

SWEEP_TOLS = (1e-10, 1e-8, 1e-6, 1e-4, 3e-3, 1e-2)
CONDITIONS = (1e2, 1e4)
SEEDS = range(10)
N = 20
HARD_BOUND = 1e-8  # the float64 verification tolerance for orthogonality checks


def defect(gradients):
    """max_{i<j} |g_i^T g_j| / (||g_i|| ||g_j||)."""
    worst = 0.0
    for j in range(len(gradients)):
        for i in range(j):
            denom = float(np.linalg.norm(gradients[i]) * np.linalg.norm(gradients[j]))
            if denom > 0:
                worst = max(worst, abs(float(gradients[i] @ gradients[j])) / denom)
    return worst


def classical_cg(H, c, x0, tol, max_iter):
    """Unembellished textbook implementation, for comparison."""
    x = x0.copy()
    g = H @ x + c
    gradients = [g.copy()]
    p = -g
    g0 = max(np.linalg.norm(g), 1.0)
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol * g0:
            break
        Hp = H @ p
        theta = (g @ g) / (p @ Hp)
        x = x + theta * p
        g_new = g + theta * Hp
        beta = (g_new @ g_new) / (g @ g)
        p = -g_new + beta * p
        g = g_new
        gradients.append(g.copy())
    return gradients


def main():
    print("1. exact arithmetic: the control group")
    P = generate_problem(ProblemSpec(kind="rand_spd", n=8, condition=100, seed=0),
                         RATIONAL)
    trace = run_cg(P)
    check = check_gradient_orthogonality(trace)
    print(f"   {P.label}: r = {trace.r}, worst |g_i^T g_j| = {check.measured} "
          f"(a Fraction, literally zero)")
    print()

    print("2. float64 on structured problems: tight tolerances are safe")
    for kind, n in (("diag", 32), ("diag", 64), ("laplacian1d", 32), ("laplacian1d", 64)):
        P = generate_problem(ProblemSpec(kind=kind, n=n))
        report = run_full_suite(P, tol=1e-7)
        worst = max(float(c.measured) for c in report.checks)
        print(f"   {P.label:18} run tol 1e-07: all checks pass = {report.overall}, "
              f"worst residual {worst:.2e}")
    print()

    print(f"3. float64 on random SPD (n = {N}, {len(list(SEEDS))} seeds per cell):")
    print(f"   worst pairwise gradient defect vs run tolerance; a seed 'passes'")
    print(f"   if its defect stays within the verification bound {HARD_BOUND:.0e}")
    print()
    header = f"   {'run tol':>9}"
    for cond in CONDITIONS:
        header += f" | {'cond ' + format(cond, '.0e'):>20}"
    print(header)
    print("   " + "-" * (len(header) - 3))
    worst_instance = None
    for tol in SWEEP_TOLS:
        row = f"   {tol:>9.0e}"
        for cond in CONDITIONS:
            defects, steps = [], []
            for seed in SEEDS:
                P = generate_problem(
                    ProblemSpec(kind="rand_spd", n=N, condition=cond, seed=seed))
                trace = run_cg(P, tol=tol)
                d = float(check_gradient_orthogonality(trace).measured)
                defects.append(d)
                steps.append(trace.r)
                if worst_instance is None or d > worst_instance[0]:
                    worst_instance = (d, cond, seed, tol)
            passes = sum(d <= HARD_BOUND for d in defects)
            row += (f" | {max(defects):9.2e} {passes:2}/10 r~{int(statistics.median(steps)):2}")
        print(row)
    print()
    print("   reading the table: at loose run tolerances the method stops while")
    print("   its gradients are still numerically orthogonal; pushed toward 1e-6")
    print("   and beyond on conditioned random instances, orthogonality is lost")
    print("   long before the 1e-8 verification bound is satisfiable.")
    print()

    d, cond, seed, tol = worst_instance
    print(f"4. is that the implementation's fault?  worst cell above:")
    print(f"   cond = {cond:.0e}, seed = {seed}, run tol = {tol:.0e}, defect = {d:.2e}")
    P = generate_problem(ProblemSpec(kind="rand_spd", n=N, condition=cond, seed=seed))
    trace = run_cg(P, tol=tol)
    engine_defect = defect([rec.g_k for rec in trace.records[:-1]])
    H = np.array(P.H, dtype=float)
    c = np.array(P.c, dtype=float)
    x0 = np.array(P.x0, dtype=float)
    classical = classical_cg(H, c, x0, tol, max_iter=N + 5)
    classical_defect = defect(classical[:-1])
    print(f"   this library's engine:         defect = {engine_defect:.2e}")
    print(f"   bare textbook implementation:  defect = {classical_defect:.2e}")
    print(f"   same order: the decay is float64 physics, not an engine artifact.")
    print()

    margin_runs = [
        ("rand_spd", N, 1e2, 0, 1e-2),
        ("rand_spd", N, 1e4, 0, 1e-2),
    ]
    print("5. the acceptance configuration, with its margins:")
    for kind, n, cond, seed, tol in margin_runs:
        P = generate_problem(ProblemSpec(kind=kind, n=n, condition=cond, seed=seed))
        report = run_full_suite(P, tol=tol)
        worst = max(float(c.measured) for c in report.checks
                    if float(c.tolerance) > 0)
        print(f"   {P.label:28} run tol {tol:.0e}: overall = {report.overall}, "
              f"worst tolerance-checked residual {worst:.2e}")
    print()
    print("   structured problems are verified at run tol 1e-7 and random dense")
    print("   ones at 1e-2 — each sits orders of magnitude inside its region of")
    print("   the envelope mapped above.")


if __name__ == "__main__":
    main()
