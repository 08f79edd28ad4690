"""Every identity the derivation rests on, as named runtime checks.

Each check measures a worst-case residual over a completed trace and
compares it against a tolerance: zero under the rational backend (the
identities are theorems there, so any nonzero residual is a bug), small
and configurable under float64 (where departures are information, not
errors, and are reported rather than masked).

Residual conventions, applied uniformly: float64 residuals are
normalized (relative) Euclidean quantities; rational residuals are raw
exact values (max-abs over entries for vector residuals), which vanish
precisely when their float counterparts would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import (
    BACKENDS,
    Backend,
    Scalar,
    dot,
    mat_vec,
    norm_sq,
    residual_magnitude,
    scalar_token,
)
from .quadratic import QuadraticProblem
from .engine import CGTrace, DirectionScaling, run_cg
from .oracle import verify_against_trace
from .minnorm import (
    min_norm_closed_form,
    projection_oracle,
    scaling_relation,
)

CHECK_NAMES = (
    "gradient_orthogonality",
    "iterate_span_orthogonality",
    "direction_gradient_difference",
    "direction_gradient_constancy",
    "exact_linesearch",
    "gradient_update_identity",
    "subspace_optimality",
    "min_norm_relation",
    "conjugacy",
    "termination_bound",
)

DEFAULT_TOLERANCES = {
    "f64": {
        "gradient_orthogonality": 1e-8,
        "iterate_span_orthogonality": 1e-8,
        "direction_gradient_difference": 1e-8,
        "direction_gradient_constancy": 1e-8,
        "exact_linesearch": 1e-8,
        "gradient_update_identity": 1e-8,
        "subspace_optimality": 1e-6,
        "min_norm_relation": 1e-6,
        "conjugacy": 1e-8,
        "termination_bound": 0.0,
    },
    "rational": {name: Fraction(0) for name in CHECK_NAMES},
}

CHECK_STATEMENTS = {
    "gradient_orthogonality": "g_k^T g_i = 0 for all i < k",
    "iterate_span_orthogonality": "g_{k+1}^T (x_{i+1} - x_0) = 0 for all i <= k",
    "direction_gradient_difference": "p_k^T (g_{i+1} - g_0) = 0 for all i < k",
    "direction_gradient_constancy": "p_k^T g_i = c_k for all i <= k",
    "exact_linesearch": "p_k^T g_{k+1} = 0",
    "gradient_update_identity": "g_{k+1} = g_k + theta_k H p_k",
    "subspace_optimality": "x_k minimizes q over x_0 + span{g_0, ..., g_{k-1}}",
    "min_norm_relation": "p_k = -(g_k^T g_k / ghat_k^T ghat_k) ghat_k, ghat by two methods",
    "conjugacy": "p_i^T H p_j = 0 for all i != j",
    "termination_bound": "g_r = 0 with r <= n (exact); r <= n + 5 (float64)",
}


@dataclass(frozen=True, eq=False)
class CheckResult:
    """Outcome of one named check: worst residual against its tolerance."""

    name: str
    paper_anchor: str
    measured: Scalar
    tolerance: Scalar
    passed: bool


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """All check results for one trace, with their conjunction."""

    problem_id: str
    backend: str
    r: int
    n: int
    checks: tuple[CheckResult, ...]
    overall: bool


def report_to_dict(report: VerificationReport) -> dict:
    """The report as a JSON-ready dict; numerics serialized as strings.

    String serialization carries exact rationals losslessly and
    round-trips float64 bit-for-bit.
    """
    return {
        "problem_id": report.problem_id,
        "backend": report.backend,
        "r": report.r,
        "n": report.n,
        "checks": [
            {
                "name": c.name,
                "paper_anchor": c.paper_anchor,
                "measured": scalar_token(c.measured),
                "tolerance": scalar_token(c.tolerance),
                "passed": c.passed,
            }
            for c in report.checks
        ],
        "overall": report.overall,
    }


def _backend(trace: CGTrace) -> Backend:
    return BACKENDS[trace.scalar_backend]


def _tolerance(name: str, backend: Backend, tolerance) -> Scalar:
    if tolerance is not None:
        return tolerance
    return DEFAULT_TOLERANCES[backend.name][name]


def _result(name: str, measured: Scalar, tolerance: Scalar) -> CheckResult:
    return CheckResult(
        name=name,
        paper_anchor=CHECK_STATEMENTS[name],
        measured=measured,
        tolerance=tolerance,
        passed=bool(measured <= tolerance),
    )


def _worst(backend: Backend, contributions) -> Scalar:
    """Fold residual contributions into a worst-case scalar (0 if none)."""
    worst = backend.zero
    for value in contributions:
        if value > worst:
            worst = value
    return worst


def _step_records(trace: CGTrace):
    """Records that carry a completed step (direction and step length)."""
    return [rec for rec in trace.records if rec.theta_k is not None]


def _pre_terminal_gradients(trace: CGTrace):
    """Gradients that drove a step; the terminal gradient is excluded."""
    return [rec.g_k for rec in trace.records[:-1]]


def _relative_dot(backend: Backend, a: np.ndarray, b: np.ndarray) -> Scalar | None:
    """|a^T b| normalized by ||a|| ||b|| (float); raw |a^T b| (exact)."""
    raw = abs(dot(a, b))
    if backend.exact:
        return raw
    denom = math.sqrt(float(norm_sq(a))) * math.sqrt(float(norm_sq(b)))
    if denom == 0:
        return None
    return float(raw) / denom


def check_gradient_orthogonality(trace: CGTrace, tolerance=None) -> CheckResult:
    """Pairwise orthogonality of the gradients that generated steps."""
    backend = _backend(trace)
    tol = _tolerance("gradient_orthogonality", backend, tolerance)
    gs = _pre_terminal_gradients(trace)
    if backend.exact:
        gs = [rec.g_k for rec in trace.records]  # terminal zero rides along
    contributions = []
    for k in range(len(gs)):
        for i in range(k):
            value = _relative_dot(backend, gs[k], gs[i])
            if value is not None:
                contributions.append(value)
    return _result("gradient_orthogonality", _worst(backend, contributions), tol)


def check_derivation_conditions(trace: CGTrace, tolerances=None) -> list[CheckResult]:
    """The three families of conditions the direction form is forced by.

    (a) each new gradient is orthogonal to every displacement
        x_{i+1} - x_0 already taken;
    (b) each direction is orthogonal to every gradient difference
        g_{i+1} - g_0 with i < k;
    (c) p_k^T g_i takes one common value c_k over i <= k.
    """
    backend = _backend(trace)
    tolerances = tolerances or {}
    records = trace.records
    steps = _step_records(trace)
    x0 = records[0].x_k

    # (a) g_{k+1}^T (x_{i+1} - x_0) = 0.  Under float64 the terminal
    # gradient is numerically zero noise whose *direction* is
    # meaningless, so only pre-terminal gradients are measured there.
    last = len(records) - 1 if backend.exact else len(records) - 2
    contributions = []
    for kp1 in range(1, last + 1):
        g_new = records[kp1].g_k
        for ip1 in range(1, kp1 + 1):
            value = _relative_dot(backend, g_new, records[ip1].x_k - x0)
            if value is not None:
                contributions.append(value)
    span = _result(
        "iterate_span_orthogonality",
        _worst(backend, contributions),
        _tolerance("iterate_span_orthogonality", backend, tolerances.get("iterate_span_orthogonality")),
    )

    # (b) p_k^T (g_{i+1} - g_0) = 0 for i < k.
    contributions = []
    for k, rec in enumerate(steps):
        for ip1 in range(1, k + 1):
            value = _relative_dot(backend, rec.p_k, records[ip1].g_k - records[0].g_k)
            if value is not None:
                contributions.append(value)
    diff = _result(
        "direction_gradient_difference",
        _worst(backend, contributions),
        _tolerance("direction_gradient_difference", backend, tolerances.get("direction_gradient_difference")),
    )

    # (c) p_k^T g_i = c_k for i <= k, with c_k as recorded by the run.
    contributions = []
    for k, rec in enumerate(steps):
        for i in range(k + 1):
            raw = abs(dot(rec.p_k, records[i].g_k) - rec.c_k)
            if backend.exact:
                contributions.append(raw)
            else:
                denom = math.sqrt(float(norm_sq(rec.p_k))) * math.sqrt(
                    float(norm_sq(records[i].g_k))
                )
                if denom > 0:
                    contributions.append(float(raw) / denom)
    constancy = _result(
        "direction_gradient_constancy",
        _worst(backend, contributions),
        _tolerance("direction_gradient_constancy", backend, tolerances.get("direction_gradient_constancy")),
    )
    return [span, diff, constancy]


def check_exact_linesearch(trace: CGTrace, tolerance=None) -> CheckResult:
    """p_k^T g_{k+1} = 0, normalized by the pre-step gradient under float64.

    Normalizing by ||g_k|| rather than ||g_{k+1}|| keeps the final
    (numerically zero) gradient from trivializing the check.
    """
    backend = _backend(trace)
    tol = _tolerance("exact_linesearch", backend, tolerance)
    records = trace.records
    contributions = []
    for k, rec in enumerate(_step_records(trace)):
        raw = abs(dot(rec.p_k, records[k + 1].g_k))
        if backend.exact:
            contributions.append(raw)
        else:
            denom = math.sqrt(float(norm_sq(rec.p_k))) * math.sqrt(float(norm_sq(rec.g_k)))
            if denom > 0:
                contributions.append(float(raw) / denom)
    return _result("exact_linesearch", _worst(backend, contributions), tol)


def check_gradient_update_identity(
    P: QuadraticProblem, trace: CGTrace, tolerance=None
) -> CheckResult:
    """g_{k+1} = g_k + theta_k H p_k — the recursive update the solver never uses.

    The engine recomputes gradients from scratch, so this identity is a
    genuine consistency statement between consecutive records.
    """
    backend = _backend(trace)
    tol = _tolerance("gradient_update_identity", backend, tolerance)
    records = trace.records
    contributions = []
    for k, rec in enumerate(_step_records(trace)):
        drift = records[k + 1].g_k - rec.g_k - rec.theta_k * mat_vec(P.H, rec.p_k)
        raw = residual_magnitude(drift)
        if backend.exact:
            contributions.append(raw)
        else:
            denom = math.sqrt(float(norm_sq(rec.g_k)))
            if denom > 0:
                contributions.append(float(raw) / denom)
    return _result("gradient_update_identity", _worst(backend, contributions), tol)


def check_subspace_optimality(
    P: QuadraticProblem, trace: CGTrace, tolerance=None
) -> CheckResult:
    """Each iterate equals the independent minimizer over its gradient span."""
    backend = _backend(trace)
    tol = _tolerance("subspace_optimality", backend, tolerance)
    deviations = verify_against_trace(P, trace)
    contributions = []
    for k, dev in enumerate(deviations, start=1):
        if backend.exact:
            contributions.append(dev)
        else:
            scale = max(1.0, math.sqrt(float(norm_sq(trace.records[k].x_k))))
            contributions.append(float(dev) / scale)
    return _result("subspace_optimality", _worst(backend, contributions), tol)


def check_min_norm_relation(
    P: QuadraticProblem, trace: CGTrace, tolerance=None
) -> CheckResult:
    """p_k against the min-norm point of its gradient history, both methods.

    For every k < r: ghat_k is computed by the closed form (with its
    orthogonality gate disabled — a degraded float64 history should
    *fail* here, not error out) and by the projection oracle; the check
    measures their mutual deviation and the deviation of p_k from
    -(g_k^T g_k / ||ghat||^2) ghat, normalized by ||p_k|| under float64.
    """
    backend = _backend(trace)
    tol = _tolerance("min_norm_relation", backend, tolerance)
    records = trace.records
    contributions = []
    for k, rec in enumerate(_step_records(trace)):
        history = [records[i].g_k for i in range(k + 1)]
        closed = min_norm_closed_form(history, orthogonality_tol=math.inf)
        projected = projection_oracle(history)
        agreement = residual_magnitude(closed.ghat - projected.ghat)
        deviation = scaling_relation(rec.p_k, rec.g_k, closed)
        if backend.exact:
            contributions.extend([agreement, deviation])
        else:
            ghat_scale = max(math.sqrt(float(closed.norm_sq)), 1e-300)
            p_scale = max(math.sqrt(float(norm_sq(rec.p_k))), 1e-300)
            contributions.append(float(agreement) / ghat_scale)
            contributions.append(float(deviation) / p_scale)
    return _result("min_norm_relation", _worst(backend, contributions), tol)


def check_conjugacy(P: QuadraticProblem, trace: CGTrace, tolerance=None) -> CheckResult:
    """p_i^T H p_j = 0 for i != j — a consequence here, not an assumption."""
    backend = _backend(trace)
    tol = _tolerance("conjugacy", backend, tolerance)
    ps = [rec.p_k for rec in _step_records(trace)]
    hps = [mat_vec(P.H, p) for p in ps]
    contributions = []
    for j in range(len(ps)):
        for i in range(j):
            raw = abs(dot(ps[i], hps[j]))
            if backend.exact:
                contributions.append(raw)
            else:
                denom = math.sqrt(float(dot(ps[i], hps[i]))) * math.sqrt(
                    float(dot(ps[j], hps[j]))
                )
                if denom > 0:
                    contributions.append(float(raw) / denom)
    return _result("conjugacy", _worst(backend, contributions), tol)


def check_termination_bound(
    P: QuadraticProblem, trace: CGTrace, tolerance=None
) -> CheckResult:
    """Finite termination: a zero gradient within n steps (n + 5 under float64).

    measured counts the excess over the bound, plus 1 if the run ended
    without the gradient converging at all (max_iter or breakdown).
    """
    backend = _backend(trace)
    tol = _tolerance("termination_bound", backend, tolerance)
    bound = P.n if backend.exact else P.n + 5
    excess = max(0, trace.r - bound)
    converged = trace.termination_reason in ("gradient_zero", "tolerance_met")
    measured = excess + (0 if converged else 1)
    measured = Fraction(measured) if backend.exact else float(measured)
    return _result("termination_bound", measured, tol)


def run_full_suite(
    P: QuadraticProblem,
    tol: float = 1e-10,
    max_iter: int | None = None,
    direction_mode: str = "recursive",
    scaling: DirectionScaling | None = None,
    tolerances: dict | None = None,
    problem_id: str | None = None,
    trace: CGTrace | None = None,
) -> VerificationReport:
    """Solve (or accept a saved trace) and run every check.

    Solver breakdown surfaces as a failed termination check inside the
    report, never as an exception.
    """
    if trace is None:
        trace = run_cg(
            P,
            tol=tol,
            max_iter=max_iter,
            direction_mode=direction_mode,
            scaling=scaling,
            problem_id=problem_id,
        )
    tolerances = dict(tolerances or {})

    def t(name):
        return tolerances.get(name)

    checks = [check_gradient_orthogonality(trace, t("gradient_orthogonality"))]
    checks.extend(check_derivation_conditions(trace, tolerances))
    checks.append(check_exact_linesearch(trace, t("exact_linesearch")))
    checks.append(check_gradient_update_identity(P, trace, t("gradient_update_identity")))
    checks.append(check_subspace_optimality(P, trace, t("subspace_optimality")))
    checks.append(check_min_norm_relation(P, trace, t("min_norm_relation")))
    checks.append(check_conjugacy(P, trace, t("conjugacy")))
    checks.append(check_termination_bound(P, trace, t("termination_bound")))
    return VerificationReport(
        problem_id=trace.problem_id,
        backend=trace.scalar_backend,
        r=trace.r,
        n=P.n,
        checks=tuple(checks),
        overall=all(c.passed for c in checks),
    )
