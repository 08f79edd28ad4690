"""The independent expanding-span minimizer and trace cross-checks."""

from __future__ import annotations

from fractions import Fraction

import pytest

from cglens import (
    F64,
    RATIONAL,
    DimensionMismatch,
    LinalgError,
    ProblemSpec,
    QuadraticProblem,
    SpanBasis,
    evaluate,
    generate_problem,
    minimize_on_affine_span,
    run_cg,
    sym_matrix,
    vector,
    verify_against_trace,
)


def make_p1():
    return QuadraticProblem(
        H=sym_matrix([[1, 0], [0, 2]], RATIONAL),
        c=vector([-1, -2], RATIONAL),
        x0=vector([0, 0], RATIONAL),
        label="p1",
    )


class TestSpanBasis:
    def test_counts_vectors(self):
        x0 = vector([0, 0], RATIONAL)
        basis = SpanBasis(x0=x0, spanning_vectors=(vector([1, 0], RATIONAL),))
        assert basis.k == 1

    def test_rejects_wrong_dimension(self):
        x0 = vector([0, 0], RATIONAL)
        with pytest.raises(DimensionMismatch):
            SpanBasis(x0=x0, spanning_vectors=(vector([1, 0, 0], RATIONAL),))

    def test_rejects_mixed_backends(self):
        x0 = vector([0, 0], RATIONAL)
        with pytest.raises(LinalgError):
            SpanBasis(x0=x0, spanning_vectors=(vector([1, 0], F64),))

    def test_accepts_more_vectors_than_dimension(self):
        x0 = vector([0, 0], RATIONAL)
        v = vector([1, 0], RATIONAL)
        assert SpanBasis(x0=x0, spanning_vectors=(v, v, v)).k == 3


class TestMinimizeOnAffineSpan:
    def test_empty_span_returns_base_point(self):
        P = make_p1()
        sol = minimize_on_affine_span(P, SpanBasis(x0=P.x0, spanning_vectors=()))
        assert list(sol.point) == [0, 0]
        assert sol.objective_value == evaluate(P, P.x0)
        assert sol.coordinates.shape == (0,)

    def test_expanding_spans_reproduce_iterates(self):
        P = make_p1()
        trace = run_cg(P)
        gradients = trace.gradients()
        sol1 = minimize_on_affine_span(
            P, SpanBasis(x0=P.x0, spanning_vectors=(gradients[0],))
        )
        assert list(sol1.point) == [Fraction(5, 9), Fraction(10, 9)]
        sol2 = minimize_on_affine_span(
            P, SpanBasis(x0=P.x0, spanning_vectors=tuple(gradients[:2]))
        )
        assert list(sol2.point) == [1, 1]

    def test_dependent_span_reaches_same_point(self):
        P = make_p1()
        g0 = vector([-1, -2], RATIONAL)
        sol = minimize_on_affine_span(
            P, SpanBasis(x0=P.x0, spanning_vectors=(g0, g0, 2 * g0))
        )
        assert list(sol.point) == [Fraction(5, 9), Fraction(10, 9)]

    def test_full_span_reaches_global_minimizer(self):
        P = make_p1()
        basis = SpanBasis(
            x0=P.x0,
            spanning_vectors=(vector([1, 0], RATIONAL), vector([0, 1], RATIONAL)),
        )
        assert list(minimize_on_affine_span(P, basis).point) == [1, 1]

    def test_backend_mismatch_rejected(self):
        P = make_p1()
        with pytest.raises(LinalgError):
            minimize_on_affine_span(
                P,
                SpanBasis(
                    x0=vector([0, 0], F64),
                    spanning_vectors=(vector([1, 0], F64),),
                ),
            )

    def test_float_path_handles_wide_norm_range(self):
        P = generate_problem(ProblemSpec(kind="diag", n=12))
        trace = run_cg(P, tol=1e-8)
        gradients = trace.gradients()
        basis = SpanBasis(x0=P.x0, spanning_vectors=tuple(gradients[:-1]))
        sol = minimize_on_affine_span(P, basis)
        # the minimizer over the full history span is the last iterate
        drift = sol.point - trace.records[-1].x_k
        assert max(abs(float(t)) for t in drift) < 1e-6


class TestVerifyAgainstTrace:
    def test_exact_deviations_are_zero(self):
        P = make_p1()
        deviations = verify_against_trace(P, run_cg(P))
        assert deviations == [0, 0]

    def test_backend_mismatch_rejected(self):
        P_float = QuadraticProblem(
            H=sym_matrix([[1, 0], [0, 2]], F64),
            c=vector([-1, -2], F64),
            x0=vector([0, 0], F64),
        )
        trace = run_cg(make_p1())
        with pytest.raises(LinalgError):
            verify_against_trace(P_float, trace)

    def test_foreign_trace_rejected(self):
        other = QuadraticProblem(
            H=sym_matrix([[3, 0], [0, 5]], RATIONAL),
            c=vector([-1, -2], RATIONAL),
            x0=vector([0, 0], RATIONAL),
        )
        trace = run_cg(make_p1())
        with pytest.raises(LinalgError, match="do not come from this problem"):
            verify_against_trace(other, trace)

    def test_float_deviations_stay_small(self):
        P = generate_problem(ProblemSpec(kind="laplacian1d", n=16))
        trace = run_cg(P, tol=1e-8)
        assert all(float(d) < 1e-8 for d in verify_against_trace(P, trace))
