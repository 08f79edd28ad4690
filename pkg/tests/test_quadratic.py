"""The quadratic model: evaluation, gradients, and the SPD gate."""

from __future__ import annotations

from fractions import Fraction

import pytest

from cglens import (
    F64,
    RATIONAL,
    DimensionMismatch,
    LinalgError,
    QuadraticProblem,
    evaluate,
    exact_minimizer,
    gradient,
    gradient_fd_check,
    point_of_gradient,
    sym_matrix,
    vector,
)


def make_p1():
    return QuadraticProblem(
        H=sym_matrix([[1, 0], [0, 2]], RATIONAL),
        c=vector([-1, -2], RATIONAL),
        x0=vector([0, 0], RATIONAL),
    )


class TestConstruction:
    def test_non_spd_rejected_with_pivot(self):
        with pytest.raises(LinalgError, match="pivot 2"):
            QuadraticProblem(
                H=sym_matrix([[1, 0], [0, -1]], F64),
                c=vector([0, 0], F64),
                x0=vector([0, 0], F64),
            )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            QuadraticProblem(
                H=sym_matrix([[1, 0], [0, 2]], F64),
                c=vector([0, 0, 0], F64),
                x0=vector([0, 0], F64),
            )

    def test_backend_mixing_rejected(self):
        with pytest.raises(LinalgError):
            QuadraticProblem(
                H=sym_matrix([[1, 0], [0, 2]], F64),
                c=vector([0, 0], RATIONAL),
                x0=vector([0, 0], F64),
            )

    def test_metadata(self):
        P = make_p1()
        assert P.n == 2
        assert P.backend is RATIONAL


class TestEvaluation:
    def test_value_and_gradient(self):
        P = make_p1()
        x = vector(["1/2", "1/3"], RATIONAL)
        # q = 1/2 (x1^2 + 2 x2^2) + (-x1 - 2 x2)
        assert evaluate(P, x) == Fraction(1, 8) + Fraction(1, 9) - Fraction(1, 2) - Fraction(2, 3)
        assert list(gradient(P, x)) == [Fraction(-1, 2), Fraction(-4, 3)]

    def test_gradient_zero_at_minimizer(self):
        P = make_p1()
        x_star = exact_minimizer(P)
        assert list(x_star) == [1, 1]
        assert all(entry == 0 for entry in gradient(P, x_star))

    def test_point_of_gradient_inverts_gradient(self):
        P = make_p1()
        x = vector(["-2/7", "3/5"], RATIONAL)
        g = gradient(P, x)
        assert list(point_of_gradient(P, g)) == list(x)

    def test_point_checks_dimension(self):
        P = make_p1()
        with pytest.raises(DimensionMismatch):
            evaluate(P, vector([1], RATIONAL))

    def test_point_checks_backend(self):
        P = make_p1()
        with pytest.raises(LinalgError):
            evaluate(P, vector([1, 1], F64))


class TestFiniteDifference:
    def test_exact_backend_deviation_is_zero(self):
        P = make_p1()
        assert gradient_fd_check(P, vector([2, 3], RATIONAL)) == 0

    def test_float_backend_deviation_is_noise(self):
        P = QuadraticProblem(
            H=sym_matrix([[3, 1], [1, 4]], F64),
            c=vector([-1, 2], F64),
            x0=vector([0, 0], F64),
        )
        assert gradient_fd_check(P, vector([0.7, -1.3], F64)) < 1e-9

    def test_nonpositive_step_rejected(self):
        P = make_p1()
        with pytest.raises(LinalgError):
            gradient_fd_check(P, vector([0, 0], RATIONAL), h=0)
