"""Brute-force minimization of q over an affine span.

Given a base point x0 and spanning vectors s_1..s_k, the unique
minimizer of q over {x0 + sum_j v_j s_j} is found by forming the reduced
k-by-k system (S^T H S) v = -S^T g(x0) and solving it directly.  Nothing
here iterates: the oracle is the independent yardstick the conjugate
gradient engine is measured against, so it must not share machinery
with it.

Spanning vectors may be dependent (the reduced matrix is then singular
but always consistent, since it is S^T H S with H positive definite);
the pivoted solver returns one coordinate vector and the resulting
*point* is still unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionMismatch,
    LinalgError,
    PivotedLDLT,
    Scalar,
    backend_of,
    residual_magnitude,
)
from .quadratic import QuadraticProblem, evaluate, gradient
from .engine import CGTrace


@dataclass(frozen=True, eq=False)
class SpanBasis:
    """A base point and spanning vectors for an affine set x0 + span{s_j}.

    The spanning vectors may be dependent, and there may be more of them
    than the dimension; rank handling is the solver's job.
    """

    x0: np.ndarray
    spanning_vectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "spanning_vectors", tuple(self.spanning_vectors))
        n = self.x0.shape[0]
        for j, s in enumerate(self.spanning_vectors):
            if s.shape != (n,):
                raise DimensionMismatch(
                    f"spanning vector {j} has shape {s.shape}, expected ({n},)"
                )
            if backend_of(s) is not backend_of(self.x0):
                raise LinalgError(f"spanning vector {j} is on a different backend")

    @property
    def k(self) -> int:
        return len(self.spanning_vectors)


@dataclass(frozen=True, eq=False)
class SubspaceSolution:
    """The minimizer over the affine set, in span coordinates and as a point.

    When the spanning vectors are dependent the coordinates are one
    valid choice among many; the point and objective value are unique.
    """

    coordinates: np.ndarray
    point: np.ndarray
    objective_value: Scalar


def minimize_on_affine_span(P: QuadraticProblem, B: SpanBasis) -> SubspaceSolution:
    """Minimize q over x0 + span{s_j} by a direct reduced solve.

    The gradient of q at the result is orthogonal to every spanning
    vector — exactly so under the rational backend.  Under float64 the
    reduced matrix is symmetrically rescaled to unit diagonal before
    factorization, which keeps the solve well-behaved when spanning
    vectors differ by many orders of magnitude (as CG gradient
    histories do).
    """
    backend = P.backend
    if B.x0.shape != (P.n,):
        raise DimensionMismatch(f"base point has shape {B.x0.shape}, expected ({P.n},)")
    if backend_of(B.x0) is not backend:
        raise LinalgError("span basis is on a different backend than the problem")
    k = B.k
    if k == 0:
        return SubspaceSolution(
            coordinates=backend.empty(0),
            point=B.x0,
            objective_value=evaluate(P, B.x0),
        )

    S = np.column_stack(B.spanning_vectors)
    g0 = gradient(P, B.x0)
    A = np.dot(S.T, np.dot(P.H, S))
    rhs = -np.dot(S.T, g0)

    if backend.exact:
        v, consistent = PivotedLDLT(A).solve(rhs)
    else:
        # Jacobi rescaling: A_jj = s_j^T H s_j > 0 unless s_j = 0.
        d = np.array([1.0 / math.sqrt(A[j, j]) if A[j, j] > 0 else 1.0 for j in range(k)])
        u, consistent = PivotedLDLT(A * np.outer(d, d)).solve(rhs * d)
        v = d * u
    if not consistent:
        # Unreachable for A = S^T H S with SPD H; defensive only.
        raise LinalgError("reduced system is inconsistent; H may not be SPD")

    point = B.x0 + np.dot(S, v)
    point.flags.writeable = False
    v.flags.writeable = False
    return SubspaceSolution(coordinates=v, point=point, objective_value=evaluate(P, point))


def verify_against_trace(P: QuadraticProblem, trace: CGTrace) -> list:
    """Deviations ||x_k - oracle_k|| for k = 1..r, oracle over span{g_0..g_{k-1}}.

    Each trace iterate is recomputed independently as the minimizer over
    the expanding affine span of its gradient history; under the
    rational backend every deviation is exactly zero.
    """
    if trace.scalar_backend != P.backend.name:
        raise LinalgError(
            f"trace backend {trace.scalar_backend!r} does not match problem "
            f"backend {P.backend.name!r}"
        )
    records = trace.records
    if records[0].x_k.shape != (P.n,):
        raise DimensionMismatch("trace dimension does not match problem")
    # Recompute the first and last recorded gradients from the problem
    # data; both must match (the first alone is blind to a wrong H
    # whenever x0 = 0, where the gradient is just c).
    for rec in {records[0].k: records[0], records[-1].k: records[-1]}.values():
        g = gradient(P, rec.x_k)
        mismatch = residual_magnitude(g - rec.g_k)
        limit = 0 if P.backend.exact else 1e-12 * max(1.0, float(residual_magnitude(g)))
        if mismatch > limit:
            raise LinalgError("trace gradients do not come from this problem")

    deviations = []
    gradients = [rec.g_k for rec in records]
    for k in range(1, trace.r + 1):
        basis = SpanBasis(x0=records[0].x_k, spanning_vectors=tuple(gradients[:k]))
        sol = minimize_on_affine_span(P, basis)
        deviations.append(residual_magnitude(records[k].x_k - sol.point))
    return deviations
