"""Dense vectors and symmetric matrices over two scalar backends.

The same code paths run under IEEE double precision (``F64``) and under
exact arbitrary-precision rationals (``RATIONAL``, built on
``fractions.Fraction``).  Exactness is the whole point of the rational
backend: every ring operation satisfies ``a + b - b == a`` identically,
so a residual that a theorem says must vanish either is exactly zero or
exposes a bug.

Vectors and matrices are plain numpy arrays (``float64`` dtype for the
float backend, ``object`` dtype holding ``Fraction`` for the rational
one) marked read-only at construction.  All operations are pure
functions; nothing here mutates its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

Scalar = Union[float, Fraction]


class LinalgError(ValueError):
    """Base class for linear-algebra input errors."""


class DimensionMismatch(LinalgError):
    """Operands have incompatible dimensions."""


class AsymmetricMatrixError(LinalgError):
    """A symmetric matrix was constructed from asymmetric data."""


class NotSPDError(LinalgError):
    """A positive-definite matrix was required but a pivot failed.

    ``pivot_index`` is the 1-based index of the first non-positive pivot.
    """

    def __init__(self, message: str, pivot_index: int | None = None):
        super().__init__(message)
        self.pivot_index = pivot_index


class Backend:
    """A scalar field implementation: float64 or exact rationals."""

    def __init__(self, name: str, exact: bool):
        self.name = name
        self.exact = exact

    def __repr__(self) -> str:
        return f"Backend({self.name!r})"

    def scalar(self, value) -> Scalar:
        """Convert ``value`` to this backend's scalar type.

        Strings may be decimal literals or exact "p/q" fractions.  Under
        the rational backend a float converts to its exact binary value;
        pass a string to get decimal semantics ("0.1" -> 1/10).
        """
        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, str):
                return Fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            if isinstance(value, (int, np.integer)):
                return Fraction(int(value))
            raise LinalgError(f"cannot convert {value!r} to a rational scalar")
        try:
            if isinstance(value, str):
                return float(Fraction(value))
            return float(value)
        except (TypeError, ValueError) as err:
            raise LinalgError(f"cannot convert {value!r} to a float scalar") from err

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1.0

    def empty(self, shape) -> np.ndarray:
        """A writable all-zeros array of this backend's dtype."""
        if self.exact:
            out = np.empty(shape, dtype=object)
            out[...] = Fraction(0)
            return out
        return np.zeros(shape, dtype=np.float64)


F64 = Backend("f64", exact=False)
RATIONAL = Backend("rational", exact=True)

BACKENDS = {"f64": F64, "rational": RATIONAL}


def backend_of(arr: np.ndarray) -> Backend:
    """Infer the backend from an array's dtype."""
    return RATIONAL if arr.dtype == object else F64


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _array_from(values, backend: Backend) -> np.ndarray:
    if backend.exact:
        out = np.empty(len(values), dtype=object)
        out[:] = list(values)
        return out
    return np.array([float(v) for v in values], dtype=np.float64)


def vector(entries, backend: Backend = F64) -> np.ndarray:
    """Build a read-only 1-D vector on the given backend.

    Entries may be numbers or strings ("p/q" or decimal).
    """
    data = [backend.scalar(e) for e in entries]
    if len(data) == 0:
        raise DimensionMismatch("vectors must have dimension >= 1")
    return _freeze(_array_from(data, backend))


def sym_matrix(rows, backend: Backend = F64) -> np.ndarray:
    """Build a read-only dense symmetric matrix, validating symmetry.

    Raises ``AsymmetricMatrixError`` if any entry differs from its
    transpose partner (exact comparison in both backends).
    """
    data = [[backend.scalar(e) for e in row] for row in rows]
    n = len(data)
    if n == 0 or any(len(row) != n for row in data):
        raise DimensionMismatch("symmetric matrices must be square with n >= 1")
    for i in range(n):
        for j in range(i):
            if data[i][j] != data[j][i]:
                raise AsymmetricMatrixError(
                    f"entry ({i}, {j}) = {data[i][j]} does not match "
                    f"({j}, {i}) = {data[j][i]}"
                )
    out = backend.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = data[i][j]
    return _freeze(out)


def dot(a: np.ndarray, b: np.ndarray) -> Scalar:
    """Inner product sum_i a_i b_i; exact under the rational backend."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"dot of shapes {a.shape} and {b.shape}")
    if backend_of(a) is not backend_of(b):
        raise LinalgError("dot of vectors on different scalar backends")
    return np.dot(a, b)


def mat_vec(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product M v."""
    if M.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"mat_vec of shapes {M.shape} and {v.shape}")
    if backend_of(M) is not backend_of(v):
        raise LinalgError("mat_vec of arrays on different scalar backends")
    return _freeze(np.dot(M, v))


def norm_sq(v: np.ndarray) -> Scalar:
    """Squared Euclidean norm, exact under the rational backend."""
    return np.dot(v, v)


def norm(v: np.ndarray) -> float:
    """Euclidean norm as a float (informational under the rational backend)."""
    return math.sqrt(float(norm_sq(v)))


def max_abs(v: np.ndarray) -> Scalar:
    """Largest entry magnitude; exact under the rational backend."""
    flat = v.ravel()
    out = abs(flat[0])
    for x in flat[1:]:
        ax = abs(x)
        if ax > out:
            out = ax
    return out


def scalar_token(x) -> str:
    """Serialize a scalar losslessly as text.

    Rationals render as "p/q" (or a bare integer); floats use repr,
    which round-trips bit-for-bit through float().
    """
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def residual_magnitude(v: np.ndarray) -> Scalar:
    """Size of a residual vector, in a form the backend can represent.

    Float arrays report the Euclidean norm.  Exact arrays report the
    max-abs entry instead: it is an exactly representable rational and
    vanishes precisely when the Euclidean norm does, which is the only
    property exact-arithmetic checks rely on (their tolerance is zero).
    """
    if v.size == 0:
        return Fraction(0) if backend_of(v).exact else 0.0
    if backend_of(v).exact:
        return max_abs(v)
    return float(np.linalg.norm(v))


@dataclass(frozen=True)
class SpdCheck:
    """Outcome of the pivot test for symmetric positive definiteness.

    Carries the square-root-free factorization M = L D L^T with unit
    lower-triangular ``unit_lower`` and diagonal ``pivots``, computed up
    to and including the first failing pivot.  ``factor`` is the
    conventional Cholesky factor L sqrt(D); it needs square roots and is
    therefore only available on the float backend.
    """

    is_spd: bool
    pivots: tuple
    unit_lower: np.ndarray
    failed_pivot: int | None = None  # 0-based index of first bad pivot
    backend: Backend = field(default=F64, repr=False)

    @property
    def factor(self) -> np.ndarray | None:
        if not self.is_spd or self.backend.exact:
            return None
        L = np.array(self.unit_lower, dtype=np.float64)
        for j in range(L.shape[0]):
            L[:, j] *= math.sqrt(self.pivots[j])
        return _freeze(L)


def cholesky_spd_check(M: np.ndarray, pivot_floor: Scalar | None = None) -> SpdCheck:
    """Test positive definiteness by the pivots of the L D L^T factorization.

    A pivot counts as positive when it exceeds ``pivot_floor``, which
    defaults to 0 on the rational backend and to n * eps * max|M_ij| on
    the float backend (so exactly singular integer matrices are
    reliably rejected).  Non-SPD input is a result, not an error.
    """
    backend = backend_of(M)
    n = M.shape[0]
    if pivot_floor is None:
        if backend.exact:
            pivot_floor = Fraction(0)
        else:
            pivot_floor = n * np.finfo(np.float64).eps * float(max_abs(M))
    W = np.array(M, dtype=object if backend.exact else np.float64)
    L = backend.empty((n, n))
    pivots = []
    for t in range(n):
        L[t, t] = backend.one
        piv = W[t, t]
        pivots.append(piv)
        if not piv > pivot_floor:
            return SpdCheck(False, tuple(pivots), _freeze(L), t, backend)
        if t + 1 < n:
            col = W[t + 1 :, t] / piv
            L[t + 1 :, t] = col
            W[t + 1 :, t + 1 :] -= np.outer(col, col) * piv
    return SpdCheck(True, tuple(pivots), _freeze(L), None, backend)


def solve_spd(M: np.ndarray, b: np.ndarray, check: SpdCheck | None = None) -> np.ndarray:
    """Solve M y = b for symmetric positive definite M.

    Exact under the rational backend.  Raises ``NotSPDError`` if the
    pivot test fails; a previously computed ``check`` may be supplied to
    skip refactorization.
    """
    if M.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve of shapes {M.shape} and {b.shape}")
    if check is None:
        check = cholesky_spd_check(M)
    if not check.is_spd:
        raise NotSPDError(
            f"matrix is not positive definite: pivot {check.failed_pivot + 1} "
            f"is {check.pivots[check.failed_pivot]}",
            pivot_index=check.failed_pivot + 1,
        )
    L, d = check.unit_lower, check.pivots
    n = M.shape[0]
    y = np.array(b, dtype=object if check.backend.exact else np.float64)
    for t in range(n):  # L y = b
        y[t + 1 :] -= L[t + 1 :, t] * y[t]
    for t in range(n):  # D z = y
        y[t] = y[t] / d[t]
    for t in range(n - 1, -1, -1):  # L^T x = z
        y[t] -= np.dot(L[t + 1 :, t], y[t + 1 :])
    return _freeze(y)


class PivotedLDLT:
    """L D L^T factorization with symmetric diagonal pivoting.

    Serves positive *semi*definite systems: pivots are chosen as the
    largest remaining diagonal entry, the numerical rank is where they
    stop being positive, and consistent singular systems are solved with
    the free coordinates set to zero.  Exact under the rational backend
    (rank decisions compare against literal zero).
    """

    def __init__(self, A: np.ndarray, pivot_floor: Scalar | None = None):
        backend = backend_of(A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch("PivotedLDLT requires a square matrix")
        if pivot_floor is None:
            if backend.exact:
                pivot_floor = Fraction(0)
            elif n == 0:
                pivot_floor = 0.0
            else:
                pivot_floor = n * np.finfo(np.float64).eps * float(max_abs(A))
        W = np.array(A, dtype=object if backend.exact else np.float64)
        perm = list(range(n))
        rank = n
        for t in range(n):
            j = t
            for i in range(t + 1, n):
                if W[i, i] > W[j, j]:
                    j = i
            if j != t:
                W[[t, j], :] = W[[j, t], :]
                W[:, [t, j]] = W[:, [j, t]]
                perm[t], perm[j] = perm[j], perm[t]
            piv = W[t, t]
            if not piv > pivot_floor:
                # PSD input can only reach here with a (numerically) zero
                # trailing block; a solidly negative diagonal means the
                # matrix was not PSD at all.
                if piv < -1000 * abs(pivot_floor):
                    raise LinalgError(f"matrix is not positive semidefinite (diagonal {piv})")
                rank = t
                break
            if t + 1 < n:
                col = W[t + 1 :, t] / piv
                W[t + 1 :, t] = col
                W[t + 1 :, t + 1 :] -= np.outer(col, col) * piv
        self.backend = backend
        self.n = n
        self.rank = rank
        self.perm = perm
        self._W = W  # multipliers below the diagonal, pivots on it

    def solve(self, b: np.ndarray, consistency_tol: float = 1e-8):
        """Return ``(x, consistent)`` with free coordinates of x zeroed.

        ``consistent`` reports whether b lies in the range of A: exactly
        under the rational backend, against ``consistency_tol`` relative
        to max(1, |b|_inf) under float64.
        """
        n, r, W = self.n, self.rank, self._W
        if b.shape[0] != n:
            raise DimensionMismatch(f"solve of order {n} against {b.shape}")
        y = _array_from([b[self.perm[t]] for t in range(n)], self.backend)
        for t in range(r):
            y[t + 1 :] -= W[t + 1 :, t] * y[t]
        if self.backend.exact:
            consistent = all(y[i] == 0 for i in range(r, n))
        else:
            bscale = max(1.0, float(max_abs(b))) if n else 1.0
            consistent = all(abs(y[i]) <= consistency_tol * bscale for i in range(r, n))
        for t in range(r):
            y[t] = y[t] / W[t, t]
        y[r:] = self.backend.zero
        for t in range(r - 1, -1, -1):
            y[t] -= np.dot(W[t + 1 : r, t], y[t + 1 : r])
        x = [self.backend.zero] * n
        for t in range(r):
            x[self.perm[t]] = y[t]
        return _freeze(_array_from(x, self.backend)), consistent

    def nullspace(self) -> list[np.ndarray]:
        """A basis of the kernel, one vector per pivot-free column."""
        n, r, W = self.n, self.rank, self._W
        basis = []
        for f in range(r, n):
            top = [-W[f, t] for t in range(r)]
            for t in range(r - 1, -1, -1):  # L11^T x = -L21[f, :]
                xt = top[t]
                for i in range(t + 1, r):
                    xt = xt - W[i, t] * top[i]
                top[t] = xt
            v = [self.backend.zero] * n
            for t in range(r):
                v[self.perm[t]] = top[t]
            v[self.perm[f]] = self.backend.one
            basis.append(_freeze(_array_from(v, self.backend)))
        return basis
