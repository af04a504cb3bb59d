"""Bidirectional architecture: the exact UL route to length invariance.

The closed-loop sensitivity of the n-vehicle bidirectional design is
S_n = (I + X_n H_n X_n^T)^{-1}. The whole point of the construction is that
I + X_n H_n X_n^T factors exactly as (1/s^2) U_n L_n with U_n, L_n
bidiagonal, so S_n = s^2 L_n^{-1} U_n^{-1} and the leading blocks of S_n do
not change as vehicles are appended. Everything here is exact rational
arithmetic; floats only enter in the Bode sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Tuple

import numpy as np

from .errors import (InvalidRange, NonPositiveScale, SingularDiagonal,
                     UnstableEntry)
from .freq import FrequencyGrid, rf_log_abs_jomega
from .poly import Polynomial, hurwitz_stable
from .ratfun import RationalFunction, scale_frequency

_S = Polynomial([0, 1])
_ONE = Polynomial([1])
_ZERO_RF = RationalFunction(Polynomial([]), _ONE)
_ONE_RF = RationalFunction(_ONE, _ONE)
_DB = 20.0 / math.log(10.0)


class RationalMatrix:
    """Dense immutable matrix of rational functions, 0-based indexing."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[RationalFunction]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise InvalidRange("matrix must be nonempty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidRange("ragged rows")
        self.rows = rows

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij) -> RationalFunction:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> Iterator[Tuple[int, int, RationalFunction]]:
        for i, row in enumerate(self.rows):
            for j, f in enumerate(row):
                yield i, j, f

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.rows)))

    def map_entries(self, fn) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(fn(f) for f in row) for row in self.rows))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.n_rows, self.n_cols) != (other.n_rows, other.n_cols):
            raise InvalidRange("shape mismatch in add")
        return RationalMatrix(tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.rows, other.rows)))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.n_cols != other.n_rows:
            raise InvalidRange("shape mismatch in matmul")
        # zero factors are skipped so bidiagonal products cost O(n^2)
        out = []
        for i in range(self.n_rows):
            row = []
            for j in range(other.n_cols):
                acc = None
                for k in range(self.n_cols):
                    a = self.rows[i][k]
                    if a.num.is_zero:
                        continue
                    b = other.rows[k][j]
                    if b.num.is_zero:
                        continue
                    term = a * b
                    acc = term if acc is None else acc + term
                row.append(_ZERO_RF if acc is None else acc)
            out.append(tuple(row))
        return RationalMatrix(tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"RationalMatrix({self.n_rows}x{self.n_cols})"


def _eye(n: int) -> RationalMatrix:
    return RationalMatrix(tuple(
        tuple(_ONE_RF if i == j else _ZERO_RF for j in range(n))
        for i in range(n)))


@dataclass(frozen=True)
class LemmaStructures:
    """The four exact matrices of the factorization for a given n."""

    n: int
    X: RationalMatrix
    H: RationalMatrix
    U: RationalMatrix
    L: RationalMatrix


def build_structures(n: int) -> LemmaStructures:
    """X_n, H_n, U_n, L_n exactly as displayed.

    X_n: 1 on the diagonal, -1 on the subdiagonal. H_n: diagonal
    ((s+1)/s^2, ..., (s+1)/s^2, 1/s), the last loop differing. U_n: s+1 on
    the diagonal, -1 on the superdiagonal. L_n: diagonal (s, s+1, ..., s+1),
    -1 on the subdiagonal.
    """
    if n < 1:
        raise InvalidRange("n must be >= 1")
    s2 = _S * _S
    h_mid = RationalFunction(_ONE + _S, s2)
    h_last = RationalFunction(_ONE, _S)
    sp1 = RationalFunction(_ONE + _S, _ONE)
    s_rf = RationalFunction(_S, _ONE)
    neg1 = RationalFunction(Polynomial([-1]), _ONE)

    def cell(i, j, diag, off, offset):
        if i == j:
            return diag(i)
        if j == i + offset:
            return off
        return _ZERO_RF

    X = RationalMatrix(tuple(
        tuple(cell(i, j, lambda _: _ONE_RF, neg1, -1) for j in range(n))
        for i in range(n)))
    H = RationalMatrix(tuple(
        tuple((h_last if i == n - 1 else h_mid) if i == j else _ZERO_RF
              for j in range(n))
        for i in range(n)))
    U = RationalMatrix(tuple(
        tuple(cell(i, j, lambda _: sp1, neg1, +1) for j in range(n))
        for i in range(n)))
    L = RationalMatrix(tuple(
        tuple(cell(i, j, lambda i: s_rf if i == 0 else sp1, neg1, -1) for j in range(n))
        for i in range(n)))
    return LemmaStructures(n, X, H, U, L)


def verify_factorization(n: int) -> bool:
    """Exact entrywise test of s^2 (I + X H X^T) == U L."""
    st = build_structures(n)
    lhs = (_eye(n) + st.X @ st.H @ st.X.transpose()).map_entries(
        lambda f: f * RationalFunction(_S * _S, _ONE))
    return lhs == st.U @ st.L


def invert_bidiagonal(T: RationalMatrix, shape: str) -> RationalMatrix:
    """Exact inverse of an upper or lower bidiagonal matrix.

    Back (upper) or forward (lower) substitution column by column; the
    diagonal must be nonzero. The product T times the result is checked to
    be the identity before returning.
    """
    if shape not in ("upper", "lower"):
        raise InvalidRange("shape must be 'upper' or 'lower'")
    n = T.n_rows
    if T.n_cols != n:
        raise InvalidRange("matrix must be square")
    off = +1 if shape == "upper" else -1
    for i, j, f in T.entries():
        if i == j:
            if f.num.is_zero:
                raise SingularDiagonal(f"zero diagonal entry at position {i + 1}")
        elif j != i + off and not f.num.is_zero:
            raise InvalidRange(f"entry ({i + 1},{j + 1}) breaks the bidiagonal shape")
    cols = [[_ZERO_RF] * n for _ in range(n)]
    order = range(n - 1, -1, -1) if shape == "upper" else range(n)
    for j in range(n):
        for i in order:
            acc = _ONE_RF if i == j else _ZERO_RF
            k = i + off
            if 0 <= k < n and not T.rows[i][k].num.is_zero:
                acc = acc - T.rows[i][k] * cols[j][k]
            cols[j][i] = acc / T.rows[i][i]
    inv = RationalMatrix(tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)))
    if T @ inv != _eye(n):
        raise ArithmeticError("inverse verification failed; construction bug")
    return inv


@lru_cache(maxsize=None)
def sensitivity_matrix(n: int) -> RationalMatrix:
    """S_n = s^2 L_n^{-1} U_n^{-1}, fully canonical.

    The factorized route, not general inversion: both inverses come from
    substitution and the result is a single bidiagonal-inverse product.
    """
    st = build_structures(n)
    li = invert_bidiagonal(st.L, "lower")
    ui = invert_bidiagonal(st.U, "upper")
    s2 = RationalFunction(_S * _S, _ONE)
    return (li @ ui).map_entries(lambda f: f * s2)


def invariance_check(k: int, ns: Sequence[int]) -> bool:
    """True iff the leading k-by-k block of S_n agrees exactly across ns."""
    if k < 1:
        raise InvalidRange("k must be >= 1")
    ns = list(ns)
    if not ns:
        raise InvalidRange("ns must be nonempty")
    if any(n < k for n in ns):
        raise InvalidRange("every n must be >= k")

    def block(n):
        S = sensitivity_matrix(n)
        return tuple(tuple(S.rows[i][j] for j in range(k)) for i in range(k))

    first = block(ns[0])
    return all(block(n) == first for n in ns[1:])


def time_scale(S: RationalMatrix, T_const) -> RationalMatrix:
    """Entrywise substitution s -> s/T: the slowed-down (T > 1) design."""
    t = Fraction(T_const)
    if t <= 0:
        raise NonPositiveScale("T_const must be positive")
    gamma = Fraction(1) / t
    return S.map_entries(lambda f: scale_frequency(f, gamma))


# ----------------------------------------------------------------------
# Bode sweep

_BODE_TOL = 1e-9


@dataclass(frozen=True)
class BodeTable:
    """Per-entry magnitude sweep with the reference-bound verdict."""

    grid: FrequencyGrid
    n_rows: int
    n_cols: int
    log_magnitudes: np.ndarray  # shape (n_rows, n_cols, len(grid))
    bound_ok: bool
    worst_excess: float

    def to_csv(self) -> str:
        # omega-major, then row, then col; indices 1-based
        lines = ["omega,row,col,abs,abs_db"]
        for w, om in enumerate(self.grid.omegas):
            for i in range(self.n_rows):
                for j in range(self.n_cols):
                    lg = float(self.log_magnitudes[i, j, w])
                    lines.append(f"{float(om)!r},{i + 1},{j + 1},{math.exp(lg)!r},{lg * _DB!r}")
        return "\n".join(lines) + "\n"


def bode_table(Mtx: RationalMatrix, grid: FrequencyGrid) -> BodeTable:
    """Magnitudes of every entry over the grid, tested against |jw/(jw+1)|.

    The verdict is true iff every sample of every entry is at most the
    reference magnitude plus a 1e-9 absolute allowance. Entries must be
    stable and proper to have a meaningful magnitude sweep.
    """
    for i, j, f in Mtx.entries():
        if not f.is_proper:
            raise UnstableEntry(f"entry ({i + 1},{j + 1}) is improper")
        if f.den.degree > 0 and not hurwitz_stable(f.den):
            raise UnstableEntry(f"entry ({i + 1},{j + 1}) has an unstable pole")
    om = grid.omegas
    bound = om / np.sqrt(1.0 + om * om)
    logs = np.empty((Mtx.n_rows, Mtx.n_cols, len(om)))
    worst = -math.inf
    ok = True
    for i, j, f in Mtx.entries():
        lg = rf_log_abs_jomega(f, om)
        logs[i, j, :] = lg
        excess = float((np.exp(lg) - bound).max())
        worst = max(worst, excess)
        if excess > _BODE_TOL:
            ok = False
    return BodeTable(grid, Mtx.n_rows, Mtx.n_cols, logs, ok, worst)
