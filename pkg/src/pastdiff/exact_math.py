"""Exact rational helpers: symmetric polynomials and Vandermonde algebra.

Everything here works on :class:`fractions.Fraction`; no float ever enters.
Vectors are plain sequences and matrices are row-major lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal literal into an exact Fraction.

    Decimals are taken at face value, so ``"0.1"`` becomes ``1/10``.
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse {type(text).__name__} as a rational")
    s = text.strip().replace("−", "-")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def format_rational(value: Fraction) -> str:
    """Reduced ``"p/q"`` form, or ``"p"`` when the denominator is 1."""
    return str(Fraction(value))


def _as_fractions(values: Iterable) -> list[Fraction]:
    return [Fraction(v) for v in values]


def _check_distinct(values: Sequence[Fraction], message: str) -> None:
    if len(set(values)) != len(values):
        raise ValueError(message)


def elementary_symmetric(values: Sequence, degree: int) -> Fraction:
    """Sum over all ``degree``-element subsets of the product of their members.

    Built one value at a time with the usual triangle recurrence, so the cost
    is O(len(values) * degree) multiplications.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    vals = _as_fractions(values)
    if degree > len(vals):
        return Fraction(0)
    e = [Fraction(1)] + [Fraction(0)] * degree
    for i, v in enumerate(vals):
        for d in range(min(i + 1, degree), 0, -1):
            e[d] += v * e[d - 1]
    return e[degree]


def vandermonde_det(values: Sequence) -> Fraction:
    """Product of ``y_j - y_i`` over all pairs ``i < j``."""
    vals = _as_fractions(values)
    det = Fraction(1)
    for j in range(len(vals)):
        for i in range(j):
            det *= vals[j] - vals[i]
    return det


def vandermonde_matrix(values: Sequence) -> list[list[Fraction]]:
    """``V[i][j] = values[j] ** i`` (row index is the power)."""
    vals = _as_fractions(values)
    return [[v**i for v in vals] for i in range(len(vals))]


def vandermonde_minor_det(values: Sequence, i: int, j: int) -> Fraction:
    """Determinant of V(values) with row ``i`` and column ``j`` deleted (1-based).

    Uses the closed form ``v(y_hat) * sigma_{n-1, n-i}(y_hat)`` where ``y_hat``
    is ``values`` without entry ``j``.
    """
    vals = _as_fractions(values)
    n = len(vals)
    _check_distinct(vals, "nodes must be distinct")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"minor index ({i}, {j}) out of range for n={n}")
    rest = vals[: j - 1] + vals[j:]
    return vandermonde_det(rest) * elementary_symmetric(rest, n - i)


def mat_vec(matrix: Sequence[Sequence[Fraction]], vector: Sequence[Fraction]) -> list[Fraction]:
    if any(len(row) != len(vector) for row in matrix):
        raise ValueError("dimension mismatch in matrix-vector product")
    return [sum((a * x for a, x in zip(row, vector)), Fraction(0)) for row in matrix]


def solve_vandermonde(values: Sequence, rhs: Sequence) -> list[Fraction]:
    """Exact solution of ``V(values) x = rhs`` by Gaussian elimination."""
    vals = _as_fractions(values)
    b = _as_fractions(rhs)
    n = len(vals)
    if len(b) != n:
        raise ValueError(f"right-hand side has length {len(b)}, expected {n}")
    _check_distinct(vals, "singular Vandermonde system")

    a = [row + [bi] for row, bi in zip(vandermonde_matrix(vals), b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular Vandermonde system")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]

    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n] - sum((a[r][c] * x[c] for c in range(r + 1, n)), Fraction(0))
        x[r] = acc / a[r][r]
    return x
