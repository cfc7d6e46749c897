"""Stencil construction, closed-form coefficients and evaluation.

A stencil of order ``k`` over offsets ``delta_1..delta_n`` is the coefficient
vector ``c`` for which ``(1/h**k) * sum(c_j * f(t + delta_j*h))`` estimates
``f^(k)(t)``.  Coefficients are kept as exact fractions; floats appear only in
:func:`evaluate_stencil`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from pastdiff.exact_math import (
    elementary_symmetric,
    format_rational,
    parse_rational,
    solve_vandermonde,
)


@dataclass(frozen=True)
class ReferenceInterval:
    """Smallest closed interval holding every sample point ``t + delta_j*h``."""

    lower: float | Fraction
    upper: float | Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("interval lower end exceeds upper end")

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class NodeSet:
    """Distinct node offsets, in the caller's order."""

    offsets: tuple[Fraction, ...]

    def __post_init__(self):
        offs = tuple(parse_rational(o) if isinstance(o, str) else Fraction(o) for o in self.offsets)
        object.__setattr__(self, "offsets", offs)
        if len(offs) < 2:
            raise ValueError("at least two nodes are required")
        if len(set(offs)) != len(offs):
            raise ValueError("nodes must be distinct")

    @classmethod
    def parse(cls, text: str) -> "NodeSet":
        """Build from a comma-separated list such as ``"-4,-3,-2,-1,0"``."""
        parts = [p for p in text.split(",") if p.strip()]
        return cls(tuple(parse_rational(p) for p in parts))

    @property
    def n(self) -> int:
        return len(self.offsets)

    @property
    def delta_max(self) -> Fraction:
        """Largest absolute offset."""
        return max(abs(d) for d in self.offsets)

    @property
    def gaps(self) -> tuple[Fraction, ...]:
        """Distance from each offset to its nearest neighbour."""
        return tuple(
            min(abs(d - e) for i, e in enumerate(self.offsets) if i != j)
            for j, d in enumerate(self.offsets)
        )

    @property
    def epsilon(self) -> Fraction:
        """Smallest gap between any two offsets."""
        return min(self.gaps)

    def all_negative(self) -> bool:
        return all(d < 0 for d in self.offsets)

    def without(self, j: int) -> list[Fraction]:
        """Offsets with the ``j``-th (1-based) removed."""
        return list(self.offsets[: j - 1] + self.offsets[j:])

    def interval(self, t, h) -> ReferenceInterval:
        points = [t + d * h for d in self.offsets] if isinstance(t, Fraction) else [
            t + float(d) * h for d in self.offsets
        ]
        return ReferenceInterval(min(points), max(points))

    def __str__(self) -> str:
        return ",".join(format_rational(d) for d in self.offsets)


def _as_nodes(nodes) -> NodeSet:
    return nodes if isinstance(nodes, NodeSet) else NodeSet(tuple(nodes))


def _check_order(k: int, n: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or not (0 < k < n):
        raise ValueError("derivative order out of range")


@dataclass(frozen=True)
class Stencil:
    nodes: NodeSet
    k: int
    coefficients: tuple[Fraction, ...]
    weighted_power_sum: Fraction
    leading_coefficient: Fraction

    @property
    def n(self) -> int:
        return self.nodes.n

    @property
    def formal_order(self) -> int:
        return self.n - self.k

    @cached_property
    def float_coefficients(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coefficients)

    def to_dict(self) -> dict:
        return {
            "nodes": [format_rational(d) for d in self.nodes.offsets],
            "k": self.k,
            "coefficients": [format_rational(c) for c in self.coefficients],
            "coefficients_decimal": [float(f"{float(c):.17g}") for c in self.coefficients],
            "formal_order": self.formal_order,
            "weighted_power_sum": format_rational(self.weighted_power_sum),
            "leading_coefficient": format_rational(self.leading_coefficient),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Stencil":
        """Rebuild from :meth:`to_dict` output, checking the stored coefficients."""
        nodes = NodeSet(tuple(parse_rational(d) for d in data["nodes"]))
        stencil = generate_stencil(nodes, int(data["k"]))
        if "coefficients" in data:
            stored = tuple(parse_rational(c) for c in data["coefficients"])
            if stored != stencil.coefficients:
                raise ValueError("stored coefficients do not solve the moment system")
        return stencil

    @classmethod
    def from_json(cls, text: str) -> "Stencil":
        return cls.from_dict(json.loads(text))


def _moment_rhs(n: int, k: int) -> list[Fraction]:
    rhs = [Fraction(0)] * n
    rhs[k] = Fraction(math.factorial(k))
    return rhs


def generate_stencil(nodes, k: int) -> Stencil:
    """Solve the moment system ``sum_j c_j delta_j**i = k! [i == k]``, i < n."""
    nodes = _as_nodes(nodes)
    _check_order(k, nodes.n)
    coeffs = tuple(solve_vandermonde(nodes.offsets, _moment_rhs(nodes.n, k)))
    n = nodes.n
    sigma = elementary_symmetric(nodes.offsets, n - k)
    identity_s = (-1) ** (k + n + 1) * math.factorial(k) * sigma
    direct_s = sum((c * d**n for c, d in zip(coeffs, nodes.offsets)), Fraction(0))
    if direct_s != identity_s:
        raise ArithmeticError("power-sum identity violated; moment solve is wrong")
    leading = (-1) ** (n - k) * math.factorial(k) * sigma / math.factorial(n)
    return Stencil(nodes, k, coeffs, direct_s, leading)


def closed_form_coefficient(nodes, k: int, j: int) -> Fraction:
    """``c_j`` straight from the Cramer-rule closed form, no linear solve.

    ``c_j = (-1)**(n+k+1) * k! * sigma_{n-1,n-k-1}(others) / prod_{i != j}(delta_j - delta_i)``
    """
    nodes = _as_nodes(nodes)
    n = nodes.n
    _check_order(k, n)
    if not 1 <= j <= n:
        raise ValueError(f"coefficient index {j} out of range for n={n}")
    dj = nodes.offsets[j - 1]
    others = nodes.without(j)
    denom = Fraction(1)
    for d in others:
        denom *= dj - d
    sign = (-1) ** (n + k + 1)
    return sign * math.factorial(k) * elementary_symmetric(others, n - k - 1) / denom


def special_case_coefficients(n: int, k: int) -> list[Fraction]:
    """Coefficients for the offsets ``-1, -2, ..., -n`` when ``k`` is 1 or 2.

    Uses harmonic sums of ``1, 1/2, ..., 1/n`` instead of a solve.
    """
    if k not in (1, 2):
        raise ValueError("special case covers k=1,2 only")
    if n < 2 or k >= n:
        raise ValueError("derivative order out of range")
    recips = [Fraction(1, i) for i in range(1, n + 1)]
    harmonic = sum(recips)
    out = []
    for j in range(1, n + 1):
        partial = harmonic - Fraction(1, j)
        if k == 1:
            c = (-1) ** (j + 1) * math.comb(n, j) * partial
        else:
            pairs = elementary_symmetric(recips, 2)
            c = (-1) ** (j + 1) * 2 * math.comb(n, j) * (pairs - Fraction(1, j) * partial)
        out.append(c)
    return out


def moment_report(stencil: Stencil, coefficients: Sequence | None = None) -> list[Fraction]:
    """Residuals ``sum_j c_j delta_j**i - k! [i == k]`` for ``i = 0..n-1``.

    ``coefficients`` overrides the stencil's own, for checking candidates.
    """
    coeffs = stencil.coefficients if coefficients is None else [Fraction(c) for c in coefficients]
    if len(coeffs) != stencil.n:
        raise ValueError("coefficient count does not match node count")
    rhs = _moment_rhs(stencil.n, stencil.k)
    return [
        sum((c * d**i for c, d in zip(coeffs, stencil.nodes.offsets)), Fraction(0)) - rhs[i]
        for i in range(stencil.n)
    ]


def weighted_power_sum(stencil: Stencil) -> Fraction:
    """``S = sum_j c_j delta_j**n``, checked against ``(-1)**(k+n+1) k! sigma_{n,n-k}``."""
    n, k = stencil.n, stencil.k
    s = sum((c * d**n for c, d in zip(stencil.coefficients, stencil.nodes.offsets)), Fraction(0))
    closed = (-1) ** (k + n + 1) * math.factorial(k) * elementary_symmetric(stencil.nodes.offsets, n - k)
    if s != closed:
        raise ArithmeticError(f"power sum {s} disagrees with closed form {closed}")
    return s


def evaluate_stencil(stencil: Stencil, samples: Sequence[float], h: float) -> float:
    """Apply the stencil to ``samples[j] = f(t + delta_j*h)`` in node order."""
    if not h > 0:
        raise ValueError("step must be positive")
    if len(samples) != stencil.n:
        raise ValueError(f"expected {stencil.n} samples, got {len(samples)}")
    total = math.fsum(c * float(y) for c, y in zip(stencil.float_coefficients, samples))
    return total / h**stencil.k


def evaluate_exact(stencil: Stencil, samples: Sequence, h) -> Fraction:
    """Rational counterpart of :func:`evaluate_stencil`."""
    h = Fraction(h)
    if h <= 0:
        raise ValueError("step must be positive")
    if len(samples) != stencil.n:
        raise ValueError(f"expected {stencil.n} samples, got {len(samples)}")
    total = sum((c * Fraction(y) for c, y in zip(stencil.coefficients, samples)), Fraction(0))
    return total / h**stencil.k
