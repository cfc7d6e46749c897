"""Truncation-error quantities for a stencil.

Sign convention: ``R = f^(k)(t) - estimate``, so a positive ``R`` means the
stencil underestimates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from pastdiff.exact_math import elementary_symmetric, format_rational
from pastdiff.stencil import Stencil

VANISHING_FLAG = "order exceeds n−k"


class DerivativeSign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


class Bias(str, enum.Enum):
    UNDERESTIMATE = "underestimate"
    OVERESTIMATE = "overestimate"
    INDETERMINATE = "indeterminate"


def round_up(q: Fraction) -> float:
    """Smallest double not below ``q``."""
    x = float(q)
    if Fraction(x) < q:
        x = math.nextafter(x, math.inf)
    return x


@dataclass(frozen=True)
class ErrorModel:
    """A stencil together with a bound ``M`` on ``|f^(n)|`` over the sampled interval and a step."""

    stencil: Stencil
    M: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step must be positive")
        if not self.M > 0:
            raise ValueError("derivative bound must be positive")


def truncation_bound_exact(stencil: Stencil, M, h) -> Fraction:
    """``M * Delta**(2n-k-1) * h**(n-k) / (eps**(n-1) * (n-k-1)!)`` as a Fraction.

    M and h enter at their exact binary values.
    """
    n, k = stencil.n, stencil.k
    nodes = stencil.nodes
    return (
        Fraction(M)
        * nodes.delta_max ** (2 * n - k - 1)
        * Fraction(h) ** (n - k)
        / (nodes.epsilon ** (n - 1) * math.factorial(n - k - 1))
    )


def worst_case_bound(model: ErrorModel) -> float:
    """Worst-case ``|R|`` given ``|f^(n)| <= M``; rounded toward +inf."""
    return round_up(truncation_bound_exact(model.stencil, model.M, model.h))


def bound_report(model: ErrorModel) -> dict:
    nodes = model.stencil.nodes
    return {
        "bound": worst_case_bound(model),
        "M": float(model.M),
        "h": float(model.h),
        "delta_max": format_rational(nodes.delta_max),
        "epsilon": format_rational(nodes.epsilon),
        "order": model.stencil.formal_order,
    }


def coefficient_magnitude_bound(stencil: Stencil) -> tuple[Fraction, Fraction]:
    """``(sum_j |c_j delta_j**n|, Delta**(2n-k-1) n! / (eps**(n-1) (n-k-1)!))``."""
    n, k = stencil.n, stencil.k
    nodes = stencil.nodes
    actual = sum((abs(c * d**n) for c, d in zip(stencil.coefficients, nodes.offsets)), Fraction(0))
    bound = (
        nodes.delta_max ** (2 * n - k - 1)
        * math.factorial(n)
        / (nodes.epsilon ** (n - 1) * math.factorial(n - k - 1))
    )
    if actual > bound:
        raise ArithmeticError(f"coefficient magnitude {actual} exceeds its bound {bound}")
    return actual, bound


@dataclass(frozen=True)
class LeadingTerm:
    """``R = coefficient * h**step_power * f^(derivative_order)(t) + o(h**step_power)``."""

    coefficient: Fraction
    derivative_order: int
    step_power: int

    @property
    def vanishes(self) -> bool:
        return self.coefficient == 0

    def to_dict(self) -> dict:
        return {
            "coefficient": format_rational(self.coefficient),
            "derivative_order": self.derivative_order,
            "step_power": self.step_power,
            "flag": VANISHING_FLAG if self.vanishes else None,
        }


def leading_error_term(stencil: Stencil) -> LeadingTerm:
    n, k = stencil.n, stencil.k
    coeff = (-1) ** (n - k) * math.factorial(k) * elementary_symmetric(stencil.nodes.offsets, n - k) / math.factorial(n)
    return LeadingTerm(coeff, n, n - k)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def bias_direction(stencil: Stencil, nth_derivative_sign) -> Bias:
    """Asymptotic (small ``h``) bias given the sign of ``f^(n)(t)``.

    For all-negative offsets the leading coefficient is always positive, so a
    positive ``f^(n)`` means underestimation.  Other offset sets are decided
    by the sign of the leading coefficient itself.
    """
    sign = DerivativeSign(nth_derivative_sign)
    if sign is DerivativeSign.UNKNOWN:
        return Bias.INDETERMINATE
    s = _sign(leading_error_term(stencil).coefficient)
    s *= 1 if sign is DerivativeSign.POSITIVE else -1
    if s > 0:
        return Bias.UNDERESTIMATE
    if s < 0:
        return Bias.OVERESTIMATE
    return Bias.INDETERMINATE


def bias_basis(stencil: Stencil) -> str:
    """Where a bias verdict comes from: the all-negative node case or the sign extension."""
    if stencil.nodes.all_negative():
        return "all offsets negative"
    return "derived from sign of leading coefficient"
