"""Empirical order-of-accuracy, leading-constant and bound checks."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from pastdiff.error_analysis import leading_error_term, truncation_bound_exact, round_up
from pastdiff.stencil import NodeSet, Stencil, evaluate_stencil, generate_stencil

EPS = np.finfo(float).eps
ROUNDOFF_FACTOR = 100.0
GRID_SAFETY = 1.01


@dataclass(frozen=True)
class TestFunction:
    """Analytic function with closed-form derivatives of every order used here."""

    __test__ = False  # keep pytest from collecting this class

    id: str
    derivative: Callable[[int, float], float]
    # exact max of |f^(m)| over [lo, hi], or None to fall back to a fine grid
    max_abs: Callable[[int, float, float], float] | None = None

    def __call__(self, t: float) -> float:
        return self.derivative(0, t)

    def max_abs_derivative(self, m: int, lo: float, hi: float) -> float:
        if self.max_abs is not None:
            return self.max_abs(m, lo, hi)
        grid = np.linspace(lo, hi, 2001)
        return GRID_SAFETY * max(abs(self.derivative(m, x)) for x in grid)

    def negated(self) -> "TestFunction":
        d = self.derivative
        return TestFunction(
            self.id[1:] if self.id.startswith("-") else "-" + self.id,
            lambda m, t: -d(m, t),
            self.max_abs,
        )


def _sin_derivative(m: int, t: float) -> float:
    return (math.sin, math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x))[m % 4](t)


def _contains_peak(lo: float, hi: float, phase: float) -> bool:
    """Whether ``[lo, hi]`` holds a point ``phase + p*pi``."""
    return math.ceil((lo - phase) / math.pi) <= math.floor((hi - phase) / math.pi)


def _sin_max_abs(m: int, lo: float, hi: float) -> float:
    # |sin^(m)| is |sin| for even m, |cos| for odd m
    phase = math.pi / 2 if m % 2 == 0 else 0.0
    if _contains_peak(lo, hi, phase):
        return 1.0
    return max(abs(_sin_derivative(m, lo)), abs(_sin_derivative(m, hi)))


def _log1p_derivative(m: int, t: float) -> float:
    if m == 0:
        return math.log1p(t)
    return (-1) ** (m + 1) * math.factorial(m - 1) / (1.0 + t) ** m


def _log1p_max_abs(m: int, lo: float, hi: float) -> float:
    if lo <= -1.0:
        return math.inf
    if m == 0:
        return max(abs(math.log1p(lo)), abs(math.log1p(hi)))
    return math.factorial(m - 1) / (1.0 + lo) ** m


def _runge_derivative(m: int, t: float) -> float:
    # 1/(1+t^2) = Im(1/(t-i)); differentiate the simple pole
    return ((-1) ** m * math.factorial(m) / (complex(t, -1.0) ** (m + 1))).imag


def poly_function(coeffs: Sequence[float]) -> TestFunction:
    """Polynomial with ascending coefficients ``coeffs``."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    derivs: dict[int, np.polynomial.Polynomial] = {}

    def derivative(m: int, t: float) -> float:
        if m not in derivs:
            derivs[m] = p.deriv(m) if m else p
        return float(derivs[m](t))

    label = ",".join(repr(float(c)) for c in coeffs)
    return TestFunction(f"poly:{label}", derivative)


BUILTINS: dict[str, TestFunction] = {
    "sin": TestFunction("sin", _sin_derivative, _sin_max_abs),
    "exp": TestFunction("exp", lambda m, t: math.exp(t), lambda m, lo, hi: math.exp(hi)),
    "log1p": TestFunction("log1p", _log1p_derivative, _log1p_max_abs),
    "runge": TestFunction("runge", _runge_derivative),
}


def get_function(name: str) -> TestFunction:
    """Look up ``sin``, ``exp``, ``log1p``, ``runge`` or ``poly:c0,c1,...``.

    A leading ``-`` negates the function.
    """
    name = name.strip()
    if name.startswith("-"):
        return get_function(name[1:]).negated()
    if name.startswith("poly:"):
        return poly_function([float(c) for c in name[5:].split(",") if c.strip()])
    try:
        return BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}") from None


def default_grid(h_max: float = 1e-1, h_min: float = 1e-3, points: int = 12) -> np.ndarray:
    return np.geomspace(h_max, h_min, points)


def sample_function(fn: TestFunction, nodes: NodeSet, t0: float, h: float) -> list[float]:
    return [fn(t0 + float(d) * h) for d in nodes.offsets]


def roundoff_floor(fn: TestFunction, t0: float, k: int, h: float) -> float:
    """Error level below which a measurement is dominated by float rounding."""
    scale = max(abs(fn.derivative(k, t0)), abs(fn(t0)))
    return float(ROUNDOFF_FACTOR * EPS * scale / h**k)


@dataclass
class ConvergenceRow:
    h: float
    error: float
    scaled: float  # error / h**(n-k)
    usable: bool


@dataclass
class ConvergenceReport:
    nodes: NodeSet
    k: int
    function: str
    t0: float
    rows: list[ConvergenceRow]
    fitted_slope: float
    leading_estimate: float
    formal_order: int
    predicted_leading: float = field(default=math.nan)

    @property
    def usable_rows(self) -> list[ConvergenceRow]:
        return [r for r in self.rows if r.usable]

    def to_dict(self) -> dict:
        return {
            "nodes": str(self.nodes).split(","),
            "k": self.k,
            "function": self.function,
            "t0": self.t0,
            "formal_order": self.formal_order,
            "fitted_slope": self.fitted_slope,
            "leading_estimate": self.leading_estimate,
            "predicted_leading": self.predicted_leading,
            "rows": [
                {"h": r.h, "error": r.error, "scaled_error": r.scaled, "usable": r.usable}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "error", "scaled_error", "usable"])
        for r in self.rows:
            w.writerow([repr(r.h), repr(r.error), repr(r.scaled), int(r.usable)])
        return buf.getvalue()

    def to_text(self) -> str:
        p = self.formal_order
        lines = [f"{'h':>12} {'|error|':>12} {f'error/h^{p}':>14}  used"]
        for r in self.rows:
            lines.append(f"{r.h:12.4e} {r.error:12.4e} {r.scaled:14.6e}  {'yes' if r.usable else 'no'}")
        lines.append(f"fitted slope: {self.fitted_slope:.4f} (formal order {p})")
        lines.append(f"leading estimate: {self.leading_estimate:.6e} (predicted {self.predicted_leading:.6e})")
        return "\n".join(lines)


class RoundoffRegimeError(ValueError):
    pass


def _as_stencil(nodes, k: int) -> Stencil:
    if isinstance(nodes, Stencil):
        return nodes
    return generate_stencil(nodes if isinstance(nodes, NodeSet) else NodeSet(tuple(nodes)), k)


def _extrapolate_leading(rows: list[ConvergenceRow]) -> float:
    # well-resolved rows only; extrapolate error/h^p linearly in h to h = 0
    best = max(r.error for r in rows)
    resolved = [r for r in rows if r.error >= 1e-3 * best] or rows
    resolved = sorted(resolved, key=lambda r: r.h)[:2]
    if len(resolved) < 2:
        return resolved[0].scaled
    (h1, s1), (h2, s2) = (resolved[0].h, resolved[0].scaled), (resolved[1].h, resolved[1].scaled)
    return (s1 * h2 - s2 * h1) / (h2 - h1)


def convergence_study(
    nodes,
    k: int,
    fn: TestFunction | str,
    t0: float,
    h_grid: Sequence[float] | None = None,
) -> ConvergenceReport:
    """Measure ``|f^(k)(t0) - estimate|`` across ``h_grid`` and fit the log-log slope."""
    if isinstance(fn, str):
        fn = get_function(fn)
    stencil = _as_stencil(nodes, k)
    grid = default_grid() if h_grid is None else np.asarray(h_grid, dtype=float)
    if np.any(np.diff(grid) >= 0) or np.any(grid <= 0):
        raise ValueError("h grid must be positive and strictly decreasing")

    p = stencil.formal_order
    exact = fn.derivative(stencil.k, t0)
    rows = []
    for h in grid:
        h = float(h)
        est = evaluate_stencil(stencil, sample_function(fn, stencil.nodes, t0, h), h)
        err = abs(exact - est)
        rows.append(ConvergenceRow(h, err, err / h**p, bool(err >= roundoff_floor(fn, t0, stencil.k, h))))

    usable = [r for r in rows if r.usable]
    if not usable:
        raise RoundoffRegimeError("grid entirely in roundoff regime")
    if len(usable) >= 2:
        slope = float(np.polyfit(np.log([r.h for r in usable]), np.log([r.error for r in usable]), 1)[0])
    else:
        slope = math.nan

    lead = leading_error_term(stencil)
    predicted = abs(float(lead.coefficient) * fn.derivative(stencil.n, t0))
    return ConvergenceReport(
        nodes=stencil.nodes,
        k=stencil.k,
        function=fn.id,
        t0=t0,
        rows=rows,
        fitted_slope=slope,
        leading_estimate=_extrapolate_leading(usable),
        formal_order=p,
        predicted_leading=predicted,
    )


@dataclass(frozen=True)
class BoundAudit:
    measured: float
    bound: float
    M: float
    floor: float
    ok: bool


def bound_audit(nodes, k: int, fn: TestFunction | str, t0: float, h: float) -> BoundAudit:
    """Compare the measured error with the worst-case truncation bound.

    ``M`` is the maximum of ``|f^(n)|`` over the sampled points and ``t0``.  A
    measurement at or below the rounding floor counts as zero truncation error.
    """
    if isinstance(fn, str):
        fn = get_function(fn)
    if not h > 0:
        raise ValueError("step must be positive")
    stencil = _as_stencil(nodes, k)
    interval = stencil.nodes.interval(t0, h)
    # the Lagrange points lie between t0 and each sample, so t0 joins the hull
    M = fn.max_abs_derivative(stencil.n, min(interval.lower, t0), max(interval.upper, t0))
    est = evaluate_stencil(stencil, sample_function(fn, stencil.nodes, t0, h), h)
    measured = abs(fn.derivative(stencil.k, t0) - est)
    bound = round_up(truncation_bound_exact(stencil, M, h)) if math.isfinite(M) else math.inf
    floor = roundoff_floor(fn, t0, stencil.k, h)
    return BoundAudit(measured, bound, M, floor, measured <= max(bound, floor))


@dataclass(frozen=True)
class BiasRow:
    h: float
    signed_error: float  # f^(k)(t0) - estimate
    resolvable: bool  # predicted leading term clears the rounding floor


def bias_audit(nodes, k: int, fn: TestFunction | str, t0: float, h_grid: Sequence[float] | None = None) -> list[BiasRow]:
    """Signed errors over ``h_grid``.

    A row is resolvable when ``|leading coefficient * f^(n)(t0)| * h**(n-k)``
    is at least the rounding floor; that test uses only predicted quantities,
    never the measured error.
    """
    if isinstance(fn, str):
        fn = get_function(fn)
    stencil = _as_stencil(nodes, k)
    grid = default_grid() if h_grid is None else h_grid
    lead = abs(float(leading_error_term(stencil).coefficient) * fn.derivative(stencil.n, t0))
    exact = fn.derivative(stencil.k, t0)
    rows = []
    for h in grid:
        h = float(h)
        est = evaluate_stencil(stencil, sample_function(fn, stencil.nodes, t0, h), h)
        predicted = lead * h**stencil.formal_order
        rows.append(BiasRow(h, exact - est, bool(predicted >= roundoff_floor(fn, t0, stencil.k, h))))
    return rows
