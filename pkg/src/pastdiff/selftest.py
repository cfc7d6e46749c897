"""Cross-checks of the exact identities on seeded random node sets."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Iterator

from pastdiff.error_analysis import coefficient_magnitude_bound, leading_error_term
from pastdiff.exact_math import vandermonde_matrix, vandermonde_minor_det
from pastdiff.stencil import (
    NodeSet,
    closed_form_coefficient,
    generate_stencil,
    moment_report,
    weighted_power_sum,
)


def random_nodes(rng: random.Random, n: int, lo: int = -10, hi: int = 10, max_den: int = 6) -> NodeSet:
    """``n`` distinct rationals in ``[lo, hi]`` with denominators up to ``max_den``."""
    seen: set[Fraction] = set()
    while len(seen) < n:
        den = rng.randint(1, max_den)
        seen.add(Fraction(rng.randint(lo * den, hi * den), den))
    offsets = list(seen)
    rng.shuffle(offsets)
    return NodeSet(tuple(offsets))


def laplace_det(m: list[list[Fraction]]) -> Fraction:
    """Determinant by cofactor expansion along the first row."""
    if not m:
        return Fraction(1)
    if len(m) == 1:
        return m[0][0]
    total = Fraction(0)
    for j, a in enumerate(m[0]):
        if a:
            sub = [row[:j] + row[j + 1 :] for row in m[1:]]
            total += (-1) ** j * a * laplace_det(sub)
    return total


def _stencils(rng: random.Random, count: int, n_max: int = 9):
    for _ in range(count):
        nodes = random_nodes(rng, rng.randint(2, n_max))
        for k in range(1, nodes.n):
            yield generate_stencil(nodes, k)


def check_moments(rng):
    return all(all(r == 0 for r in moment_report(s)) for s in _stencils(rng, 40))


def check_closed_form(rng):
    return all(
        closed_form_coefficient(s.nodes, s.k, j + 1) == c
        for s in _stencils(rng, 40)
        for j, c in enumerate(s.coefficients)
    )


def check_power_sum(rng):
    for s in _stencils(rng, 40):
        weighted_power_sum(s)  # raises on mismatch
        if leading_error_term(s).coefficient != -s.weighted_power_sum / math.factorial(s.n):
            return False
    return True


def check_magnitude_bound(rng):
    for s in _stencils(rng, 40):
        actual, bound = coefficient_magnitude_bound(s)
        if not abs(s.weighted_power_sum) <= actual <= bound:
            return False
    return True


def check_minors(rng):
    for _ in range(10):
        nodes = random_nodes(rng, rng.randint(2, 5))
        v = vandermonde_matrix(nodes.offsets)
        n = nodes.n
        for i, j in itertools.product(range(n), repeat=2):
            minor = [row[:j] + row[j + 1 :] for r, row in enumerate(v) if r != i]
            if laplace_det(minor) != vandermonde_minor_det(nodes.offsets, i + 1, j + 1):
                return False
    return True


CHECKS: dict[str, Callable[[random.Random], bool]] = {
    "moment conditions": check_moments,
    "closed-form coefficients": check_closed_form,
    "power-sum identity": check_power_sum,
    "coefficient magnitude bound": check_magnitude_bound,
    "minor determinants": check_minors,
}


def run(seed: int = 20240601) -> Iterator[tuple[str, bool, str]]:
    for name, check in CHECKS.items():
        try:
            ok, detail = check(random.Random(seed)), ""
        except ArithmeticError as exc:
            ok, detail = False, str(exc)
        yield name, ok, detail
