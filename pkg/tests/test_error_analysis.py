import math
import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from oracles import esp_bruteforce
from pastdiff.error_analysis import (
    Bias,
    DerivativeSign,
    ErrorModel,
    VANISHING_FLAG,
    bias_basis,
    bias_direction,
    bound_report,
    coefficient_magnitude_bound,
    leading_error_term,
    round_up,
    truncation_bound_exact,
    worst_case_bound,
)
from pastdiff.selftest import random_nodes
from pastdiff.stencil import generate_stencil

FIVE_POINT = (-4, -3, -2, -1, 0)


def test_round_up_never_understates():
    for q in [F(1, 3), F(2, 3), F(65536, 6), F(-1, 7), F(10) ** 30 / 7]:
        assert F(round_up(q)) >= q
    assert round_up(F(1, 2)) == 0.5


class TestWorstCaseBound:
    def test_two_point(self):
        assert worst_case_bound(ErrorModel(generate_stencil((-1, -2), 1), 1.0, 0.1)) == 0.4

    def test_five_point(self):
        b = worst_case_bound(ErrorModel(generate_stencil(FIVE_POINT, 1), 1.0, 1.0))
        assert b == pytest.approx(65536 / 6, rel=1e-15)
        assert F(b) >= F(65536, 6)

    @pytest.mark.parametrize("nodes, k", [((-1, -2), 1), (FIVE_POINT, 1), (FIVE_POINT, 3), ((-3, F(-1, 2), 0), 2)])
    def test_doubling_step(self, nodes, k):
        s = generate_stencil(nodes, k)
        b1 = worst_case_bound(ErrorModel(s, 2.5, 0.01))
        b2 = worst_case_bound(ErrorModel(s, 2.5, 0.02))
        assert b2 == b1 * 2 ** (s.n - s.k)

    def test_model_validation(self):
        s = generate_stencil((-1, 0), 1)
        with pytest.raises(ValueError, match="step must be positive"):
            ErrorModel(s, 1.0, 0.0)
        with pytest.raises(ValueError):
            ErrorModel(s, 0.0, 0.1)

    def test_report(self):
        r = bound_report(ErrorModel(generate_stencil((-1, -2), 1), 1.0, 0.1))
        assert r == {"bound": 0.4, "M": 1.0, "h": 0.1, "delta_max": "2", "epsilon": "1", "order": 1}

    def test_exact_form(self):
        s = generate_stencil((-3, F(-1, 2), 0), 1)
        # Delta=3, eps=1/2, n=3, k=1: 3^4 h^2 / ((1/2)^2 1!)
        assert truncation_bound_exact(s, 1, F(1, 4)) == F(81, 16) * 4


class TestMagnitudeBound:
    def test_two_point(self):
        assert coefficient_magnitude_bound(generate_stencil((-1, -2), 1)) == (5, 8)

    def test_five_point(self):
        assert coefficient_magnitude_bound(generate_stencil(FIVE_POINT, 1)) == (680, 1310720)

    def test_random_stencils(self):
        rng = random.Random(11)
        for _ in range(100):
            nodes = random_nodes(rng, rng.randint(2, 8))
            for k in range(1, nodes.n):
                s = generate_stencil(nodes, k)
                actual, bound = coefficient_magnitude_bound(s)
                assert abs(s.weighted_power_sum) <= actual <= bound


class TestLeadingTerm:
    def test_five_point(self):
        t = leading_error_term(generate_stencil(FIVE_POINT, 1))
        assert (t.coefficient, t.derivative_order, t.step_power) == (F(1, 5), 5, 4)
        assert not t.vanishes

    def test_center_difference_vanishes(self):
        t = leading_error_term(generate_stencil((-1, 1), 1))
        assert t.coefficient == 0 and t.vanishes
        assert t.to_dict()["flag"] == VANISHING_FLAG

    def test_two_point(self):
        assert leading_error_term(generate_stencil((-1, -2), 1)).coefficient == F(3, 2)

    def test_matches_power_sum(self):
        rng = random.Random(3)
        for _ in range(60):
            nodes = random_nodes(rng, rng.randint(2, 8))
            for k in range(1, nodes.n):
                s = generate_stencil(nodes, k)
                assert leading_error_term(s).coefficient == -s.weighted_power_sum / math.factorial(s.n)

    def test_json(self):
        d = leading_error_term(generate_stencil(FIVE_POINT, 1)).to_dict()
        assert d == {"coefficient": "1/5", "derivative_order": 5, "step_power": 4, "flag": None}


class TestBias:
    def test_all_negative_cases(self):
        s = generate_stencil((-1, -2), 1)
        assert bias_direction(s, "positive") is Bias.UNDERESTIMATE
        assert bias_direction(s, DerivativeSign.NEGATIVE) is Bias.OVERESTIMATE
        assert bias_direction(s, "unknown") is Bias.INDETERMINATE
        assert bias_basis(s) == "all offsets negative"

    def test_zero_leading(self):
        assert bias_direction(generate_stencil((-1, 1), 1), "positive") is Bias.INDETERMINATE

    def test_extension_beyond_negative_nodes(self):
        s = generate_stencil(FIVE_POINT, 1)
        assert bias_direction(s, "positive") is Bias.UNDERESTIMATE
        assert bias_basis(s).startswith("derived")
        # two-point forward difference: R = -h/2 f'' so it overestimates convex f
        assert bias_direction(generate_stencil((0, 1), 1), "positive") is Bias.OVERESTIMATE

    def test_rejects_bad_sign(self):
        with pytest.raises(ValueError):
            bias_direction(generate_stencil((-1, 0), 1), "sideways")

    @pytest.mark.parametrize("n", range(2, 10))
    def test_all_negative_positivity(self, n):
        pool = [F(-1, 2), -1, F(-3, 2), -2, -3, -5, F(-7, 3), -4, -6, F(-1, 3)]
        for nodes in list(combinations(pool, n))[:40]:
            for k in range(1, n):
                assert (-1) ** (n - k) * esp_bruteforce(nodes, n - k) > 0
                assert bias_direction(generate_stencil(nodes, k), "positive") is Bias.UNDERESTIMATE
