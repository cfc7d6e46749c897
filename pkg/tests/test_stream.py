import io
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pastdiff.stencil import evaluate_stencil, generate_stencil
from pastdiff.stream import (
    SampleWindow,
    StreamConfig,
    StreamProcessor,
    estimate_derivative,
    offline_estimates,
    quantize_offset,
    rationalize,
    read_samples_csv,
    simplest_between,
    stream_process,
    window_to_nodes,
    write_estimates_csv,
)


def window(ts, f=lambda t: t * t):
    return SampleWindow(tuple((t, f(t)) for t in ts))


class TestSimplestBetween:
    @pytest.mark.parametrize(
        "lo, hi, expected",
        [
            (F(-1, 2), F(1, 2), 0),
            (F(13, 10), F(14, 10), F(4, 3)),
            (F(-14, 10), F(-13, 10), F(-4, 3)),
            (F(3), None, 4),
            (F(2), F(3), F(5, 2)),
            (F(31, 100), F(32, 100), F(5, 16)),
        ],
    )
    def test_cases(self, lo, hi, expected):
        assert simplest_between(lo, hi) == expected

    @given(st.fractions(min_value=-50, max_value=50), st.fractions(min_value=F(1, 10**3), max_value=3, max_denominator=10**4))
    def test_strictly_inside_and_minimal(self, lo, width):
        hi = lo + width
        q = simplest_between(lo, hi)
        assert lo < q < hi
        # no smaller denominator fits
        for den in range(1, q.denominator):
            p = math.floor(lo * den) + 1
            assert not F(p, den) < hi

    def test_rationalize_recovers_small_fractions(self):
        for q in [F(-4, 3), F(-7, 2), F(-11, 4), F(0), F(-1)]:
            assert rationalize(quantize_offset(float(q), 6), 6) == q


class TestConfig:
    @pytest.mark.parametrize("n, k, digits", [(1, 1, 6), (3, 0, 6), (3, 3, 6), (3, 1, 0), (3, 1, 13)])
    def test_invalid(self, n, k, digits):
        with pytest.raises(ValueError):
            StreamConfig(n, k, digits)


class TestWindowToNodes:
    def test_regular(self):
        h, nodes = window_to_nodes(window([0, 1, 2, 3, 4]), StreamConfig(5, 1))
        assert h == 1 and nodes.offsets == (-4, -3, -2, -1, 0)

    def test_irregular(self):
        h, nodes = window_to_nodes(window([0, 0.5, 2]), StreamConfig(3, 1))
        assert h == 1.5 and nodes.offsets == (F(-4, 3), -1, 0)

    def test_quantization_collision(self):
        with pytest.raises(ValueError, match="samples too close for configured quantization"):
            window_to_nodes(window([0, 1e-4, 1, 2]), StreamConfig(4, 1, 3))

    def test_newest_offsets(self):
        rng = random.Random(5)
        ts = sorted(rng.uniform(0, 10) for _ in range(6))
        _, nodes = window_to_nodes(window(ts), StreamConfig(6, 2))
        assert nodes.offsets[-1] == 0 and nodes.offsets[-2] == -1

    def test_window_must_be_full(self):
        with pytest.raises(ValueError):
            window_to_nodes(window([0, 1, 2]), StreamConfig(4, 1))

    def test_window_must_increase(self):
        with pytest.raises(ValueError):
            window([0, 2, 1])


class TestEstimate:
    def test_square_regular(self):
        assert estimate_derivative(window([0, 1, 2, 3, 4]), StreamConfig(5, 1)) == pytest.approx(8.0, rel=1e-12)

    def test_sin_five_point(self):
        w = window([0.96, 0.97, 0.98, 0.99, 1.00], math.sin)
        assert abs(estimate_derivative(w, StreamConfig(5, 1)) - math.cos(1)) < 2e-9

    def test_square_irregular(self):
        assert estimate_derivative(window([0, 0.5, 2]), StreamConfig(3, 1)) == pytest.approx(4.0, rel=1e-12)

    def test_deterministic(self):
        w = window([0.1, 0.35, 0.5, 1.2], math.exp)
        cfg = StreamConfig(4, 2)
        assert estimate_derivative(w, cfg) == estimate_derivative(w, cfg)

    def test_matches_direct_stencil(self):
        w = window([0, 0.5, 2])
        direct = evaluate_stencil(generate_stencil((F(-4, 3), -1, 0), 1), [0, 0.25, 4], 1.5)
        assert estimate_derivative(w, StreamConfig(3, 1)) == direct


class TestStreamProcess:
    def test_cubic_regular(self):
        cfg = StreamConfig(4, 2)
        proc = StreamProcessor(cfg)
        samples = [(0.1 * i, (0.1 * i) ** 3) for i in range(100)]
        out = list(stream_process(samples, cfg, proc))
        assert len(out) == 97
        for t, est in out:
            assert est == pytest.approx(6 * t, rel=1e-9, abs=1e-9)
        assert (proc.stats.misses, proc.stats.hits) == (1, 96)
        assert proc.solves == 1

    def test_warm_up(self):
        cfg = StreamConfig(5, 1)
        assert list(stream_process([(0, 0), (1, 1), (2, 4), (3, 9)], cfg)) == []

    def test_rejects_non_increasing(self):
        cfg = StreamConfig(3, 1)
        proc = StreamProcessor(cfg)
        data = [(0, 0), (1, 1), (1, 5), (0.5, 2), (2, 4), (math.nan, 1), (3, 9)]
        out = list(stream_process(data, cfg, proc))
        assert [t for t, _ in out] == [2, 3]
        assert [(r.index, r.reason) for r in proc.rejected] == [
            (2, "non-increasing timestamp"),
            (3, "non-increasing timestamp"),
            (5, "non-finite sample"),
        ]
        assert out[0][1] == pytest.approx(4.0)

    def test_collision_rejected_and_skipped(self):
        cfg = StreamConfig(4, 1, 3)
        proc = StreamProcessor(cfg)
        out = list(stream_process([(0, 0), (1e-4, 0), (1, 1), (2, 4), (3, 9)], cfg, proc))
        assert proc.rejected[0].reason == "samples too close for configured quantization"
        assert len(out) == 1

    @given(st.lists(st.floats(0.01, 2.0), min_size=0, max_size=25), st.integers(2, 5))
    def test_output_count(self, gaps, n):
        ts = [sum(gaps[:i]) for i in range(len(gaps) + 1)]
        cfg = StreamConfig(n, 1)
        out = list(stream_process([(t, math.sin(t)) for t in ts], cfg))
        assert len(out) == max(0, len(ts) - n + 1)
        assert all(math.isfinite(e) for _, e in out)

    def test_cache_transparency(self):
        rng = random.Random(2)
        ts = [0.0]
        for _ in range(200):
            ts.append(ts[-1] + rng.choice([0.25, 0.5, 0.75]))
        samples = [(t, math.cos(t)) for t in ts]
        cfg = StreamConfig(4, 1)
        proc = StreamProcessor(cfg)
        assert list(stream_process(samples, cfg, proc)) == offline_estimates(samples, cfg)
        assert proc.stats.hits > 0

    @pytest.mark.parametrize("a, b", [(2.0, 10.0), (0.5, -3.0), (3.7, 1.25)])
    def test_shift_scale_covariance(self, a, b):
        rng = random.Random(9)
        ts = [0.0]
        for _ in range(30):
            ts.append(ts[-1] + rng.uniform(0.05, 0.2))
        for k in (1, 2):
            cfg = StreamConfig(5, k)
            base = [e for _, e in stream_process([(t, math.exp(t)) for t in ts], cfg)]
            # g(s) = exp((s - b)/a) sampled at s = a t + b has g^(k) = a^-k f^(k)
            moved = [e for _, e in stream_process([(a * t + b, math.exp(t)) for t in ts], cfg)]
            for e0, e1 in zip(base, moved):
                assert e1 == pytest.approx(e0 * a**-k, rel=1e-6)


class TestCsv:
    def test_read_and_diagnostics(self):
        errors = []
        text = "t,y\n0,1\n1,x\n\n2,3\n4\n"
        rows = list(read_samples_csv(io.StringIO(text), lambda line, reason: errors.append(line)))
        assert rows == [(2, 0.0, 1.0), (5, 2.0, 3.0)]
        assert errors == [3, 6]

    def test_bad_header(self):
        with pytest.raises(ValueError):
            list(read_samples_csv(io.StringIO("time,value\n0,1\n")))

    def test_write(self):
        buf = io.StringIO()
        assert write_estimates_csv(buf, [(1.0, 0.1), (2.5, -3.0)]) == 2
        assert buf.getvalue() == "t,estimate\n1.0,0.1\n2.5,-3.0\n"
