"""Sliding-window derivative estimates over irregular (t, y) streams.

Each window is normalised so its newest sample sits at offset 0 and the most
recent gap is the step ``h``.  Offsets are rounded to a fixed number of decimal
digits and replaced by the simplest fraction inside the rounding cell; the
rounded integers key a coefficient cache, so a regular stream solves once.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence, TextIO

from pastdiff.stencil import NodeSet, Stencil, evaluate_stencil, generate_stencil


class Sample(NamedTuple):
    t: float
    y: float


@dataclass(frozen=True)
class StreamConfig:
    n: int
    k: int
    quantization_digits: int = 6

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("window size must be at least 2")
        if not 0 < self.k < self.n:
            raise ValueError("derivative order out of range")
        if not 1 <= self.quantization_digits <= 12:
            raise ValueError("quantization_digits must be in 1..12")


@dataclass(frozen=True)
class SampleWindow:
    samples: tuple[Sample, ...]

    def __post_init__(self):
        samples = tuple(Sample(float(t), float(y)) for t, y in self.samples)
        object.__setattr__(self, "samples", samples)
        for a, b in zip(samples, samples[1:]):
            if not b.t > a.t:
                raise ValueError("timestamps must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def values(self) -> list[float]:
        return [s.y for s in self.samples]


def simplest_between(lo: Fraction, hi: Fraction | None) -> Fraction:
    """Fraction with the smallest denominator strictly inside ``(lo, hi)``.

    ``hi=None`` stands for +infinity.
    """
    if hi is not None and not lo < hi:
        raise ValueError("empty interval")
    if lo < 0 and (hi is None or hi > 0):
        return Fraction(0)
    if hi is not None and hi <= 0:
        return -simplest_between(-hi, -lo)
    whole = math.floor(lo)
    if hi is None or whole + 1 < hi:
        return Fraction(whole + 1)
    # lo and hi share the integer part: recurse on the reciprocal tails
    upper = None if lo == whole else 1 / (lo - whole)
    return whole + 1 / simplest_between(1 / (hi - whole), upper)


def quantize_offset(delta: float, digits: int) -> int:
    """``delta`` rounded to ``digits`` decimals, as an integer count of 10**-digits."""
    return round(Fraction(delta) * 10**digits)


def rationalize(q: int, digits: int) -> Fraction:
    """Simplest fraction whose rounding to ``digits`` decimals gives ``q``."""
    scale = 10**digits
    return simplest_between(Fraction(2 * q - 1, 2 * scale), Fraction(2 * q + 1, 2 * scale))


def _window_key(window: SampleWindow, config: StreamConfig) -> tuple[float, tuple[int, ...]]:
    if window.n != config.n:
        raise ValueError(f"window holds {window.n} samples, expected {config.n}")
    ts = [s.t for s in window.samples]
    h = ts[-1] - ts[-2]
    if not h > 0:
        raise ValueError("timestamps must be strictly increasing")
    key = tuple(quantize_offset((t - ts[-1]) / h, config.quantization_digits) for t in ts)
    if len(set(key)) != len(key):
        raise ValueError("samples too close for configured quantization")
    return h, key


def _nodes_from_key(key: tuple[int, ...], digits: int) -> NodeSet:
    return NodeSet(tuple(rationalize(q, digits) for q in key))


def window_to_nodes(window: SampleWindow, config: StreamConfig) -> tuple[float, NodeSet]:
    """Step ``h`` (latest gap) and quantized offsets ``(t_j - t_n) / h``."""
    h, key = _window_key(window, config)
    return h, _nodes_from_key(key, config.quantization_digits)


def estimate_derivative(window: SampleWindow, config: StreamConfig) -> float:
    """k-th derivative at the newest timestamp, computed from scratch."""
    h, nodes = window_to_nodes(window, config)
    return evaluate_stencil(generate_stencil(nodes, config.k), window.values, h)


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0


class Rejection(NamedTuple):
    index: int
    reason: str


@dataclass
class StreamProcessor:
    """Mutable per-stream state: the current window and the stencil cache.

    Not safe to share between threads without external locking.
    """

    config: StreamConfig
    stats: CacheStats = field(default_factory=CacheStats)
    rejected: list[Rejection] = field(default_factory=list)
    _window: deque = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)
    _count: int = field(init=False, repr=False, default=0)

    def __post_init__(self):
        self._window = deque(maxlen=self.config.n)

    def _stencil_for(self, key: tuple[int, ...]) -> Stencil:
        stencil = self._cache.get(key)
        if stencil is None:
            self.stats.misses += 1
            nodes = _nodes_from_key(key, self.config.quantization_digits)
            stencil = self._cache[key] = generate_stencil(nodes, self.config.k)
        else:
            self.stats.hits += 1
        return stencil

    def push(self, t: float, y: float, index: int | None = None) -> float | None:
        """Feed one sample; return the estimate once the window is full.

        Non-finite or non-increasing samples are recorded in :attr:`rejected`
        and skipped.  A window whose offsets collide after quantization yields
        no estimate and is also recorded.
        """
        idx = self._count if index is None else index
        self._count += 1
        t, y = float(t), float(y)
        if not (math.isfinite(t) and math.isfinite(y)):
            self.rejected.append(Rejection(idx, "non-finite sample"))
            return None
        if self._window and not t > self._window[-1].t:
            self.rejected.append(Rejection(idx, "non-increasing timestamp"))
            return None
        self._window.append(Sample(t, y))
        if len(self._window) < self.config.n:
            return None
        window = SampleWindow(tuple(self._window))
        try:
            h, key = _window_key(window, self.config)
        except ValueError as exc:
            # sample stays in the window so the offending pair slides out
            self.rejected.append(Rejection(idx, str(exc)))
            return None
        return evaluate_stencil(self._stencil_for(key), window.values, h)

    @property
    def solves(self) -> int:
        return self.stats.misses


def stream_process(
    source: Iterable,
    config: StreamConfig,
    processor: StreamProcessor | None = None,
) -> Iterator[tuple[float, float]]:
    """Yield ``(t, estimate)`` for every sample that completes a window."""
    proc = processor if processor is not None else StreamProcessor(config)
    for t, y in source:
        est = proc.push(t, y)
        if est is not None:
            yield t, est


def read_samples_csv(
    handle: TextIO, on_error: Callable[[int, str], None] | None = None
) -> Iterator[tuple[int, float, float]]:
    """Yield ``(line_number, t, y)`` from a ``t,y`` CSV; bad rows go to ``on_error``."""
    reader = csv.reader(handle)
    header = next(reader, None)
    if header is None:
        return
    if [h.strip() for h in header] != ["t", "y"]:
        raise ValueError("input CSV header must be 't,y'")
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        try:
            if len(row) != 2:
                raise ValueError(f"expected 2 fields, got {len(row)}")
            t, y = float(row[0]), float(row[1])
        except ValueError as exc:
            if on_error is not None:
                on_error(line, f"unparseable row ({exc})")
            continue
        yield line, t, y


def write_estimates_csv(handle: TextIO, rows: Iterable[tuple[float, float]]) -> int:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["t", "estimate"])
    count = 0
    for t, est in rows:
        writer.writerow([repr(float(t)), repr(float(est))])
        count += 1
    return count


def offline_estimates(samples: Sequence, config: StreamConfig) -> list[tuple[float, float]]:
    """Uncached reference: one from-scratch solve per window of consecutive samples."""
    out = []
    for end in range(config.n, len(samples) + 1):
        window = SampleWindow(tuple(samples[end - config.n : end]))
        out.append((window.samples[-1].t, estimate_derivative(window, config)))
    return out
