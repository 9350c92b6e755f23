"""Orbit statistics: hit counts, frequency curves, window sums and escape rates.

All counts are unnormalised integers; averages are formed only when reported.
``S_N(x, [w])`` here is the number of ``0 <= i < N`` with ``T^i x in [w]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .measures import MeasureModel, Number
from .streams import DigitStream, EndOfStream
from .words import Word, format_word

CHUNK = 1 << 20


def exact(x) -> Fraction:
    """Exact rational for a tolerance or measure; floats are read as their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def hit_indicator(digits: np.ndarray, word: Sequence[int]) -> np.ndarray:
    """``h[i] = 1`` iff ``digits[i : i + len(word)] == word``; length ``len(digits) - len(word) + 1``."""
    k = len(word)
    n = len(digits) - k + 1
    if n <= 0:
        return np.zeros(0, dtype=bool)
    if k == 0:
        return np.ones(len(digits), dtype=bool)
    hits = digits[:n] == word[0]
    for j in range(1, k):
        hits &= digits[j : j + n] == word[j]
    return hits


def _hits(stream: DigitStream, word: Sequence[int], start: int, count: int) -> np.ndarray:
    """Hit indicator for orbit indices ``start .. start+count-1`` (0-based), clipped."""
    k = max(len(word), 1)
    digits = stream.block(start + 1, count + k - 1)
    if not len(word):
        return np.ones(min(count, len(digits)), dtype=bool)
    return hit_indicator(digits, word)


def _cumulative_hits(stream, word, checkpoints):
    """Hit counts at each checkpoint in one chunked pass; stops early at end of stream.

    Returns ``(counts, valid)`` where ``valid`` is the number of orbit indices
    that could be decided.
    """
    counts = []
    total = 0
    done = 0
    cp = iter(checkpoints)
    target = next(cp, None)
    horizon = checkpoints[-1] if checkpoints else 0
    while target is not None and done < horizon:
        size = min(CHUNK, horizon - done)
        h = _hits(stream, word, done, size)
        prefix = np.cumsum(h, dtype=np.int64)
        while target is not None and target <= done + len(h):
            counts.append(total + (int(prefix[target - done - 1]) if target > done else 0))
            target = next(cp, None)
        total += int(prefix[-1]) if len(h) else 0
        done += len(h)
        if len(h) < size:
            break
    return counts, done


def hit_count(stream: DigitStream, word: Sequence[int], n: int) -> int:
    """``#{0 <= i < n : T^i x in [word]}``.

    On a stream too short to decide every index, :class:`EndOfStream` is raised
    with the count over the decidable prefix in ``partial``.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    counts, done = _cumulative_hits(stream, Word(word), [n])
    if done < n:
        partial = int(_hits(stream, word, 0, done).sum())
        raise EndOfStream(done + max(len(word), 1), stream.length, partial=partial)
    return counts[0]


@dataclass
class FrequencyReport:
    cylinder: Word
    n: int
    hits: int
    checkpoints: list[tuple[int, int]]
    freq: float
    tail_max: float
    mu: Number
    tail_fraction: float = 0.5
    caveats: list[str] = field(default_factory=list)

    def rows(self) -> list[dict]:
        mu = float(self.mu)
        return [
            {"n": n, "hits": h, "freq": h / n, "mu": mu, "deviation": h / n - mu}
            for n, h in self.checkpoints
        ]

    def to_dict(self) -> dict:
        return {
            "cylinder": format_word(self.cylinder),
            "N": self.n,
            "hits": self.hits,
            "freq": self.freq,
            "tail_max": self.tail_max,
            "tail_fraction": self.tail_fraction,
            "mu": float(self.mu),
            "mu_exact": str(self.mu) if isinstance(self.mu, Fraction) else None,
            "checkpoints": self.rows(),
            "caveats": list(self.caveats),
        }


def tail_max(checkpoints: Sequence[tuple[int, int]], tail_fraction: float = 0.5) -> float:
    """Max of ``hits_n / n`` over the last ``ceil(tail_fraction * len)`` checkpoints."""
    if not checkpoints:
        return 0.0
    k = max(1, math.ceil(tail_fraction * len(checkpoints)))
    return max(h / n for n, h in checkpoints[-k:])


def frequency_curve(
    stream: DigitStream,
    word: Sequence[int],
    checkpoints: Sequence[int],
    model: MeasureModel,
    tail_fraction: float = 0.5,
) -> FrequencyReport:
    """Hit counts of ``[word]`` at each checkpoint, with the cylinder's measure.

    If the stream ends first, :class:`EndOfStream` carries the report restricted
    to the checkpoints that were reached (plus the last decidable index) in
    ``partial``.
    """
    checkpoints = [int(n) for n in checkpoints]
    if not checkpoints or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])) or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive and strictly increasing")
    word = Word(word)
    mu = model.cylinder(word)
    counts, done = _cumulative_hits(stream, word, checkpoints)
    pairs = list(zip(checkpoints, counts))
    if done < checkpoints[-1]:
        caveat = f"stream ended: only {done} of {checkpoints[-1]} orbit points decidable"
        if done and (not pairs or pairs[-1][0] < done):
            last, _ = _cumulative_hits(stream, word, [done])
            pairs.append((done, last[0]))
        report = _report(word, pairs, mu, tail_fraction, [caveat])
        raise EndOfStream(done + max(len(word), 1), stream.length, partial=report)
    return _report(word, pairs, mu, tail_fraction, [])


def _report(word, pairs, mu, tail_fraction, caveats):
    n, hits = pairs[-1] if pairs else (0, 0)
    return FrequencyReport(
        cylinder=word,
        n=n,
        hits=hits,
        checkpoints=pairs,
        freq=hits / n if n else 0.0,
        tail_max=tail_max(pairs, tail_fraction),
        mu=mu,
        tail_fraction=tail_fraction,
        caveats=caveats,
    )


class SlidingCheck(NamedTuple):
    lhs: Fraction
    rhs: int
    ok: bool


def window_sums(hits: np.ndarray, ell: int) -> np.ndarray:
    c = np.concatenate(([0], np.cumsum(hits, dtype=np.int64)))
    return c[ell:] - c[:-ell]


def sliding_block_check(stream: DigitStream, word: Sequence[int], ell: int, n: int) -> SlidingCheck:
    """Compare ``(1/ell) sum_{i<n} S_ell(T^i x)`` with ``S_n(x)`` exactly.

    Every hit at index ``k`` is counted once per window containing it; only the
    ``ell - 1`` indices at either end are covered fewer than ``ell`` times, so
    the two sides differ by at most ``2 (ell - 1)``.
    """
    if ell < 1 or n < ell:
        raise ValueError("need 1 <= ell <= n")
    h = _hits(stream, word, 0, n + ell - 1)
    if len(h) < n + ell - 1:
        raise EndOfStream(len(h) + max(len(word), 1), stream.length)
    lhs = Fraction(int(window_sums(h, ell)[:n].sum()), ell)
    rhs = int(h[:n].sum())
    return SlidingCheck(lhs, rhs, abs(lhs - rhs) <= 2 * (ell - 1))


@dataclass
class DecompositionCounts:
    ell: int
    delta: float
    cutoff: int
    n: int
    good: int
    q: int
    r: int
    q_bound: int

    @property
    def q_bound_ok(self) -> bool:
        return self.q <= self.q_bound

    def to_dict(self) -> dict:
        return {
            "ell": self.ell, "delta": self.delta, "M": self.cutoff, "N": self.n,
            "good": self.good, "Q": self.q, "R": self.r,
            "Q_bound": self.q_bound, "Q_bound_ok": self.q_bound_ok,
        }


def good_window_counts(ell: int, delta, mu) -> np.ndarray:
    """Boolean table over ``S in 0..ell``: ``|S/ell - mu| < delta``, decided exactly."""
    d, m = exact(delta), exact(mu)
    return np.array([abs(Fraction(s, ell) - m) < d for s in range(ell + 1)])


def decomposition_counts(
    stream: DigitStream,
    word: Sequence[int],
    ell: int,
    delta: float,
    cutoff: int,
    n: int,
    model: MeasureModel,
) -> DecompositionCounts:
    """Split ``0 <= i < n`` into good windows, escaping windows (Q) and the rest (R).

    Index ``i`` is good when the window average ``S_ell(T^i x)/ell`` is within
    ``delta`` of ``mu[word]``.  Otherwise it counts towards Q when some digit
    among ``x_{i+1} .. x_{i+ell+len(word)-1}`` exceeds ``cutoff`` and towards R
    when the whole window stays inside the truncated compact.

    ``q_bound`` is ``ell * #{p < n + ell - 1 : T^p x escapes}`` where a single
    point escapes if one of its first ``max(len(word), 1)`` digits exceeds the
    cutoff.
    """
    if ell < 1 or cutoff < 1 or not 0 < delta < 1:
        raise ValueError("need ell >= 1, cutoff >= 1, 0 < delta < 1")
    word = Word(word)
    k = max(len(word), 1)
    span = ell + k - 1
    digits = stream.block(1, n + span - 1, strict=True)
    h = hit_indicator(digits, word) if word else np.ones(len(digits), dtype=bool)
    s = window_sums(h[: n + ell - 1], ell)[:n]
    good = good_window_counts(ell, delta, model.cylinder(word))[s]

    big = digits > cutoff
    window_escape = sliding_window_view(big, span).any(axis=1)[:n]
    point_escape = sliding_window_view(big, k).any(axis=1)[: n + ell - 1]

    q = int((~good & window_escape).sum())
    r = int((~good & ~window_escape).sum())
    return DecompositionCounts(
        ell=ell, delta=delta, cutoff=cutoff, n=n,
        good=int(good.sum()), q=q, r=r,
        q_bound=ell * int(point_escape.sum()),
    )


@dataclass
class EscapeReport:
    """``table[(M, w)]``: sup over checkpoints ``n`` of the fraction of ``i < n``
    whose next ``w`` digits include one above ``M``."""

    cutoffs: list[int]
    windows: list[int]
    checkpoints: list[int]
    table: dict[tuple[int, int], Fraction]
    caveats: list[str] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [
            {"M": m, "w": w, "escape": float(self.table[m, w]), "escape_exact": str(self.table[m, w])}
            for m in self.cutoffs
            for w in self.windows
        ]

    def to_dict(self) -> dict:
        return {
            "cutoffs": self.cutoffs,
            "windows": self.windows,
            "checkpoints": self.checkpoints,
            "rows": self.rows(),
            "truncation": "escape means a digit above M within the next w digits; "
            "K = {digits <= M} is a window truncation, not a compact set",
            "caveats": list(self.caveats),
        }


def escape_report(
    stream: DigitStream,
    cutoffs: Sequence[int],
    windows: Sequence[int],
    checkpoints: Sequence[int],
) -> EscapeReport:
    cutoffs = sorted({int(m) for m in cutoffs})
    windows = sorted({int(w) for w in windows})
    checkpoints = [int(n) for n in checkpoints]
    if not checkpoints or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])) or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive and strictly increasing")
    if not cutoffs or not windows or min(windows) < 1:
        raise ValueError("need at least one cutoff and one window >= 1")
    caveats = []
    horizon = checkpoints[-1]
    digits = stream.block(1, horizon + windows[-1] - 1)
    table = {}
    for w in windows:
        usable = len(digits) - w + 1
        if usable <= 0:
            raise EndOfStream(len(digits) + 1, stream.length)
        cps = [n for n in checkpoints if n <= usable]
        if len(cps) < len(checkpoints):
            if not cps or cps[-1] < usable:
                cps.append(usable)
            caveats.append(f"w={w}: stream ended, checkpoints truncated at n={usable}")
        wmax = sliding_window_view(digits, w).max(axis=1)[: cps[-1]]
        for m in cutoffs:
            c = np.cumsum(wmax > m, dtype=np.int64)
            table[m, w] = max(Fraction(int(c[n - 1]), n) for n in cps)
    return EscapeReport(cutoffs, windows, checkpoints, table, caveats)


def empirical_measure(stream: DigitStream, n: int, depth: int) -> dict[Word, Fraction]:
    """Masses the empirical measure ``(1/n) sum_{i<n} delta_{T^i x}`` gives each depth-``depth`` cylinder it charges."""
    digits = stream.block(1, n + depth - 1, strict=True)
    windows = sliding_window_view(digits, depth)[:n] if depth else np.zeros((n, 0), dtype=np.int64)
    keys, counts = np.unique(windows, axis=0, return_counts=True)
    return {Word(k): Fraction(int(c), n) for k, c in zip(keys, counts)}
