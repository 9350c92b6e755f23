"""Replayable digit sources: points of the shift space and CF digit sequences.

Positions are 1-based, as in ``x = (x_1, x_2, ...)``; ``T`` is the left shift
on positions, so the orbit point ``T^i x`` starts at digit ``x_{i+1}``.
Streams are random access: every spec maps a position to a digit without
hidden state, and bulk access goes through :meth:`DigitStream.block`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .measures import ProbabilityVector
from .words import Word

_BLOCK = 4  # Philox4x64 emits four words per counter value
_U53 = 2.0**-53


class EndOfStream(Exception):
    """A finite stream was asked for a digit past its end."""

    def __init__(self, position: int, length: int, partial=None):
        super().__init__(f"position {position} is past the end of a stream of length {length}")
        self.position = position
        self.length = length
        self.partial = partial


class EmptyExpansion(ValueError):
    """Zero has no continued-fraction digits."""


# ---------------------------------------------------------------------------
# specs


class StreamSpec:
    length: Optional[int] = None

    def digits(self, start: int, count: int) -> np.ndarray:
        """Digits at positions ``start .. start+count-1``; the caller clips to ``length``."""
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


MAX_DIGIT = 2**63 - 1  # digits are held in int64 arrays


def _check_range(word: Word) -> Word:
    if word and max(word) > MAX_DIGIT:
        raise ValueError(f"digit {max(word)} exceeds the supported maximum {MAX_DIGIT}")
    return word


@dataclass(frozen=True)
class Ramp(StreamSpec):
    """The point ``(1, 2, 3, 4, ...)``."""

    def digits(self, start, count):
        return np.arange(start, start + count, dtype=np.int64)

    def to_config(self):
        return {"type": "ramp"}


@dataclass(frozen=True)
class Periodic(StreamSpec):
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "word", _check_range(Word(self.word)))
        if not self.word:
            raise ValueError("periodic stream needs a nonempty word")

    def digits(self, start, count):
        w = np.asarray(self.word, dtype=np.int64)
        idx = (np.arange(start, start + count) - 1) % len(w)
        return w[idx]

    def to_config(self):
        return {"type": "periodic", "word": str(self.word)}


@dataclass(frozen=True)
class Explicit(StreamSpec):
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "word", _check_range(Word(self.word)))

    @property
    def length(self):
        return len(self.word)

    def digits(self, start, count):
        return np.asarray(self.word[start - 1 : start - 1 + count], dtype=np.int64)

    def to_config(self):
        return {"type": "explicit", "word": str(self.word)}


@dataclass(frozen=True)
class CFQuadraticPeriodic(StreamSpec):
    """CF digits of a quadratic irrational: ``preperiod`` then ``period`` forever."""

    preperiod: Word
    period: Word

    def __post_init__(self):
        object.__setattr__(self, "preperiod", _check_range(Word(self.preperiod)))
        object.__setattr__(self, "period", _check_range(Word(self.period)))
        if not self.period:
            raise ValueError("period must be nonempty")

    def digits(self, start, count):
        pos = np.arange(start, start + count)
        k = len(self.preperiod)
        pre = np.asarray(self.preperiod, dtype=np.int64)
        per = np.asarray(self.period, dtype=np.int64)
        out = np.empty(count, dtype=np.int64)
        head = pos <= k
        out[head] = pre[pos[head] - 1]
        out[~head] = per[(pos[~head] - k - 1) % len(per)]
        return out

    def to_config(self):
        return {"type": "cf-quadratic", "preperiod": str(self.preperiod), "period": str(self.period)}


def cf_digits_rational(num: int, den: int) -> Word:
    """Continued-fraction digits of ``num/den`` in ``(0, 1)`` by the Euclidean algorithm.

    The expansion produced this way always ends in a digit ``>= 2`` (other than
    ``1/1``, which is excluded), so the digit word is unique.
    """
    num, den = int(num), int(den)
    if num == 0:
        raise EmptyExpansion("0 has an empty continued-fraction expansion")
    if not 0 < num < den:
        raise ValueError("need 0 < num < den")
    out = []
    while num:
        a, r = divmod(den, num)
        out.append(a)
        den, num = num, r
    return Word(out)


def cf_value(word) -> Fraction:
    """Fold ``[0; a_1, ..., a_n]`` back into a fraction."""
    x = Fraction(0)
    for a in reversed(tuple(word)):
        x = 1 / (a + x)
    return x


@dataclass(frozen=True)
class CFRational(StreamSpec):
    num: int
    den: int

    def __post_init__(self):
        object.__setattr__(self, "num", int(self.num))
        object.__setattr__(self, "den", int(self.den))
        if not 0 < self.num < self.den:
            raise ValueError("need 0 < num < den")

    @cached_property
    def word(self) -> Word:
        return _check_range(cf_digits_rational(self.num, self.den))

    @property
    def length(self):
        return len(self.word)

    def digits(self, start, count):
        return np.asarray(self.word[start - 1 : start - 1 + count], dtype=np.int64)

    def to_config(self):
        return {"type": "cf-rational", "num": str(self.num), "den": str(self.den)}


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for 1-based indices ``start..start+count-1``.

    Index ``i`` maps to lane ``(i-1) % 4`` of the Philox4x64 block at counter ``(i-1) // 4``
    keyed by ``seed``, so any index can be reproduced without replaying the
    ones before it.
    """
    if count <= 0:
        return np.zeros(0)
    first = (start - 1) // _BLOCK
    last = (start - 1 + count - 1) // _BLOCK
    # consecutive reads from counter c agree with fresh generators at c+1, c+2, ...
    bitgen = np.random.Philox(key=int(seed) & (2**64 - 1), counter=[first, 0, 0, 0])
    raw = bitgen.random_raw((last - first + 1) * _BLOCK)
    offset = (start - 1) - first * _BLOCK
    raw = raw[offset : offset + count]
    return (raw >> np.uint64(11)).astype(np.float64) * _U53


@dataclass(frozen=True)
class IID(StreamSpec):
    """Digits drawn i.i.d. from ``pv`` by inverse CDF of counter-based uniforms."""

    pv: ProbabilityVector
    seed: int

    def digits(self, start, count):
        return self.pv.inverse_cdf(uniforms(self.seed, start, count))

    def to_config(self):
        return {"type": "iid", **self.pv.to_config(), "seed": int(self.seed)}


def read_digit_file(path) -> Word:
    """One positive integer per line; blank lines are ignored."""
    text = Path(path).read_text(encoding="utf-8")
    return Word(int(line) for line in text.splitlines() if line.strip())


# ---------------------------------------------------------------------------
# streams


@dataclass(frozen=True)
class DigitStream:
    """A spec viewed from an offset: ``DigitStream(spec, k)`` is the point ``T^k x``."""

    spec: StreamSpec
    offset: int = 0

    @property
    def length(self) -> Optional[int]:
        if self.spec.length is None:
            return None
        return max(self.spec.length - self.offset, 0)

    def available(self, start: int, count: int) -> int:
        if self.length is None:
            return count
        return max(0, min(count, self.length - start + 1))

    def block(self, start: int, count: int, strict: bool = False) -> np.ndarray:
        """Digits at positions ``start .. start+count-1`` (clipped for finite streams).

        With ``strict`` a short read raises :class:`EndOfStream` instead.
        """
        if start < 1:
            raise ValueError("positions are 1-based")
        n = self.available(start, count)
        if strict and n < count:
            raise EndOfStream(start + n, self.length)
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        return np.asarray(self.spec.digits(start + self.offset, n), dtype=np.int64)

    def prefix(self, count: int) -> np.ndarray:
        return self.block(1, count)

    def __iter__(self):
        i = 1
        chunk = 4096
        while True:
            digits = self.block(i, chunk)
            yield from (int(d) for d in digits)
            if len(digits) < chunk:
                return
            i += chunk


def digit_at(stream: DigitStream, i: int) -> int:
    if i < 1:
        raise ValueError("positions are 1-based")
    return int(stream.block(i, 1, strict=True)[0])


def shift(stream: DigitStream, k: int) -> DigitStream:
    if k < 0:
        raise ValueError("shift amount must be >= 0")
    return DigitStream(stream.spec, stream.offset + k)


def make_stream(spec: StreamSpec) -> DigitStream:
    return DigitStream(spec)
