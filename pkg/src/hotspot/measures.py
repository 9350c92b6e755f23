"""Cylinder measures for Bernoulli shifts and the Gauss measure, plus gauges.

Bernoulli measures over a countable alphabet are described by an analytic
probability vector so that tails like ``sum_{a > M} p_a`` have closed forms.
Rational vectors give exact :class:`~fractions.Fraction` cylinder measures;
the Gauss measure needs a logarithm, so it is evaluated in interval arithmetic
and returned with a certified error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence, Union

import mpmath
import numpy as np


Number = Union[Fraction, float]


def as_fraction(value) -> Fraction:
    """Parse ``"1/2"``, ints, Fractions or floats (floats are taken exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


# ---------------------------------------------------------------------------
# probability vectors


class ProbabilityVector:
    """A probability vector ``(p_1, p_2, ...)`` on the positive integers."""

    exact = False

    def p(self, a: int) -> Number:
        raise NotImplementedError

    def tail(self, cutoff: int) -> Number:
        """``sum_{a > cutoff} p_a``."""
        raise NotImplementedError

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        """Smallest ``a`` with ``p_1 + ... + p_a > u``, elementwise for ``u`` in [0, 1)."""
        raise NotImplementedError

    def tail_series(self, eta0: float) -> tuple[bool, float]:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(ProbabilityVector):
    """``p_a = (1 - ratio) * ratio**(a - 1)``."""

    ratio: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ratio", as_fraction(self.ratio))
        if not 0 < self.ratio < 1:
            raise ValueError("geometric ratio must lie in (0, 1)")

    @property
    def exact(self) -> bool:
        return True

    def p(self, a: int) -> Fraction:
        if a < 1:
            return Fraction(0)
        return (1 - self.ratio) * self.ratio ** (int(a) - 1)

    def tail(self, cutoff: int) -> Fraction:
        return self.ratio ** max(int(cutoff), 0)

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        a = np.floor(np.log1p(-u) / math.log(self.ratio)).astype(np.int64) + 1
        return np.maximum(a, 1)

    def tail_series(self, eta0):
        e = 1.0 - eta0
        r = float(self.ratio)
        return True, (1 - r) ** e / (1 - r**e)

    def to_config(self):
        return {"spec": "geometric", "ratio": str(self.ratio)}


@dataclass(frozen=True)
class Zeta(ProbabilityVector):
    """``p_a = a**(-s) / zeta(s)`` for ``s > 1``; heavy-tailed, evaluated in floats."""

    s: float
    table_size: int = field(default=1 << 16, compare=False, repr=False)

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError("zeta exponent must exceed 1")
        object.__setattr__(self, "s", float(self.s))

    @cached_property
    def _norm(self) -> float:
        return float(mpmath.zeta(self.s))

    def p(self, a):
        if a < 1:
            return 0.0
        return a ** (-self.s) / self._norm

    def tail(self, cutoff):
        # Hurwitz zeta: sum_{a >= cutoff+1} a^-s
        return float(mpmath.zeta(self.s, max(int(cutoff), 0) + 1) / mpmath.zeta(self.s))

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        a = np.arange(1, self.table_size + 1, dtype=float)
        cdf = np.cumsum(a ** (-self.s)) / self._norm
        out = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
        # rare draws past the table: bisect on the exact tail
        for idx in np.flatnonzero(out > self.table_size):
            out[idx] = self._bisect(1.0 - float(u[idx]))
        return out

    def _bisect(self, tail_mass: float) -> int:
        # smallest a with tail(a) < tail_mass
        lo, hi = self.table_size, self.table_size * 2
        while self.tail(hi) >= tail_mass:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.tail(mid) < tail_mass:
                hi = mid
            else:
                lo = mid
        return hi

    def tail_series(self, eta0):
        e = 1.0 - eta0
        if self.s * e <= 1:
            return False, math.inf
        return True, float(mpmath.zeta(self.s * e) / mpmath.zeta(self.s) ** e)

    def to_config(self):
        return {"spec": "zeta", "s": self.s}


@dataclass(frozen=True)
class ExplicitFinite(ProbabilityVector):
    """Explicit head ``p_1..p_k`` followed by a geometric tail carrying the rest.

    The leftover mass ``1 - sum(head)`` is spread as ``p_{k+j} = rest * (1 - r) * r**(j-1)``.
    """

    head: tuple[Fraction, ...]
    tail_ratio: Fraction = Fraction(1, 2)

    def __post_init__(self):
        head = tuple(as_fraction(v) for v in self.head)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail_ratio", as_fraction(self.tail_ratio))
        if any(v < 0 for v in head):
            raise ValueError("probabilities must be nonnegative")
        if sum(head) > 1:
            raise ValueError("explicit head sums to more than 1")
        if not 0 < self.tail_ratio < 1:
            raise ValueError("tail ratio must lie in (0, 1)")

    @property
    def exact(self) -> bool:
        return True

    @property
    def rest(self) -> Fraction:
        return 1 - sum(self.head, Fraction(0))

    def p(self, a):
        k, a = len(self.head), int(a)
        if a < 1:
            return Fraction(0)
        if a <= k:
            return self.head[a - 1]
        return self.rest * (1 - self.tail_ratio) * self.tail_ratio ** (a - k - 1)

    def tail(self, cutoff):
        k, cutoff = len(self.head), int(cutoff)
        if cutoff >= k:
            return self.rest * self.tail_ratio ** (cutoff - k)
        return sum(self.head[max(cutoff, 0):], Fraction(0)) + self.rest

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        k = len(self.head)
        cdf = np.cumsum([float(v) for v in self.head]) if k else np.zeros(0)
        out = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
        beyond = out > k
        if beyond.any() and self.rest > 0:
            # conditional uniform inside the tail, then the geometric formula
            head_mass = float(1 - self.rest)
            v = (u[beyond] - head_mass) / float(self.rest)
            v = np.clip(v, 0.0, np.nextafter(1.0, 0.0))
            j = np.floor(np.log1p(-v) / math.log(self.tail_ratio)).astype(np.int64) + 1
            out[beyond] = k + np.maximum(j, 1)
        elif beyond.any():
            # float round-off past a head that sums to exactly one
            out[beyond] = max(a for a in range(1, k + 1) if self.head[a - 1] > 0)
        return out

    def tail_series(self, eta0):
        e = 1.0 - eta0
        total = sum(float(v) ** e for v in self.head if v > 0)
        if self.rest > 0:
            r = float(self.tail_ratio)
            total += float(self.rest) ** e * (1 - r) ** e / (1 - r**e)
        return True, total

    def to_config(self):
        return {
            "spec": "explicit",
            "head": [str(v) for v in self.head],
            "tail_ratio": str(self.tail_ratio),
        }


def tail_series(pv: ProbabilityVector, eta0: float) -> tuple[bool, float]:
    """Convergence verdict and value of ``sum_a p_a**(1 - eta0)``.

    Decided from the closed form of each vector family, never from partial sums.
    """
    if not 0 < eta0 < 1:
        raise ValueError("eta0 must lie in (0, 1)")
    return pv.tail_series(eta0)


# ---------------------------------------------------------------------------
# measure models


def bernoulli_cylinder_measure(pv: ProbabilityVector, word: Sequence[int]) -> Number:
    out: Number = Fraction(1) if pv.exact else 1.0
    for a in word:
        out = out * pv.p(a)
    return out


def convergents(word: Sequence[int]) -> tuple[int, int, int, int]:
    """``(p_n, q_n, p_{n-1}, q_{n-1})`` for the digit word ``[0; a_1, ..., a_n]``."""
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    for a in word:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return p, q, p_prev, q_prev


def gauss_interval(word: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Endpoints (unordered) of the continued-fraction cylinder interval."""
    p, q, pp, qp = convergents(word)
    return Fraction(p, q), Fraction(p + pp, q + qp)


def _gauss_mass(u: Fraction, v: Fraction) -> tuple[float, float]:
    ratio = (1 + u) / (1 + v)
    with mpmath.workdps(40):
        val = abs(mpmath.iv.log(mpmath.iv.mpf(ratio.numerator) / ratio.denominator)) / mpmath.iv.log(2)
        lo, hi = float(val.a), float(val.b)
    mid = 0.5 * (lo + hi)
    return mid, (hi - lo) / 2 + abs(mid) * 2.0**-52


def gauss_cylinder_measure(word: Sequence[int]) -> tuple[float, float]:
    """Gauss measure of a continued-fraction cylinder and a certified error bound."""
    if not len(word):
        return 1.0, 0.0
    return _gauss_mass(*gauss_interval(word))


def gauss_tail_measure(word: Sequence[int], cutoff: int) -> tuple[float, float]:
    """Gauss measure of ``{x in [word] : next digit > cutoff}``."""
    p, q, pp, qp = convergents(word)
    m = cutoff + 1
    return _gauss_mass(Fraction(p, q), Fraction(m * p + pp, m * q + qp))


class MeasureModel:
    exact = False

    def cylinder(self, word: Sequence[int]) -> Number:
        raise NotImplementedError

    def digit_tail(self, word: Sequence[int], cutoff: int) -> Number:
        """Mass of ``[word]`` carried by children whose next digit exceeds ``cutoff``."""
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Bernoulli(MeasureModel):
    pv: ProbabilityVector

    @property
    def exact(self) -> bool:
        return self.pv.exact

    def cylinder(self, word):
        return bernoulli_cylinder_measure(self.pv, word)

    def digit_tail(self, word, cutoff):
        return self.cylinder(word) * self.pv.tail(cutoff)

    def to_config(self):
        return {"type": "bernoulli", **self.pv.to_config()}


@dataclass(frozen=True)
class Gauss(MeasureModel):
    def cylinder(self, word):
        return gauss_cylinder_measure(word)[0]

    def digit_tail(self, word, cutoff):
        return gauss_tail_measure(word, cutoff)[0]

    def to_config(self):
        return {"type": "gauss"}


# ---------------------------------------------------------------------------
# gauges


class Gauge:
    """A monotone function applied to cylinder measures.

    ``subadditive`` marks gauges with ``g(t)/t`` nonincreasing; for those no
    cover can gain by splitting a cylinder into its children, which makes the
    cover optimisation in :mod:`hotspot.analysis` exact.
    """

    subadditive = False

    def __call__(self, t: Number) -> Number:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Gauge):
    subadditive = True

    def __call__(self, t):
        return t

    def to_config(self):
        return {"type": "identity"}


@dataclass(frozen=True)
class Power(Gauge):
    """``coeff * t**exponent``; with exponent ``1 - eta`` this is the ``O(t^(1-eta))`` gauge."""

    exponent: float
    coeff: float = 1.0

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("power gauge needs a positive exponent to be monotone")
        if self.coeff < 0:
            raise ValueError("gauge coefficient must be nonnegative")

    @property
    def subadditive(self) -> bool:
        return self.exponent <= 1

    def __call__(self, t):
        if t <= 0:
            return 0.0
        if self.exponent == 1 and isinstance(t, Fraction):
            return as_fraction(self.coeff) * t
        return self.coeff * float(t) ** self.exponent

    def to_config(self):
        return {"type": "power", "exponent": self.exponent, "coeff": self.coeff}


@dataclass(frozen=True)
class ExpSqrtLog(Gauge):
    """``coeff * t * exp(eta * sqrt(log(1/t)))``, i.e. ``t * psi(t)``.

    The raw formula turns down for ``t > exp(-eta**2 / 4)``; past that point the
    gauge is held at its maximum so it stays monotone.  Behaviour as ``t -> 0``
    is unchanged.
    """

    eta: float
    coeff: float = 1.0
    subadditive = True

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.coeff < 0:
            raise ValueError("gauge coefficient must be nonnegative")

    @property
    def knee(self) -> float:
        return math.exp(-self.eta**2 / 4)

    def __call__(self, t):
        t = float(t)
        if t <= 0:
            return 0.0
        t = min(t, self.knee)
        return self.coeff * t * math.exp(self.eta * math.sqrt(math.log(1 / t)))

    def to_config(self):
        return {"type": "expsqrtlog", "eta": self.eta, "coeff": self.coeff}


@dataclass(frozen=True)
class Table(Gauge):
    """Piecewise-linear gauge through ``(t, value)`` points, flat outside them."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        if not pts:
            raise ValueError("table gauge needs at least one point")
        ts = [t for t, _ in pts]
        vs = [v for _, v in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("table abscissae must be strictly increasing")
        if any(b < a for a, b in zip(vs, vs[1:])) or vs[0] < 0:
            raise ValueError("table gauge values must be nonnegative and nondecreasing")
        object.__setattr__(self, "points", pts)

    def __call__(self, t):
        ts, vs = zip(*self.points)
        return float(np.interp(float(t), ts, vs))

    def to_config(self):
        return {"type": "table", "points": [list(p) for p in self.points]}


def gauge_eval(gauge: Gauge, t: Number) -> Number:
    if not 0 <= t <= 1:
        raise ValueError("gauge argument must lie in [0, 1]")
    return gauge(t)


def is_monotone(gauge: Gauge, n: int = 10_000) -> bool:
    values = [gauge(t) for t in np.linspace(0.0, 1.0, n)]
    return all(b >= a for a, b in zip(values, values[1:]))
