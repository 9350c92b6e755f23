"""Deviation sets, gauge Hausdorff measure over cylinder covers, theorem harness.

``A_ell(word, delta)`` is the set of points whose length-``ell`` window
frequency of ``[word]`` is more than ``delta`` away from ``mu[word]``.  Whether
a point is in it depends only on its first ``ell + len(word) - 1`` digits, so
after truncating the alphabet at a cutoff ``M`` it is a finite union of
cylinders and can be enumerated exactly.

``H_phi(E) = inf sum phi(mu(C_i))`` over covers of ``E`` by cylinders.  Since
cylinders are nested or disjoint, an optimal cover of a finite cylinder union
is an antichain in the prefix tree, found by a bottom-up tree DP.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .birkhoff import (
    EscapeReport,
    FrequencyReport,
    escape_report,
    exact,
    frequency_curve,
    hit_indicator,
)
from .measures import (
    Bernoulli,
    ExpSqrtLog,
    Gauge,
    Gauss,
    Identity,
    MeasureModel,
    Number,
    Power,
    Table,
    tail_series,
)
from .streams import DigitStream, EndOfStream, Ramp
from .words import CylinderUnion, Word, canonicalize, format_word

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured size cap."""


def words_up_to(depth: int, cutoff: int, min_depth: int = 1) -> list[Word]:
    """All words of length ``min_depth..depth`` over ``1..cutoff``, shortlex order."""
    out = []
    for k in range(min_depth, depth + 1):
        out.extend(Word(w) for w in product(range(1, cutoff + 1), repeat=k))
    return out


# ---------------------------------------------------------------------------
# deviation sets


@dataclass(frozen=True)
class DeviationSet:
    word: Word
    ell: int
    delta: float
    cutoff: int
    depth: int
    members: CylinderUnion
    truncated: bool = True

    def to_dict(self) -> dict:
        return {
            "cylinder": format_word(self.word),
            "ell": self.ell,
            "delta": self.delta,
            "M": self.cutoff,
            "depth": self.depth,
            "truncated": self.truncated,
            "size": len(self.members),
            "members": self.members.to_strings(),
        }


def window_counts(word: Sequence[int], ell: int, cutoff: int, start: int, stop: int) -> np.ndarray:
    """``S_ell`` for the words with base-``cutoff`` indices ``start..stop-1``.

    Index ``w`` encodes the digit word ``(d_1..d_depth)`` with
    ``d_j = ((w // cutoff**(depth-j)) % cutoff) + 1``.
    """
    k = len(word)
    depth = ell + k - 1
    idx = np.arange(start, stop, dtype=np.int64)
    s = np.zeros(len(idx), dtype=np.int64)
    if any(d > cutoff for d in word):
        return s
    code = 0
    for d in word:
        code = code * cutoff + (d - 1)
    span = cutoff**k
    for i in range(ell):
        s += (idx // cutoff ** (depth - i - k)) % span == code
    return s


def _decode(index: int, cutoff: int, depth: int) -> Word:
    digits = []
    for _ in range(depth):
        index, r = divmod(index, cutoff)
        digits.append(r + 1)
    return Word(reversed(digits))


def enumerate_deviation_set(
    word: Sequence[int],
    ell: int,
    delta: float,
    model: MeasureModel,
    cutoff: int,
    budget: int = DEFAULT_BUDGET,
) -> DeviationSet:
    """Exhaustive ``A_ell(word, delta)`` restricted to digits ``<= cutoff``.

    Members are the depth ``ell + len(word) - 1`` cylinders whose window
    frequency deviates from ``mu[word]`` by strictly more than ``delta``.
    """
    if ell < 1 or cutoff < 1:
        raise ValueError("need ell >= 1 and cutoff >= 1")
    word = Word(word)
    depth = max(ell + len(word) - 1, 0)
    total = cutoff**depth
    if total > budget:
        raise BudgetExceeded(f"{cutoff}^{depth} = {total} words exceeds the budget {budget}")
    mu = exact(model.cylinder(word))
    d = exact(delta)
    deviating = np.array([abs(Fraction(s, ell) - mu) > d for s in range(ell + 1)])
    members = []
    if deviating.any():
        if not word:
            members = [Word()] if deviating[ell] else []
        else:
            step = 1 << 20
            for lo in range(0, total, step):
                hi = min(total, lo + step)
                hit = deviating[window_counts(word, ell, cutoff, lo, hi)]
                members.extend(_decode(int(i), cutoff, depth) for i in np.flatnonzero(hit) + lo)
    return DeviationSet(word, ell, delta, cutoff, depth, canonicalize(members))


# ---------------------------------------------------------------------------
# gauge Hausdorff measure


class Exactness(enum.Enum):
    EXACT = "exact_over_cylinder_covers"
    UPPER_BOUND = "upper_bound"


@dataclass(frozen=True)
class HMeasureResult:
    value: Number
    optimal_cover: CylinderUnion
    exactness: Exactness
    gauge: Gauge
    model: MeasureModel

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "value_exact": str(self.value) if isinstance(self.value, Fraction) else None,
            "exactness": self.exactness.value,
            "cover": self.optimal_cover.to_strings(),
            "gauge": self.gauge.to_config(),
            "measure": self.model.to_config(),
        }


def h_phi_exact(target: CylinderUnion, model: MeasureModel, gauge: Gauge) -> HMeasureResult:
    """Cheapest cover of ``target`` by cylinders, cost ``sum phi(mu(C))``.

    Bottom-up over the prefix tree of the target's members:
    ``cost(v) = min(phi(mu[v]), sum of cost(c) over children c that meet the target)``,
    with target members as leaves and ties going to the parent.  For gauges with
    ``phi(t)/t`` nonincreasing, splitting a member into subcylinders never
    helps, so the result is the infimum over all cylinder covers; for other
    gauges it is reported as an upper bound.
    """
    if not isinstance(target, CylinderUnion):
        target = canonicalize(target)
    exactness = Exactness.EXACT if gauge.subadditive else Exactness.UPPER_BOUND
    if not target.members:
        return HMeasureResult(Fraction(0), CylinderUnion(), exactness, gauge, model)

    children: dict[Word, list[Word]] = {}
    leaves = set(target.members)
    for m in target.members:
        for j in range(len(m)):
            parent, child = m[:j], m[: j + 1]
            kids = children.setdefault(parent, [])
            if not kids or kids[-1] != child:
                kids.append(child)

    cost: dict[Word, Number] = {}
    cover: dict[Word, list[Word]] = {}
    nodes = sorted(set(children) | leaves, key=len, reverse=True)
    for v in nodes:
        own = gauge(model.cylinder(v))
        if v in leaves:
            cost[v], cover[v] = own, [v]
            continue
        split = sum((cost[c] for c in children[v]), Fraction(0))
        if own <= split:
            cost[v], cover[v] = own, [v]
        else:
            best: list[Word] = []
            for c in children[v]:
                best.extend(cover.pop(c))
            cost[v], cover[v] = split, best
        for c in children[v]:
            cover.pop(c, None)

    root = Word()
    return HMeasureResult(cost[root], CylinderUnion(tuple(sorted(cover[root]))), exactness, gauge, model)


@dataclass
class DecayScan:
    word: Word
    delta: float
    cutoff: int
    rows: list[tuple[int, Number, int]]  # (ell, H value, number of members)

    @property
    def values(self) -> list[Number]:
        return [v for _, v, _ in self.rows]

    @property
    def trend(self) -> str:
        vals = self.values
        if all(b < a for a, b in zip(vals, vals[1:])):
            return "strictly_decreasing"
        if all(b <= a for a, b in zip(vals, vals[1:])):
            return "nonincreasing"
        return "not_monotone"

    def to_dict(self) -> dict:
        return {
            "cylinder": format_word(self.word),
            "delta": self.delta,
            "M": self.cutoff,
            "rows": [
                {"ell": ell, "H": float(v), "H_exact": str(v) if isinstance(v, Fraction) else None, "members": n}
                for ell, v, n in self.rows
            ],
            "trend": self.trend,
        }


def h_phi_decay_scan(
    word: Sequence[int],
    delta: float,
    model: MeasureModel,
    gauge: Gauge,
    ells: Sequence[int],
    cutoff: int,
    budget: int = DEFAULT_BUDGET,
) -> DecayScan:
    rows = []
    for ell in ells:
        dev = enumerate_deviation_set(word, ell, delta, model, cutoff, budget)
        rows.append((ell, h_phi_exact(dev.members, model, gauge).value, len(dev.members)))
    return DecayScan(Word(word), delta, cutoff, rows)


# ---------------------------------------------------------------------------
# gauge growth conditions


def psi_growth_ok(gauge: Gauge, eta: float) -> bool:
    """Whether ``psi(t) = gauge(t)/t`` is ``O(exp(eta * sqrt(log 1/t)))`` as ``t -> 0``.

    Decided per gauge family from its formula.
    """
    if isinstance(gauge, Identity):
        return True
    if isinstance(gauge, Power):
        return gauge.exponent >= 1
    if isinstance(gauge, ExpSqrtLog):
        return gauge.eta <= eta
    if isinstance(gauge, Table):
        return gauge.points[0] == (0.0, 0.0)
    raise TypeError(f"unknown gauge {gauge!r}")


def phi_growth_ok(gauge: Gauge) -> bool:
    """Whether ``gauge(t) = O(t**(1 - eta))`` as ``t -> 0`` for some ``eta`` in (0, 1)."""
    if isinstance(gauge, (Identity, ExpSqrtLog)):
        return True
    if isinstance(gauge, Power):
        return gauge.exponent > 0
    if isinstance(gauge, Table):
        return gauge.points[0] == (0.0, 0.0)
    raise TypeError(f"unknown gauge {gauge!r}")


# ---------------------------------------------------------------------------
# theorem harness


class Theorem(enum.Enum):
    T1 = "T1"  # abstract setting, gauge phi, H_phi decay hypothesis
    T2 = "T2"  # continued fractions with the Gauss measure, gauge t * psi(t)
    T3 = "T3"  # Bernoulli shift on N^N, tail series, gauge O(t^(1-eta))


def default_checkpoints(n: int, count: int = 10) -> list[int]:
    pts = np.unique(np.geomspace(max(1, n / 2**(count - 1)), n, count).round().astype(np.int64))
    return [int(p) for p in pts if p >= 1]


@dataclass
class VerdictParams:
    depth: int = 2
    cutoff: int = 4
    n: int = 100_000
    checkpoints: Optional[list[int]] = None
    windows: tuple[int, ...] = (1,)
    escape_cutoffs: Optional[tuple[int, ...]] = None
    deltas: tuple[float, ...] = (0.4,)
    ells: tuple[int, ...] = (2, 4)
    hmeasure_cutoff: Optional[int] = None
    etas: tuple[float, ...] = ()
    eta0s: tuple[float, ...] = (0.5,)
    tail_fraction: float = 0.5
    sigmas: float = 4.0
    tightness_eps: float = 0.05
    budget: int = DEFAULT_BUDGET

    def resolved_checkpoints(self) -> list[int]:
        return list(self.checkpoints) if self.checkpoints else default_checkpoints(self.n)

    def resolved_escape_cutoffs(self) -> list[int]:
        if self.escape_cutoffs:
            return list(self.escape_cutoffs)
        return [self.cutoff * 2**k for k in range(4)]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "M": self.cutoff,
            "N": self.n,
            "checkpoints": self.resolved_checkpoints(),
            "windows": list(self.windows),
            "escape_cutoffs": self.resolved_escape_cutoffs(),
            "deltas": list(self.deltas),
            "ells": list(self.ells),
            "hmeasure_M": self.hmeasure_cutoff or self.cutoff,
            "etas": list(self.etas),
            "eta0s": list(self.eta0s),
            "tail_fraction": self.tail_fraction,
            "sigmas": self.sigmas,
            "tightness_eps": self.tightness_eps,
            "budget": self.budget,
        }


def _sigma(mu: float, n: int) -> float:
    return math.sqrt(max(mu * (1 - mu), 0.0) / n)


@dataclass
class TheoremVerdict:
    theorem: Theorem
    params: VerdictParams
    hypothesis_limsup: list[dict]
    hypothesis_hmeasure_decay: list[dict]
    gauge_conditions: dict
    tightness: dict
    conclusion: list[dict]
    caveats: list[str] = field(default_factory=list)

    @property
    def limsup_pass(self) -> bool:
        return all(row["pass"] for row in self.hypothesis_limsup)

    @property
    def decay_pass(self) -> bool:
        return all(scan["trend"] != "not_monotone" for scan in self.hypothesis_hmeasure_decay)

    @property
    def tightness_pass(self) -> bool:
        return self.tightness["pass"]

    @property
    def gauge_pass(self) -> bool:
        return all(v for k, v in self.gauge_conditions.items() if k.endswith("_ok"))

    @property
    def uncorrected_hypotheses_pass(self) -> bool:
        """Hypotheses of the statement without the tightness assumption."""
        return self.limsup_pass and self.decay_pass and self.gauge_pass

    @property
    def hypotheses_pass(self) -> bool:
        return self.uncorrected_hypotheses_pass and self.tightness_pass

    @property
    def conclusion_pass(self) -> bool:
        return all(row["pass"] for row in self.conclusion)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem.value,
            "params": self.params.to_dict(),
            "summary": {
                "limsup_hypothesis": self.limsup_pass,
                "hmeasure_decay_hypothesis": self.decay_pass,
                "gauge_conditions": self.gauge_pass,
                "tightness": self.tightness_pass,
                "hypotheses_without_tightness": self.uncorrected_hypotheses_pass,
                "hypotheses": self.hypotheses_pass,
                "conclusion": self.conclusion_pass,
            },
            "hypothesis_limsup": self.hypothesis_limsup,
            "hypothesis_hmeasure_decay": self.hypothesis_hmeasure_decay,
            "gauge_conditions": self.gauge_conditions,
            "tightness": self.tightness,
            "conclusion": self.conclusion,
            "caveats": list(self.caveats),
        }

    def to_text(self) -> str:
        s = self.to_dict()["summary"]
        lines = [f"theorem {self.theorem.value}"]
        lines += [f"  {k}: {'pass' if v else 'FAIL'}" for k, v in s.items()]
        bad = [r["cylinder"] for r in self.conclusion if not r["pass"]]
        if bad:
            lines.append(f"  conclusion fails for: {', '.join(bad[:10])}{' ...' if len(bad) > 10 else ''}")
        lines.append("  escape: " + ", ".join(
            f"M={r['M']},w={r['w']}: {r['escape']:.4g}" for r in self.tightness["rows"]))
        lines += [f"  caveat: {c}" for c in self.caveats]
        return "\n".join(lines) + "\n"


def _limit_checkpoints(stream: DigitStream, depth: int, checkpoints: list[int], caveats: list[str]) -> list[int]:
    if stream.length is None:
        return checkpoints
    usable = stream.length - max(depth, 1) + 1
    if usable < 1:
        raise EndOfStream(stream.length + 1, stream.length)
    if checkpoints[-1] <= usable:
        return checkpoints
    cps = [n for n in checkpoints if n <= usable]
    if not cps or cps[-1] < usable:
        cps.append(usable)
    caveats.append(f"finite stream of length {stream.length}: statistics use the first {usable} orbit points")
    return cps


def theorem_verdict(
    kind: Theorem | str,
    stream: DigitStream,
    model: MeasureModel,
    gauge: Gauge,
    params: VerdictParams = VerdictParams(),
) -> TheoremVerdict:
    """Finite-scale evidence for each hypothesis and the conclusion of a theorem.

    Nothing here establishes a limit: limsups are read off the tail of the
    checkpoint curve, quantifiers over ``delta``/``eta`` are sampled on the
    supplied grids, and compact sets are replaced by digit cutoffs.  The
    caveats list says so for each run.
    """
    kind = Theorem(kind)
    if kind is Theorem.T2 and not isinstance(model, Gauss):
        raise ValueError("T2 is stated for the Gauss measure")
    if kind is Theorem.T3 and not isinstance(model, Bernoulli):
        raise ValueError("T3 is stated for Bernoulli measures")

    caveats = [
        f"finite horizon N={params.n}: limsup estimated by the max over the last "
        f"{params.tail_fraction:.0%} of checkpoints",
        f"statistical slack of {params.sigmas:g} binomial standard deviations in limsup and conclusion checks",
        "compact sets replaced by digit cutoffs M on finite windows",
    ]
    checkpoints = _limit_checkpoints(stream, params.depth, params.resolved_checkpoints(), caveats)
    n_final = checkpoints[-1]
    k_tail = max(1, math.ceil(params.tail_fraction * len(checkpoints)))
    n_tail = checkpoints[-k_tail]

    gauge_conditions: dict = {}
    bounds: dict[str, Gauge] = {"gauge": gauge}
    if kind is Theorem.T2:
        etas = list(params.etas) or ([gauge.eta] if isinstance(gauge, ExpSqrtLog) else [])
        gauge_conditions["psi_growth"] = {str(e): psi_growth_ok(gauge, e) for e in etas}
        gauge_conditions["psi_growth_ok"] = all(gauge_conditions["psi_growth"].values())
        if isinstance(gauge, ExpSqrtLog):
            bounds = {f"eta={e:g}": ExpSqrtLog(e, gauge.coeff) for e in etas} or bounds
        caveats.append(f"'for any eta > 0' sampled at eta in {etas}")
    elif kind is Theorem.T3:
        series = {}
        for e0 in params.eta0s:
            ok, val = tail_series(model.pv, e0)
            series[str(e0)] = {"converges": ok, "value": val if math.isfinite(val) else None}
        gauge_conditions["tail_series"] = series
        gauge_conditions["tail_series_ok"] = any(v["converges"] for v in series.values())
        if not gauge_conditions["tail_series_ok"]:
            caveats.append("misconfigured: tail series diverges for every supplied eta0")
        gauge_conditions["phi_growth_ok"] = phi_growth_ok(gauge)
    else:
        gauge_conditions["monotone_ok"] = True  # gauges validate monotonicity at construction

    limsup_rows, conclusion_rows = [], []
    for word in words_up_to(params.depth, params.cutoff):
        try:
            rep: FrequencyReport = frequency_curve(stream, word, checkpoints, model, params.tail_fraction)
        except EndOfStream as exc:
            rep = exc.partial
        mu = float(rep.mu)
        slack = params.sigmas * _sigma(mu, n_tail)
        for label, g in bounds.items():
            bound = float(g(rep.mu))
            limsup_rows.append({
                "cylinder": format_word(word), "bound": label, "mu": mu,
                "tail_max": rep.tail_max, "gauge_bound": bound, "slack": slack,
                "pass": rep.tail_max <= bound + slack,
            })
        tol = params.sigmas * _sigma(mu, rep.n)
        conclusion_rows.append({
            "cylinder": format_word(word), "N": rep.n, "hits": rep.hits, "freq": rep.freq,
            "mu": mu, "deviation": rep.freq - mu, "tolerance": tol,
            "pass": abs(rep.freq - mu) <= tol,
        })

    decay = []
    if kind is Theorem.T1:
        m_h = params.hmeasure_cutoff or params.cutoff
        for word in words_up_to(params.depth, params.cutoff):
            for delta in params.deltas:
                scan = h_phi_decay_scan(word, delta, model, gauge, params.ells, m_h, params.budget)
                decay.append(scan.to_dict())
        caveats.append(f"'for any delta > 0' sampled at delta in {list(params.deltas)}; "
                       f"H_phi decay over ell in {list(params.ells)} with digits <= {m_h}")

    esc = escape_report(stream, params.resolved_escape_cutoffs(), params.windows, checkpoints)
    caveats.extend(esc.caveats)
    best = min(float(v) for v in esc.table.values())
    tightness = {
        "rows": esc.rows(),
        "min_escape": best,
        "eps": params.tightness_eps,
        "pass": best <= params.tightness_eps,
    }
    return TheoremVerdict(kind, params, limsup_rows, decay, gauge_conditions, tightness, conclusion_rows, caveats)


# ---------------------------------------------------------------------------
# counterexample


@dataclass
class CounterexampleReport:
    """The ramp point ``(1, 2, 3, ...)``: every cylinder frequency dies out while
    the orbit's mass escapes past every digit cutoff."""

    n: int
    depth: int
    cutoff: int
    cylinders: list[dict]
    witness: Optional[dict]
    escape: EscapeReport
    measure: MeasureModel

    @property
    def max_hits(self) -> int:
        return max((row["hits"] for row in self.cylinders), default=0)

    @property
    def frequencies_vanish(self) -> bool:
        return self.max_hits <= 1

    @property
    def escape_exact(self) -> bool:
        """Escape at the final checkpoint equals ``1 - M/N`` for every window-1 entry."""
        return all(
            self.escape.table[m, 1] == 1 - Fraction(m, self.n)
            for m in self.escape.cutoffs if (m, 1) in self.escape.table
        )

    def to_dict(self) -> dict:
        out: dict = {"N": self.n, "depth": self.depth, "M": self.cutoff, "measure": self.measure.to_config()}
        if self.depth > 0:
            out["cylinders"] = {
                "max_hits": self.max_hits,
                "max_freq": max((r["freq"] for r in self.cylinders), default=0.0),
                "all_hits_at_most_one": self.frequencies_vanish,
                "rows": self.cylinders,
            }
            out["witness"] = self.witness
            out["uncorrected_hypothesis"] = (
                "limsup of every cylinder frequency is 0, below phi(mu) for any nonnegative phi"
                if self.frequencies_vanish else "violated"
            )
        out["escape"] = self.escape.to_dict()
        out["escape"]["equals_1_minus_M_over_N"] = self.escape_exact
        out["tightness"] = "fails: escape fraction tends to 1 for every cutoff"
        return out

    def to_text(self) -> str:
        lines = [f"counterexample: ramp point, N={self.n}"]
        if self.depth > 0:
            lines.append(f"  cylinders of depth <= {self.depth}, digits <= {self.cutoff}: max hits {self.max_hits}")
            if self.witness:
                lines.append(f"  witness digit {self.witness['digit']}: mu = {self.witness['mu']}, "
                             f"freq = {self.witness['freq']:.3g}")
        for row in self.escape.rows():
            lines.append(f"  escape M={row['M']} w={row['w']}: {row['escape_exact']}")
        return "\n".join(lines) + "\n"


def counterexample_report(
    model: MeasureModel,
    depth: int = 2,
    cutoff: int = 5,
    n: int = 100_000,
    windows: Sequence[int] = (1,),
) -> CounterexampleReport:
    if not isinstance(model, Bernoulli):
        raise ValueError("the counterexample lives on N^N with a Bernoulli measure")
    stream = DigitStream(Ramp())
    digits = stream.prefix(n + depth)
    rows = []
    witness = None
    if depth > 0:
        for word in words_up_to(depth, cutoff):
            hits = int(hit_indicator(digits, word)[:n].sum())
            mu = model.cylinder(word)
            rows.append({"cylinder": format_word(word), "hits": hits, "freq": hits / n, "mu": float(mu)})
        for a in range(1, cutoff + 1):
            mu = model.cylinder((a,))
            if mu > 0:
                hits = int(hit_indicator(digits, (a,))[:n].sum())
                witness = {"digit": a, "mu": str(mu), "freq": hits / n}
                break
    esc = escape_report(stream, range(1, cutoff + 1), windows, [n])
    return CounterexampleReport(n, depth, cutoff, rows, witness, esc, model)
