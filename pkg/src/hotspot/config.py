"""Run configuration: tagged-record specs for streams, measures and gauges.

A config is a JSON object such as::

    {
      "stream":  {"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 42},
      "measure": {"type": "bernoulli", "spec": "geometric", "ratio": "1/2"},
      "gauge":   {"type": "power", "eta": 0.1, "coeff": 1.0},
      "params":  {"word": "1", "N": 100000}
    }

Everything a run depends on, seeds included, lives in the config, so a run is
reproducible from its config alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .measures import (
    Bernoulli,
    ExpSqrtLog,
    ExplicitFinite,
    Gauge,
    Gauss,
    Geometric,
    Identity,
    MeasureModel,
    Power,
    ProbabilityVector,
    Table,
    Zeta,
)
from .streams import (
    CFQuadraticPeriodic,
    CFRational,
    DigitStream,
    Explicit,
    IID,
    Periodic,
    Ramp,
    read_digit_file,
)
from .words import parse_word


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, Any] = {
    "stream": {"type": "ramp"},
    "measure": {"type": "bernoulli", "spec": "geometric", "ratio": "1/2"},
    "gauge": {"type": "identity"},
    "theorem": "T1",
    "params": {},
    "budget": 10**7,
    "format": "both",
}


PV_KEYS = {"spec", "ratio", "s", "head", "tail_ratio"}
ALLOWED = {
    "stream": {
        "ramp": set(), "periodic": {"word"}, "explicit": {"word"}, "iid": PV_KEYS | {"seed"},
        "cf-rational": {"num", "den"}, "cf-quadratic": {"preperiod", "period"}, "file": {"path"},
    },
    "measure": {"bernoulli": PV_KEYS, "gauss": set()},
    "gauge": {
        "identity": set(), "power": {"exponent", "eta", "coeff"},
        "expsqrtlog": {"eta", "coeff"}, "table": {"points"},
    },
}


def _check_keys(section: str, rec: dict) -> str:
    if not isinstance(rec, dict):
        raise ConfigError(f"{section} must be an object")
    kind = rec.get("type")
    if kind not in ALLOWED[section]:
        raise ConfigError(f"unknown {section} type {kind!r}")
    extra = set(rec) - ALLOWED[section][kind] - {"type"}
    if extra:
        raise ConfigError(f"unexpected keys for {section} {kind!r}: {sorted(extra)}")
    return kind


def _word(value):
    if isinstance(value, (list, tuple)):
        return parse_word(",".join(str(v) for v in value))
    return parse_word(str(value))


def probability_vector(rec: dict) -> ProbabilityVector:
    kind = rec.get("spec", "geometric")
    if kind == "geometric":
        return Geometric(rec.get("ratio", "1/2"))
    if kind == "zeta":
        return Zeta(float(rec["s"]))
    if kind == "explicit":
        return ExplicitFinite(tuple(rec["head"]), rec.get("tail_ratio", "1/2"))
    raise ConfigError(f"unknown probability vector spec {kind!r}")


def measure_from(rec: dict) -> MeasureModel:
    kind = _check_keys("measure", rec)
    if kind == "bernoulli":
        return Bernoulli(probability_vector(rec))
    if kind == "gauss":
        return Gauss()
    raise ConfigError(f"unknown measure type {kind!r}")


def gauge_from(rec: dict) -> Gauge:
    kind = _check_keys("gauge", rec)
    coeff = float(rec.get("coeff", 1.0))
    if kind == "identity":
        return Identity()
    if kind == "power":
        if "exponent" in rec:
            return Power(float(rec["exponent"]), coeff)
        return Power(1.0 - float(rec["eta"]), coeff)
    if kind == "expsqrtlog":
        return ExpSqrtLog(float(rec["eta"]), coeff)
    if kind == "table":
        return Table(tuple(tuple(p) for p in rec["points"]))
    raise ConfigError(f"unknown gauge type {kind!r}")


def stream_from(rec: dict, base_dir: Path | None = None) -> DigitStream:
    kind = _check_keys("stream", rec)
    if kind == "ramp":
        spec = Ramp()
    elif kind == "periodic":
        spec = Periodic(_word(rec["word"]))
    elif kind == "explicit":
        spec = Explicit(_word(rec["word"]))
    elif kind == "iid":
        spec = IID(probability_vector(rec), int(rec["seed"]))
    elif kind == "cf-rational":
        spec = CFRational(int(rec["num"]), int(rec["den"]))
    elif kind == "cf-quadratic":
        spec = CFQuadraticPeriodic(_word(rec.get("preperiod", "")), _word(rec["period"]))
    elif kind == "file":
        path = Path(rec["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        spec = Explicit(read_digit_file(path))
    else:
        raise ConfigError(f"unknown stream type {kind!r}")
    return DigitStream(spec)


@dataclass
class RunConfig:
    stream: dict = field(default_factory=lambda: dict(DEFAULTS["stream"]))
    measure: dict = field(default_factory=lambda: dict(DEFAULTS["measure"]))
    gauge: dict = field(default_factory=lambda: dict(DEFAULTS["gauge"]))
    theorem: str = "T1"
    params: dict = field(default_factory=dict)
    budget: int = 10**7
    out: str = "."
    format: str = "both"
    base_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | None = None) -> "RunConfig":
        unknown = set(data) - {"stream", "measure", "gauge", "theorem", "params", "budget", "out", "format"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = {**DEFAULTS, **data}
        return cls(
            stream=dict(merged["stream"]),
            measure=dict(merged["measure"]),
            gauge=dict(merged["gauge"]),
            theorem=str(merged["theorem"]),
            params=dict(merged["params"]),
            budget=int(merged["budget"]),
            out=str(merged.get("out", ".")),
            format=str(merged["format"]),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data, base_dir=str(path.parent))

    def to_dict(self) -> dict:
        """The reproducible content of the run (output location excluded)."""
        return {
            "stream": self.stream,
            "measure": self.measure,
            "gauge": self.gauge,
            "theorem": self.theorem,
            "params": self.params,
            "budget": self.budget,
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def build_stream(self) -> DigitStream:
        return stream_from(self.stream, Path(self.base_dir) if self.base_dir else None)

    def build_measure(self) -> MeasureModel:
        return measure_from(self.measure)

    def build_gauge(self) -> Gauge:
        return gauge_from(self.gauge)
