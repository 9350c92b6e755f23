"""Command-line front end.

    hotspot freq --config run.json --out results/
    hotspot counterexample --N 100000 --M 5 --depth 2

Subcommands write ``<name>.json`` and/or ``<name>.csv`` into ``--out``.  Exit
codes: 0 success, 2 configuration error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable

from .analysis import (
    BudgetExceeded,
    VerdictParams,
    counterexample_report,
    default_checkpoints,
    enumerate_deviation_set,
    h_phi_exact,
    theorem_verdict,
)
from .birkhoff import escape_report, frequency_curve
from .config import ConfigError, RunConfig
from .measures import Bernoulli
from .streams import EmptyExpansion, EndOfStream
from .words import canonicalize, format_word, parse_word

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


# ---------------------------------------------------------------------------
# param helpers


def _ints(value) -> list[int]:
    if isinstance(value, str):
        return [int(v) for v in value.split(",") if v.strip()]
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(value)]


def _floats(value) -> list[float]:
    if isinstance(value, str):
        return [float(v) for v in value.split(",") if v.strip()]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(value)]


def _words(value):
    if isinstance(value, str):
        value = [v for v in value.split(";") if v.strip()]
    return [parse_word(str(v)) for v in value]


def _checkpoints(p: dict) -> list[int]:
    if "checkpoints" in p:
        return _ints(p["checkpoints"])
    n = int(p.get("N", 10_000))
    return default_checkpoints(n)


# ---------------------------------------------------------------------------
# output


def _csv_text(rows: list[dict], columns: list[str], header_comment: str) -> str:
    buf = io.StringIO()
    buf.write(header_comment + "\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in columns})
    return buf.getvalue()


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


class Output:
    def __init__(self, cfg: RunConfig, name: str):
        self.cfg = cfg
        self.name = name
        self.dir = Path(cfg.out)
        self.caveats: list[str] = []

    def write(self, result: dict, rows: list[dict], columns: list[str], text: str | None = None):
        self.dir.mkdir(parents=True, exist_ok=True)
        fmt = self.cfg.format
        if fmt not in ("csv", "json", "both"):
            raise ConfigError(f"unknown format {fmt!r}")
        h = self.cfg.hash()
        if fmt in ("json", "both"):
            doc = {
                "command": self.name,
                "config_hash": h,
                "config": self.cfg.to_dict(),
                "caveats": self.caveats,
                "result": result,
            }
            (self.dir / f"{self.name}.json").write_text(
                json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        if fmt in ("csv", "both"):
            comment = f"# config_hash={h}" + "".join(f"; caveat: {c}" for c in self.caveats)
            (self.dir / f"{self.name}.csv").write_text(_csv_text(rows, columns, comment), encoding="utf-8")
        if text is not None:
            (self.dir / f"{self.name}.txt").write_text(f"config_hash={h}\n" + text, encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def cmd_freq(cfg: RunConfig) -> int:
    """Cylinder hit frequencies at checkpoints."""
    p = cfg.params
    word = parse_word(str(p.get("word", "1")))
    out = Output(cfg, "freq")
    try:
        report = frequency_curve(cfg.build_stream(), word, _checkpoints(p), cfg.build_measure(),
                                 float(p.get("tail_fraction", 0.5)))
    except EndOfStream as exc:
        report = exc.partial
        if not report.checkpoints:
            raise ConfigError(f"stream too short for cylinder {format_word(word)}") from exc
    out.caveats.extend(report.caveats)
    out.write(report.to_dict(), report.rows(), ["n", "hits", "freq", "mu", "deviation"])
    print(f"freq [{format_word(word)}]: N={report.n} hits={report.hits} freq={report.freq:.6g} mu={float(report.mu):.6g}")
    return EXIT_OK


def cmd_escape(cfg: RunConfig) -> int:
    """Escape fractions past digit cutoffs."""
    p = cfg.params
    out = Output(cfg, "escape")
    rep = escape_report(cfg.build_stream(), _ints(p.get("escape_M", p.get("M", [1, 2, 4, 8]))),
                        _ints(p.get("w", 1)), _checkpoints(p))
    out.caveats.extend(rep.caveats)
    out.caveats.append("escape uses digit cutoffs on finite windows, not genuine compact sets")
    out.write(rep.to_dict(), rep.rows(), ["M", "w", "escape", "escape_exact"])
    for row in rep.rows():
        print(f"escape M={row['M']} w={row['w']}: {row['escape_exact']}")
    return EXIT_OK


def cmd_adev(cfg: RunConfig) -> int:
    """Enumerate a truncated deviation set."""
    p = cfg.params
    out = Output(cfg, "adev")
    dev = enumerate_deviation_set(parse_word(str(p.get("word", "1"))), int(p.get("ell", 2)),
                                  float(p.get("delta", 0.4)), cfg.build_measure(), int(p.get("M", 3)),
                                  cfg.budget)
    out.caveats.append(f"digits truncated at M={dev.cutoff}")
    rows = [{"cylinder": w} for w in dev.members.to_strings()]
    out.write(dev.to_dict(), rows, ["cylinder"])
    print(f"A_{dev.ell}([{format_word(dev.word)}], {dev.delta}) with digits <= {dev.cutoff}: {len(dev.members)} cylinders")
    return EXIT_OK


def cmd_hmeasure(cfg: RunConfig) -> int:
    """Gauge Hausdorff measure of a cylinder union."""
    p = cfg.params
    out = Output(cfg, "hmeasure")
    model, gauge = cfg.build_measure(), cfg.build_gauge()
    if "target" in p:
        target = canonicalize(_words(p["target"]))
    else:
        dev = enumerate_deviation_set(parse_word(str(p.get("word", "1"))), int(p.get("ell", 2)),
                                      float(p.get("delta", 0.4)), model, int(p.get("M", 3)), cfg.budget)
        target = dev.members
        out.caveats.append(f"target is a deviation set truncated at M={dev.cutoff}")
    res = h_phi_exact(target, model, gauge)
    result = {**res.to_dict(), "target": target.to_strings()}
    rows = [{"cylinder": format_word(c), "mu": float(model.cylinder(c)), "phi": float(gauge(model.cylinder(c)))}
            for c in res.optimal_cover]
    out.write(result, rows, ["cylinder", "mu", "phi"])
    print(f"H_phi = {float(res.value):.12g} ({res.exactness.value}), cover {res.optimal_cover.to_strings()}")
    return EXIT_OK


def _verdict_params(p: dict, budget: int) -> VerdictParams:
    kw: dict[str, Any] = {"budget": budget}
    simple = {"depth": int, "M": int, "N": int, "tail_fraction": float, "sigmas": float,
              "tightness_eps": float, "hmeasure_M": int}
    names = {"M": "cutoff", "N": "n", "hmeasure_M": "hmeasure_cutoff"}
    for key, conv in simple.items():
        if key in p:
            kw[names.get(key, key)] = conv(p[key])
    if "checkpoints" in p:
        kw["checkpoints"] = _ints(p["checkpoints"])
    lists = {"w": ("windows", _ints), "escape_M": ("escape_cutoffs", _ints), "deltas": ("deltas", _floats),
             "delta": ("deltas", _floats), "ells": ("ells", _ints), "ell": ("ells", _ints),
             "etas": ("etas", _floats), "eta0s": ("eta0s", _floats)}
    for key, (name, conv) in lists.items():
        if key in p:
            kw[name] = tuple(conv(p[key]))
    return VerdictParams(**kw)


def cmd_verdict(cfg: RunConfig) -> int:
    """Hypothesis and conclusion verdicts for T1/T2/T3."""
    out = Output(cfg, "verdict")
    v = theorem_verdict(cfg.theorem, cfg.build_stream(), cfg.build_measure(), cfg.build_gauge(),
                        _verdict_params(cfg.params, cfg.budget))
    out.caveats.extend(v.caveats)
    out.write(v.to_dict(), v.conclusion, ["cylinder", "N", "hits", "freq", "mu", "deviation", "tolerance", "pass"],
              text=v.to_text())
    sys.stdout.write(v.to_text())
    return EXIT_OK


def cmd_counterexample(cfg: RunConfig) -> int:
    """Ramp-point counterexample report."""
    p = cfg.params
    out = Output(cfg, "counterexample")
    model = cfg.build_measure()
    if not isinstance(model, Bernoulli):
        raise ConfigError("counterexample needs a Bernoulli measure")
    rep = counterexample_report(model, int(p.get("depth", 2)), int(p.get("M", 5)), int(p.get("N", 100_000)),
                                _ints(p.get("w", 1)))
    out.caveats.append("escape uses digit cutoffs on finite windows, not genuine compact sets")
    out.write(rep.to_dict(), rep.escape.rows(), ["M", "w", "escape", "escape_exact"], text=rep.to_text())
    sys.stdout.write(rep.to_text())
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "freq": cmd_freq,
    "escape": cmd_escape,
    "adev": cmd_adev,
    "hmeasure": cmd_hmeasure,
    "verdict": cmd_verdict,
    "counterexample": cmd_counterexample,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for i.i.d. streams (overrides the config)")
    common.add_argument("--format", choices=["csv", "json", "both"])
    common.add_argument("--stream", help="stream spec as JSON")
    common.add_argument("--measure", help="measure spec as JSON")
    common.add_argument("--gauge", help="gauge spec as JSON")
    common.add_argument("--budget", type=int, help="cap on exhaustive enumerations")
    common.add_argument("--word", help="cylinder word, e.g. 3,4")
    common.add_argument("--N", dest="N", type=int, help="horizon")
    common.add_argument("--checkpoints", help="comma-separated horizons")
    common.add_argument("--depth", type=int)
    common.add_argument("--M", dest="M", help="digit cutoff(s)")
    common.add_argument("--w", dest="w", help="window length(s)")
    common.add_argument("--escape-M", dest="escape_M", help="cutoffs for the escape grid")
    common.add_argument("--delta", help="tolerance(s)")
    common.add_argument("--ell", help="window length(s) for deviation sets")
    common.add_argument("--eta", dest="etas", help="eta grid (T2)")
    common.add_argument("--eta0", dest="eta0s", help="eta0 grid for the tail series (T3)")
    common.add_argument("--target", help="semicolon-separated words, e.g. '1;2'")
    common.add_argument("--theorem", choices=["T1", "T2", "T3"])

    parser = argparse.ArgumentParser(prog="hotspot", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).strip().split("\n")[0])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for key in ("stream", "measure", "gauge"):
        raw = getattr(args, key)
        if raw is not None:
            try:
                setattr(cfg, key, json.loads(raw))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--{key} is not valid JSON: {exc}") from exc
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    if args.budget is not None:
        cfg.budget = args.budget
    if args.theorem is not None:
        cfg.theorem = args.theorem
    if args.seed is not None:
        if cfg.stream.get("type") != "iid":
            raise ConfigError("--seed only applies to iid streams")
        cfg.stream = {**cfg.stream, "seed": args.seed}
    for key in ("word", "N", "checkpoints", "depth", "M", "w", "escape_M", "delta", "ell", "etas", "eta0s", "target"):
        value = getattr(args, key)
        if value is not None:
            cfg.params[key] = value
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError, KeyError, TypeError, EmptyExpansion, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
