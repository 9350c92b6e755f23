import csv
import json

import pytest

from hotspot.cli import main
from hotspot.config import ConfigError, RunConfig


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def load(out, name):
    return json.loads((out / f"{name}.json").read_text(encoding="utf-8"))


def read_csv(out, name):
    lines = (out / f"{name}.csv").read_text(encoding="utf-8").split("\n")
    assert lines[0].startswith("# config_hash=")
    return lines[0], list(csv.DictReader(lines[1:]))


def test_freq_ramp_last_row(tmp_path):
    code, out = run(tmp_path, "freq", "--word", "1", "--N", "10000")
    assert code == 0
    _, rows = read_csv(out, "freq")
    assert rows[-1]["n"] == "10000"
    assert float(rows[-1]["freq"]) == 1e-4
    assert rows[0].keys() == {"n", "hits", "freq", "mu", "deviation"}


def test_csv_uses_newlines_only(tmp_path):
    code, out = run(tmp_path, "freq", "--word", "1", "--N", "100")
    raw = (out / "freq.csv").read_bytes()
    assert code == 0 and b"\r" not in raw


def test_freq_file_stream_shorter_than_n(tmp_path):
    digits = tmp_path / "digits.txt"
    digits.write_text("\n".join(["1", "2", "3", "1", "1"]) + "\n", encoding="utf-8")
    stream = json.dumps({"type": "file", "path": str(digits)})
    code, out = run(tmp_path, "freq", "--stream", stream, "--word", "1", "--N", "100")
    assert code == 0
    doc = load(out, "freq")
    assert doc["caveats"] and any("5" in c for c in doc["caveats"])
    header, _ = read_csv(out, "freq")
    assert "caveat" in header


def test_malformed_word_exits_2(tmp_path):
    code, _ = run(tmp_path, "freq", "--word", "0,2")
    assert code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["freq", "--measure", '{"type": "nope"}'],
        ["freq", "--stream", '{"type": "iid", "pv": {}, "seed": 1}'],
        ["freq", "--stream", "{not json"],
        ["escape", "--seed", "3"],  # seed on a non-iid stream
        ["counterexample", "--measure", '{"type": "gauss"}'],
        ["verdict", "--theorem", "T2"],  # Bernoulli default model
    ],
)
def test_config_errors_exit_2(tmp_path, args):
    code, _ = run(tmp_path, *args)
    assert code == 2


def test_missing_config_exits_2(tmp_path):
    code, _ = run(tmp_path, "freq", "--config", str(tmp_path / "absent.json"))
    assert code == 2


def test_unknown_config_key(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"streem": {}}), encoding="utf-8")
    code, _ = run(tmp_path, "freq", "--config", str(path))
    assert code == 2
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"streem": {}})


def test_budget_exceeded_exits_3(tmp_path):
    code, _ = run(tmp_path, "adev", "--ell", "30", "--M", "3")
    assert code == 3


def test_adev_large_delta_empty(tmp_path):
    code, out = run(tmp_path, "adev", "--delta", "1.5", "--ell", "1")
    assert code == 0
    assert load(out, "adev")["result"]["members"] == []
    _, rows = read_csv(out, "adev")
    assert rows == []


def test_adev_example(tmp_path):
    code, out = run(tmp_path, "adev", "--word", "1", "--ell", "2", "--delta", "0.4", "--M", "3")
    assert code == 0
    assert load(out, "adev")["result"]["members"] == ["1,1", "2,2", "2,3", "3,2", "3,3"]


def test_hmeasure_target(tmp_path):
    code, out = run(tmp_path, "hmeasure", "--target", "1;2")
    assert code == 0
    result = load(out, "hmeasure")["result"]
    assert result["value"] == 0.75 and result["value_exact"] == "3/4"
    assert result["cover"] == ["1", "2"]


def test_hmeasure_sqrt_gauge(tmp_path):
    code, out = run(tmp_path, "hmeasure", "--target", "1;2", "--gauge", '{"type": "power", "exponent": 0.5}')
    assert code == 0
    assert load(out, "hmeasure")["result"]["cover"] == ["ε"]


def test_escape_ramp(tmp_path):
    code, out = run(tmp_path, "escape", "--escape-M", "3,5", "--w", "1", "--checkpoints", "10")
    assert code == 0
    rows = load(out, "escape")["result"]["rows"]
    assert [r["escape_exact"] for r in rows] == ["7/10", "1/2"]


def test_counterexample_default(tmp_path):
    code, out = run(tmp_path, "counterexample")
    assert code == 0
    result = load(out, "counterexample")["result"]
    assert result["cylinders"]["all_hits_at_most_one"]
    assert result["witness"]["mu"] == "1/2"
    assert result["escape"]["equals_1_minus_M_over_N"]
    assert (out / "counterexample.txt").read_text(encoding="utf-8").startswith("config_hash=")


def test_counterexample_small(tmp_path):
    code, out = run(tmp_path, "counterexample", "--N", "10", "--M", "3", "--depth", "0")
    assert code == 0
    result = load(out, "counterexample")["result"]
    assert "cylinders" not in result
    rows = result["escape"]["rows"]
    assert next(r for r in rows if r["M"] == 3)["escape_exact"] == "7/10"


def test_verdict_text_and_json(tmp_path):
    args = ["verdict", "--theorem", "T3", "--stream", '{"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 1}',
            "--gauge", '{"type": "power", "exponent": 0.9}', "--depth", "1", "--M", "3", "--N", "20000"]
    code, out = run(tmp_path, *args)
    assert code == 0
    doc = load(out, "verdict")
    assert doc["result"]["theorem"] == "T3"
    assert doc["result"]["summary"]["conclusion"]
    assert "theorem T3" in (out / "verdict.txt").read_text(encoding="utf-8")


@pytest.mark.parametrize("cmd", [
    ["freq", "--word", "1,2", "--N", "5000"],
    ["escape", "--checkpoints", "100,1000"],
    ["adev", "--ell", "3"],
    ["hmeasure", "--ell", "3"],
    ["verdict", "--depth", "1", "--M", "2", "--N", "2000", "--ell", "2"],
    ["counterexample", "--N", "1000"],
])
def test_byte_identical_reruns(tmp_path, cmd):
    iid = ["--stream", '{"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 9}']
    args = cmd + (iid if cmd[0] in ("freq", "escape", "verdict") else [])
    c1, a = run(tmp_path, *args, name="a")
    c2, b = run(tmp_path, *args, name="b")
    assert c1 == c2 == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir()) and files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_every_output_embeds_config_hash(tmp_path):
    code, out = run(tmp_path, "verdict", "--depth", "1", "--M", "2", "--N", "500", "--ell", "2")
    assert code == 0
    h = load(out, "verdict")["config_hash"]
    assert len(h) == 16
    for p in out.iterdir():
        assert h in p.read_text(encoding="utf-8")


def test_flags_override_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "stream": {"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 1},
        "params": {"word": "2", "N": 1000},
        "format": "json",
    }), encoding="utf-8")
    code, out = run(tmp_path, "freq", "--config", str(path), "--seed", "7", "--word", "1")
    assert code == 0
    doc = load(out, "freq")
    assert doc["config"]["stream"]["seed"] == 7
    assert doc["config"]["params"]["word"] == "1"
    assert not (out / "freq.csv").exists()
    cfg = RunConfig.from_dict(doc["config"])
    assert cfg.hash() == doc["config_hash"]


def test_config_hash_changes_with_seed():
    a = RunConfig.from_dict({"stream": {"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 1}})
    b = RunConfig.from_dict({"stream": {"type": "iid", "spec": "geometric", "ratio": "1/2", "seed": 2}})
    assert a.hash() != b.hash()
    assert RunConfig.from_dict(a.to_dict()).hash() == a.hash()


def test_stream_ratio_reaches_the_sampler(tmp_path):
    stream = '{"type": "iid", "spec": "geometric", "ratio": "9/10", "seed": 4}'
    code, out = run(tmp_path, "escape", "--stream", stream, "--escape-M", "8", "--checkpoints", "20000")
    assert code == 0
    # P(digit > 8) = 0.9**8 ~ 0.43 under ratio 9/10, versus 2**-8 under the default
    assert load(out, "escape")["result"]["rows"][0]["escape"] > 0.3
