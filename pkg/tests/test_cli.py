import csv

import pytest
import yaml

from beamstream import config as cfgmod
from beamstream.cli import main, parse_seeds
from beamstream.config import DEFAULT, ResolutionClass

SMALL = DEFAULT.replace(n_users=16, k_rf=4, horizon=40, seeds=(0, 1))


@pytest.fixture
def small_yaml(tmp_path):
    path = tmp_path / "small.yaml"
    cfgmod.save(SMALL, path)
    return path


def test_parse_seeds():
    assert parse_seeds("3") == [0, 1, 2]
    assert parse_seeds("4,9") == [4, 9]
    assert parse_seeds("") == []


def test_run_table1_ten_seeds(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--preset", "table1", "--scheduler", "b2p", "--seeds", "10", "--out", str(out)]) == 0
    traces = sorted(p.name for p in out.glob("trace_*.csv"))
    assert traces == [f"trace_b2p_N200_K4_seed{s}.csv" for s in sorted(range(10), key=str)]
    assert len(list(out.glob("*.csv"))) == 16
    assert "b2p N=200 K=4: zero-hit fraction" in capsys.readouterr().out


def test_bad_fractions_exit_2(tmp_path, capsys):
    bad = SMALL.replace(classes=tuple(ResolutionClass(c.name, c.bitrate, c.fraction * 0.9, c.qoe_offset)
                                      for c in SMALL.classes))
    path = tmp_path / "bad.yaml"
    cfgmod.save(bad, path)
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "violation: classes.fraction" in capsys.readouterr().out
    assert main(["validate", "--config", str(path)]) == 2
    assert main(["run", "--config", str(path), "--scheduler", "nope", "--out", str(tmp_path / "o")]) == 2


def test_validate_ok(small_yaml, capsys):
    assert main(["validate", "--config", str(small_yaml)]) == 0
    assert "feasible=" in capsys.readouterr().out


def test_compare_merges_zero_hits(tmp_path, small_yaml):
    out = tmp_path / "cmp"
    assert main(["compare", "--config", str(small_yaml), "--schedulers", "b2p,uniform,rr", "--out", str(out)]) == 0
    with (out / "zero_hits.csv").open() as f:
        rows = list(csv.DictReader(f))
    assert [r["scheduler"] for r in rows] == ["b2p", "uniform", "rr"]
    assert len(list(out.glob("trace_*.csv"))) == 6


def test_refuses_overwrite(tmp_path, small_yaml):
    out = tmp_path / "o"
    args = ["run", "--config", str(small_yaml), "--out", str(out)]
    assert main(args) == 0
    assert main(args) == 1
    assert main(args + ["--force"]) == 0


def test_byte_identical_reruns(tmp_path, small_yaml):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["compare", "--config", str(small_yaml), "--out", str(d)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_env_override(tmp_path, small_yaml, monkeypatch):
    monkeypatch.setenv("BEAMSTREAM_SEEDS", "3")
    monkeypatch.setenv("BEAMSTREAM_FORMAT", "json")
    out = tmp_path / "env"
    assert main(["run", "--config", str(small_yaml), "--out", str(out)]) == 0
    assert len(list(out.glob("trace_*.json"))) == 3
    out2 = tmp_path / "flag"
    assert main(["run", "--config", str(small_yaml), "--seeds", "1", "--out", str(out2)]) == 0
    assert len(list(out2.glob("trace_*.json"))) == 1


def _harness(tmp_path, lipschitz):
    path = tmp_path / f"h{lipschitz}.yaml"
    path.write_text(yaml.safe_dump({"checkpoints": [100, 1000],
                                    "instances": [{"name": "two", "means": [0.9, 0.5], "lipschitz": lipschitz}]}))
    return path


def test_regret_bound_held(tmp_path, capsys):
    cfg = _harness(tmp_path, 0.0)
    assert main(["regret", "--config", str(cfg), "--seeds", "5", "--out", str(tmp_path / "r")]) == 0
    assert "bound held" in capsys.readouterr().out
    with (tmp_path / "r" / "regret_report.csv").open() as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["T", "mode", "seed", "regret", "bound", "instance"]


def test_regret_vacuous(tmp_path, capsys):
    cfg = _harness(tmp_path, 0.5 / 60)
    assert main(["regret", "--config", str(cfg), "--seeds", "2", "--out", str(tmp_path / "r")]) == 0
    out = capsys.readouterr().out
    assert "bound vacuous" in out and "note:" in out


def test_regret_empty_seeds(tmp_path):
    assert main(["regret", "--seeds", "", "--out", str(tmp_path / "r")]) == 2


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig3", "fig4-k4", "fig4-k8", "fig4-k16", "fig5", "fig6", "fig7", "fig8"):
        assert name in out
    assert main(["presets", "fig5"]) == 0
    assert main(["presets", "fig99"]) == 2
