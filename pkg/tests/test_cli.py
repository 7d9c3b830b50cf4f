import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ppgraph.cli import main
from ppgraph.configfile import dump_sim_spec

from conftest import LANSING_COUNTS, pattern_csv, random_pattern


@pytest.fixture
def lansing_like(tmp_path):
    rng = np.random.default_rng(2024)
    counts = {k: v // 5 for k, v in LANSING_COUNTS.items()}
    path = tmp_path / "trees.csv"
    path.write_bytes(pattern_csv(random_pattern(rng, counts, (0, 0, 924, 924))))
    return path


@pytest.fixture
def three_types(tmp_path):
    rng = np.random.default_rng(7)
    path = tmp_path / "three.csv"
    path.write_bytes(pattern_csv(random_pattern(rng, {"a": 120, "b": 90, "c": 150})))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_writes_graph_files(capsys, tmp_path, lansing_like):
    js, dot = tmp_path / "g.json", tmp_path / "g.dot"
    code, out, _ = run(capsys, "analyze", lansing_like, "--window", "0,0,924,924",
                       "--out-json", js, "--out-dot", dot)
    assert code == 0
    assert out.count(" -- ") == 15
    assert "smoothing half width h: 4 (auto)" in out
    doc = json.loads(js.read_text())
    assert doc["nodes"] == sorted(LANSING_COUNTS)
    assert dot.read_text().startswith("graph sdgm {")


def test_two_types_need_flag(capsys, tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "two.csv"
    path.write_bytes(pattern_csv(random_pattern(rng, {"a": 80, "b": 60})))
    code, _, err = run(capsys, "analyze", path, "--window", "0,0,1,1")
    assert code == 1 and "d >= 3" in err
    code, out, _ = run(capsys, "analyze", path, "--window", "0,0,1,1", "--allow-bivariate")
    assert code == 0 and "a -- b" in out


def test_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "nope.csv")
    assert code == 1 and "not found" in err


def test_bad_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["analyze"])
    assert e.value.code == 1


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectra_auto_rows(capsys, three_types):
    code, out, _ = run(capsys, "spectra", three_types, "--window", "0,0,1,1",
                       "--field", "auto", "--type", "b")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 544
    assert (rows[0]["p"], rows[0]["q"]) == ("0", "-16")
    dc = next(r for r in rows if r["p"] == "0" and r["q"] == "0")
    assert float(dc["value"]) == 90 ** 2


def test_spectra_dij_bounded(capsys, three_types):
    code, out, _ = run(capsys, "spectra", three_types, "--window", "0,0,1,1",
                       "--field", "dij", "--pair", "a,c")
    assert code == 0
    rows = read_csv(out)
    vals = np.array([float(r["value"]) for r in rows if r["value"]])
    assert len(vals) == 543
    assert np.all((vals >= 0) & (vals <= 1))


def test_spectra_cross_and_phase(capsys, three_types):
    code, out, _ = run(capsys, "spectra", three_types, "--window", "0,0,1,1",
                       "--field", "cross", "--pair", "a,b", "--grid-p", "4")
    rows = read_csv(out)
    assert code == 0 and list(rows[0]) == ["p", "q", "re", "im"] and len(rows) == 40
    # type a has two events half a period apart in x, so its DFT vanishes at
    # odd p and the phase there is undefined
    path = three_types.parent / "cancel.csv"
    path.write_text("x,y,type\n0.0,0.0,a\n0.5,0.0,a\n0.25,0.25,b\n0.7,0.1,c\n")
    code, out, _ = run(capsys, "spectra", path, "--window", "0,0,1,1",
                       "--field", "phase", "--pair", "a,b", "--grid-p", "4")
    rows = read_csv(out)
    odd = [r for r in rows if int(r["p"]) % 2 == 1]
    assert code == 0 and odd and all(r["value"] == "" for r in odd)


def test_spectra_unknown_label(capsys, three_types):
    code, _, err = run(capsys, "spectra", three_types, "--field", "co", "--pair", "a,zz")
    assert code == 1 and "zz" in err


def test_simulate_then_analyze(capsys, tmp_path, chain_spec):
    spec = tmp_path / "chain.cfg"
    spec.write_text(dump_sim_spec(chain_spec))
    out = tmp_path / "chain.csv"
    assert run(capsys, "simulate", spec, "-o", out, "--seed", "11")[0] == 0
    header, *rows = out.read_text().splitlines()
    assert header == "x,y,type"
    assert {r.rsplit(",", 1)[1] for r in rows} == {"a", "b", "c"}
    code, text, _ = run(capsys, "analyze", out, "--window", "0,0,1,1")
    assert code == 0 and "types: 3" in text


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--dimensions", 4, "--replicates", 10,
                       "--seed", 7)
    assert code == 0 and out.rstrip().endswith("ok")
    code, _, err = run(capsys, "oracle-check", "--dimensions", 2)
    assert code == 1 and "d" in err


def test_config_precedence(capsys, tmp_path, three_types):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# analysis settings\nalpha = 0.9\nsmooth-h = 2\nwindow = 0,0,1,1\n")
    code, out, _ = run(capsys, "analyze", three_types, "--config", cfg)
    assert code == 0 and "alpha: 0.9" in out and "h: 2 (fixed)" in out
    code, out, _ = run(capsys, "analyze", three_types, "--config", cfg, "--alpha", "0.3")
    assert "alpha: 0.3" in out and "h: 2 (fixed)" in out
    cfg.write_text("alpah = 0.3\n")
    code, _, err = run(capsys, "analyze", three_types, "--config", cfg)
    assert code == 1 and "alpah" in err


def test_deterministic_bytes(capsys, tmp_path, lansing_like):
    outputs = []
    for k in range(2):
        js, dot = tmp_path / f"{k}.json", tmp_path / f"{k}.dot"
        code, out, _ = run(capsys, "analyze", lansing_like, "--window", "0,0,924,924",
                           "--out-json", js, "--out-dot", dot)
        outputs.append((out, js.read_bytes(), dot.read_bytes()))
    assert outputs[0] == outputs[1]


def test_console_entry_point(three_types):
    proc = subprocess.run([sys.executable, "-m", "ppgraph.cli", "analyze", str(three_types),
                           "--window", "0,0,1,1", "--out-json", "-"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert '"alpha": 0.4' in proc.stdout


def test_minimal_smoothing_rule(capsys, three_types):
    code, out, _ = run(capsys, "analyze", three_types, "--window", "0,0,1,1",
                       "--smooth-h", "minimal")
    assert code == 0 and "h: 1 (minimal)" in out
    code, _, err = run(capsys, "analyze", three_types, "--smooth-h", "wide")
    assert code == 1 and "smooth-h" in err
