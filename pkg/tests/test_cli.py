import json
import subprocess
import sys

import numpy as np
import pytest

from cohnorm import cli
from cohnorm.matrices import direct_sum, make_all_ones, save_matrix


@pytest.fixture
def j2half_file(tmp_path):
    path = tmp_path / "j2half.json"
    save_matrix(make_all_ones(2).mat / 2, str(path))
    return str(path)


def test_coherence_lqp(j2half_file, capsys):
    rc = cli.main(["coherence", "--state", j2half_file, "--measure", '{"tag":"lqp","q":1,"p":2}'])
    out = capsys.readouterr().out
    assert rc == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 1.0) < 1e-12
    assert payload["method"] == "closed_form"
    assert payload["minimizer_diagonal"] == [0.5, 0.5]


def test_coherence_trace_min_diag(tmp_path, capsys):
    path = tmp_path / "state.json"
    save_matrix(direct_sum([make_all_ones(3).mat / 3, [[0.0]]]).mat, str(path))
    rc = cli.main(["coherence", "--state", str(path), "--measure", '{"tag":"schatten","p":1,"method":"min_diag"}'])
    out = capsys.readouterr().out
    assert rc == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 4.0 / 3.0) < 1e-6


def test_coherence_diagonal_state(tmp_path, capsys):
    path = tmp_path / "diag.json"
    save_matrix(np.diag([0.25, 0.75]).astype(complex), str(path))
    rc = cli.main(["coherence", "--state", str(path), "--measure", '{"tag":"lqp","q":1,"p":1}'])
    payload = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert payload["value"] == 0.0


def test_coherence_normalize_flag(j2half_file, capsys):
    rc = cli.main(["coherence", "--state", j2half_file, "--measure", '{"tag":"schatten","p":2}', "--normalize"])
    payload = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert abs(payload["normalized_value"] - 1.0) < 1e-9


def test_coherence_usage_errors(tmp_path, capsys):
    rc = cli.main(["coherence", "--state", "/nonexistent.json", "--measure", '{"tag":"lqp","q":1,"p":2}'])
    assert rc == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}')
    rc = cli.main(["coherence", "--state", str(bad), "--measure", "not json"])
    assert rc == 2
    # valid file but not a density matrix
    notrho = tmp_path / "notrho.json"
    save_matrix(np.eye(2, dtype=complex) * 2, str(notrho))
    rc = cli.main(["coherence", "--state", str(notrho), "--measure", '{"tag":"lqp","q":1,"p":2}'])
    assert rc == 2


def test_repro_necessity_section(tmp_path, capsys):
    rc = cli.main(["repro", "lqp-necessity", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "pass" in out
    csv_text = (tmp_path / "repro-lqp-necessity.csv").read_text()
    assert csv_text.splitlines()[0] == "label,claimed,computed,diff,pass"
    assert "true" in csv_text and "false" not in csv_text
    payload = json.loads((tmp_path / "repro-lqp-necessity.json").read_text())
    assert payload["section"] == "lqp-necessity"
    assert all(row["pass"] for row in payload["rows"])


def test_repro_sufficiency_small(capsys):
    rc = cli.main(["repro", "lqp-sufficiency", "--trials", "25"])
    assert rc == 0
    assert "B3 violations" in capsys.readouterr().out


def test_repro_unknown_section():
    assert cli.main(["repro", "everything"]) == 2


def test_falsify_measure_vs_nonmeasure(tmp_path, capsys):
    rc = cli.main(["falsify", "--measure", '{"tag":"lqp","q":1,"p":1.5}', "--trials", "40", "--seed", "5"])
    assert rc == 0
    rc = cli.main(["falsify", "--measure", '{"tag":"lqp","q":2,"p":2}', "--trials", "10", "--out", str(tmp_path)])
    assert rc == 1
    rows = (tmp_path / "violations.csv").read_text().splitlines()
    assert rows[0] == "axiom,gap,witness"
    assert len(rows) > 1
    assert (tmp_path / "witness-0000.json").exists()


def test_falsify_deterministic_output(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        rc = cli.main(["falsify", "--measure", '{"tag":"lqp","q":3,"p":2}', "--trials", "15", "--seed", "9", "--out", str(out)])
        assert rc == 1
    assert (out1 / "violations.json").read_bytes() == (out2 / "violations.json").read_bytes()


def test_coherence_deterministic_output(j2half_file, tmp_path):
    outs = []
    for sub in ("x", "y"):
        out = tmp_path / sub
        rc = cli.main(
            ["coherence", "--state", j2half_file, "--measure", '{"tag":"schatten","p":1,"method":"min_diag"}', "--out", str(out)]
        )
        assert rc == 0
        outs.append((out / "coherence.json").read_bytes())
    assert outs[0] == outs[1]


def test_console_entry_point():
    got = subprocess.run(
        [sys.executable, "-m", "cohnorm.cli", "coherence", "--help"],
        capture_output=True,
        text=True,
    )
    assert got.returncode == 0
    assert "--state" in got.stdout
