import csv
import json
import os
import subprocess
import sys

import pytest

from pantsurf.cli import config_digest, main
from pantsurf.surface import deserialize


def _read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    return lines[0].split(","), lines[1], list(csv.reader(lines[2:]))


def test_pants_prints_seams(capsys):
    assert main(["pants", "--half-lengths", "1,1,1"]) == 0
    out = capsys.readouterr().out
    assert "seam 1-2 = 1.7049128324" in out
    assert "Delta_plus" in out


def test_pants_rejects_bad_input():
    with pytest.raises(SystemExit) as exc:
        main(["pants", "--half-lengths", "1,1"])
    assert exc.value.code == 2


def test_experiment_needs_a_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["growth", "--trials", "2"])
    assert exc.value.code == 2
    assert "--seed" in capsys.readouterr().err


def test_gen_writes_a_record(tmp_path):
    path = tmp_path / "s.txt"
    assert main(["gen", "--genus", "4", "--seed", "3", "--out", str(path)]) == 0
    surf = deserialize(path.read_text())
    assert surf.genus == 4 and surf.seed == 3


def test_growth_outputs_are_reproducible(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        argv = ["growth", "--seed", "5", "--trials", "4", "--R-grid", "2,4", "--m", "8",
                "--law", "uniform:1,3/uniform", "--out", str(out)]
        assert main(argv) == 0
        outs.append(out)
    for f in ("growth.csv", "growth_hist.csv"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    header, digest_line, rows = _read_csv(outs[0] / "growth.csv")
    assert header[0] == "R" and digest_line.startswith("# config-digest ")
    assert len(rows) == 8
    man = json.loads((outs[0] / "growth_manifest.json").read_text())
    assert digest_line.split()[-1] == man["config_digest"]
    assert len(man["trial_seeds"]["growth"]) == 4
    assert set(man["files"]) == {"growth.csv", "growth_hist.csv"}
    assert man["config"]["seed"] == "5"


def test_config_file_and_flag_precedence(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[growth]\ntrials = 3\nR_grid = 2\nm = 8\n")
    out = tmp_path / "o"
    assert main(["growth", "--config", str(ini), "--seed", "1", "--trials", "2", "--out", str(out)]) == 0
    man = json.loads((out / "growth_manifest.json").read_text())
    assert man["config"]["trials"] == "2" and man["config"]["R_grid"] == "2"
    assert len(_read_csv(out / "growth.csv")[2]) == 2


def test_config_fallback_section(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[experiment]\ntrials = 2\nR_grid = 2\nm = 8\n")
    out = tmp_path / "o"
    assert main(["growth", "--config", str(ini), "--seed", "1", "--out", str(out)]) == 0
    man = json.loads((out / "growth_manifest.json").read_text())
    assert man["config"]["trials"] == "2"


def test_digest_ignores_output_path():
    a = {"seed": "1", "out": "x"}
    b = {"seed": "1", "out": "y"}
    assert config_digest(a) == config_digest(b)
    assert config_digest(a) != config_digest({"seed": "2", "out": "x"})


def test_collar_preset_and_report(tmp_path):
    out = tmp_path / "r"
    assert main(["diameter", "--preset", "collar", "--instances", "1", "--m", "8",
                 "--seed", "0", "--out", str(out)]) == 0
    code = main(["report", "--dir", str(out)])
    rows = json.loads((out / "report.json").read_text())
    assert [r["criterion"] for r in rows] == [16]
    assert code == (0 if rows[0]["pass"] else 2)
    assert (out / "report.md").exists()


def test_report_without_manifests(tmp_path):
    assert main(["report", "--dir", str(tmp_path)]) == 1


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "pantsurf.cli", "pants", "--half-lengths", "1,1,1"],
                       capture_output=True, text=True, check=True)
    assert "seam 2-3" in r.stdout
