import json
import subprocess
import sys

import pytest

from fvtunnel import __version__
from fvtunnel.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main
from fvtunnel.config import ScenarioConfig, to_dict
from fvtunnel.transport import read_csv


def write_config(path, **changes):
    data = to_dict(ScenarioConfig())
    for dotted, value in changes.items():
        *parents, leaf = dotted.split("__")
        node = data
        for key in parents:
            node = node[key]
        node[leaf] = value
    path.write_text(json.dumps(data))
    return str(path)


def test_run_prints_report(capsys, tmp_path):
    report = tmp_path / "r.txt"
    assert main(["run", "--report", str(report)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[gap] delta_E_gap = 0.6283185307179" in out
    assert report.read_text() == out


def test_run_grid_points_and_override(capsys):
    assert main(["run", "--grid-points", "121", "--override", "overrides.kappa_J=2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[functionals] n_sites = 121" in out
    values = dict(line.split(" = ") for line in out.splitlines() if " = " in line)
    assert float(values["[current] J"]) == 2 * float(values["[matrix_element] T_if"])


def test_exit_codes(capsys, tmp_path):
    assert main(["run", "--override", "nope=1"]) == EXIT_CONFIG
    bad = write_config(tmp_path / "bad.json", potential__epsilon=0.0)
    assert main(["run", "--config", bad]) == EXIT_NUMERIC
    assert "gap" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
    garbage = tmp_path / "g.csv"
    garbage.write_text("x\n")
    assert main(["plot", "--table", str(garbage), "--out", str(tmp_path / "p.gp")]) == EXIT_IO


def test_sweep_then_plot(capsys, tmp_path):
    cfg = write_config(tmp_path / "c.json", field_sweep__n_steps=4, grid__n_points=121)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "out")]) == EXIT_OK
    table = tmp_path / "out" / "sweep.csv"
    rows, meta = read_csv(table)
    assert len(rows) == 4 and all(r.ok for r in rows)
    assert "wrote 4 rows (0 failed)" in capsys.readouterr().out
    plot = tmp_path / "out" / "sweep.gp"
    assert main(["plot", "--table", str(table), "--out", str(plot)]) == EXIT_OK
    assert "'sweep.csv'" in plot.read_text()
    plot.unlink()
    assert main(["plot", "--table", str(table)]) == EXIT_OK
    assert plot.exists()


def test_sweep_reports_failed_rows(capsys, tmp_path):
    cfg = write_config(tmp_path / "c.json", field_sweep__E_min=0.0, field_sweep__n_steps=3, grid__n_points=121)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    assert "(1 failed)" in capsys.readouterr().out


def test_selftest(capsys):
    assert main(["selftest", "--draws", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 4


def test_module_entry_point_version():
    proc = subprocess.run([sys.executable, "-m", "fvtunnel", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert __version__ in proc.stdout


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
