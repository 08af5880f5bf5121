import csv
import subprocess
import sys

import numpy as np
import pytest

from hilbert_iter.bench import (
    TABLE_HEADER,
    ConfigError,
    ExperimentConfig,
    RateStudyConfig,
    cmd_rates,
    cmd_tables,
    fit_slope,
    read_config,
)
from hilbert_iter.cli import main


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def small_table(tmp_path_factory):
    out = tmp_path_factory.mktemp("tables")
    cfg = ExperimentConfig(variant="ii", m=120, seeds=(1, 2, 3))
    cmd_tables(cfg, out)
    return out


def test_table_schema(small_table):
    text = (small_table / "tables_ii.csv").read_text()
    assert text.splitlines()[0] == ",".join(TABLE_HEADER)
    rows = read_rows(small_table / "tables_ii.csv")
    assert len(rows) == 3 * 2 * 3 + 6
    per_seed = [r for r in rows if r["seed"] != "median"]
    delta = 0.01 * np.linalg.norm(__import__("hilbert_iter").make_problem("ii", 120).y)
    for r in per_seed:
        assert r["status"] == "ok"
        assert float(r["d_n"]) <= 1.1 * delta


def test_markdown_columns(small_table):
    md = (small_table / "tables_ii.md").read_text()
    assert md.count("| method | n | alpha_n | d_n | e_n |") == 2


def test_floats_round_trip(small_table):
    rows = read_rows(small_table / "tables_ii.csv")
    v = rows[0]["alpha_n"]
    assert repr(float(v)) == v


def test_noiseless_rows(tmp_path):
    rows, _ = cmd_tables(ExperimentConfig(variant="i", m=60, sigma=0.0, seeds=(1,)), tmp_path)
    assert all(r["report"].n == 0 and r["status"] == "degenerate-noiseless" for r in rows)


def test_config_validation():
    with pytest.raises(ConfigError) as info:
        ExperimentConfig(methods=("IIM/XX",))
    assert info.value.field == "method"
    with pytest.raises(ConfigError):
        RateStudyConfig(sigmas=(1e-2, 1e-3, 1e-4))
    with pytest.raises(ConfigError):
        RateStudyConfig(sigmas=(1e-2, 1e-3, 3e-3, 1e-4))


def test_fit_slope_exact():
    d = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    slope, res = fit_slope(d, 3 * d**0.4)
    assert slope == pytest.approx(0.4, rel=1e-12) and res < 1e-12


def test_rates_small(tmp_path):
    res = cmd_rates(RateStudyConfig(variant="ii", m=100, seeds=(1, 2)), tmp_path)
    assert 0.3 < res["IIM/A1"]["slope"] < 0.8
    assert res["IIM/A1"]["expected"] == pytest.approx(5 / 9)
    assert (tmp_path / "rates_ii.csv").read_text().startswith("method,sigma,delta,seed")


def test_read_config_sections():
    got = read_config("[one]\nvariant = ii\nm=50\n\n[two]\nmethod = TI/DP\n")
    assert got == {"one": {"variant": "ii", "m": "50"}, "two": {"method": "TI/DP"}}
    assert read_config("C = 1.2\n") == {"run": {"C": "1.2"}}


def test_read_config_reports_line():
    with pytest.raises(ConfigError) as info:
        read_config("variant = i\nthis line is broken\n")
    assert info.value.line == 2


def test_solve_minimal(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("variant = i\nm = 100\n")
    assert main(["solve", str(cfg), "--out", str(tmp_path)]) == 0
    trace = tmp_path / "trace_IIM-A1_1.csv"
    rows = read_rows(trace)
    assert trace.read_text().splitlines()[0] == "k,alpha_k,sigma_k,d_k,e_k,e_s_k"
    n = int(capsys.readouterr().out.split("n=")[1].split()[0])
    assert len(rows) == n


def test_solve_flag_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("variant = i\nm = 80\nmethod = IIM/A1\n")
    assert main(["solve", str(cfg), "--method", "IIM/GS", "--seed", "4", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "trace_IIM-GS_4.csv").exists()


def test_solve_unknown_method(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("variant = i\nmethod = landweber\n")
    assert main(["solve", str(cfg), "--out", str(tmp_path)]) == 2
    assert "'method'" in capsys.readouterr().err


def test_solve_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("variant = i\ntolerance = 3\n")
    assert main(["solve", str(cfg)]) == 2
    assert "'tolerance'" in capsys.readouterr().err


def test_solve_parse_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("variant = i\n???\n")
    assert main(["solve", str(cfg)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_tables_cli(tmp_path):
    code = main(["tables", "--variant", "iii", "--m", "80", "--seed", "1,2", "--method", "IIM/A1",
                 "--start", "bound", "--out", str(tmp_path)])
    assert code == 0
    assert len(read_rows(tmp_path / "tables_iii.csv")) == 3


def test_tables_cli_bad_value(tmp_path):
    assert main(["tables", "--variant", "i", "--start", "zero", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hilbert_iter", "verify"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.count(" ok") == 5
