import json

from topotrack import experiment as ex
from topotrack.cli import _int_range, main

from test_experiment import SMALL


def test_int_range():
    assert _int_range("1-3") == [1, 2, 3]
    assert _int_range("1:3") == [1, 2]
    assert _int_range("1,5,10") == [1, 5, 10]


def test_presets_command(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ex.preset_names():
        assert name in out


def test_run_command(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SMALL))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--trials", "2", "--seed", "4", "--no-timing", "-q"]) == 0
    rows = ex.read_csv(tmp_path / "o" / "rows.csv")
    assert {r["trial"] for r in rows} == {"0", "1"}
    assert "nmse" in capsys.readouterr().out
    first = (tmp_path / "o" / "rows.csv").read_bytes()
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "p"),
          "--trials", "2", "--seed", "4", "--no-timing", "-q"])
    assert (tmp_path / "p" / "rows.csv").read_bytes() == first


def test_bench_and_observability_commands(tmp_path):
    assert main(["bench-jacobian", "--n", "4", "--p", "1,2", "--repeats", "1",
                 "--out", str(tmp_path / "b.csv")]) == 0
    assert len(ex.read_csv(tmp_path / "b.csv")) == 4
    assert main(["observability", "--n", "2", "--t", "1", "--trials", "3",
                 "--out", str(tmp_path / "o.csv")]) == 0
    (row,) = ex.read_csv(tmp_path / "o.csv")
    assert float(row["fraction_observable"]) == 1.0


def test_errors_exit_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**SMALL, "mc_trials": 0}))
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--config", "no-such-preset"]) == 2
    assert "error" in capsys.readouterr().err
