
from lpswe.cli import main


def _cfg(tmp_path, text):
    path = tmp_path / "case.cfg"
    path.write_text(text)
    return str(path)


def test_run_lake_at_rest(tmp_path, capsys):
    cfg = _cfg(tmp_path, """
[scenario]
name = lake_at_rest
[run]
tf = 0.01
[mesh]
kind = tri
nx = 6
ny = 6
""")
    out = tmp_path / "out"
    code = main(["run", cfg, "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr().out
    assert "steps" in captured
    assert (out / "run_final.vtk").exists()
    assert (out / "run_cut.csv").exists()
    report = (out / "run_report.txt").read_text()
    assert "max_froude" in report


def test_run_overrides(tmp_path, capsys):
    cfg = _cfg(tmp_path, "[scenario]\nname = lake_at_rest\n[run]\ntf = 0.5\n")
    code = main(["run", cfg, "--scheme", "IMEX", "--theta", "unity",
                 "--tf", "0.01", "--mesh", "cartesian:5:5",
                 "--out", str(tmp_path / "o")])
    assert code == 0


def test_run_bad_config_exits_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, "[run]\nbogus = 1\n")
    code = main(["run", cfg, "--out", str(tmp_path / "o")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_run_missing_config_exits_2(tmp_path, capsys):
    code = main(["run", str(tmp_path / "none.cfg"),
                 "--out", str(tmp_path / "o")])
    assert code == 2


def test_bad_mesh_flag_exits_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, "[scenario]\nname = lake_at_rest\n")
    code = main(["run", cfg, "--mesh", "cartesian:x:y",
                 "--out", str(tmp_path / "o")])
    assert code == 2


def test_usage_error_exits_2(capsys):
    assert main(["frobnicate"]) == 2


def test_verify_unknown_id_exits_2(capsys):
    assert main(["verify", "--only", "nosuch"]) == 2


def test_verify_single_fast_criterion(capsys):
    # run only the cheapest criteria to keep the test quick
    code = main(["verify", "--only", "oracles"])
    out = capsys.readouterr().out
    assert code == 0
    assert "[PASS]" in out
    assert "1/1 criteria passed" in out


def test_reproduce_wb(capsys):
    code = main(["reproduce", "wb", "--out", "/tmp/lpswe-test-wb"])
    out = capsys.readouterr().out
    assert code == 0
    assert "EXEX" in out and "IMEX" in out
