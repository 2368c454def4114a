import json
import subprocess
import sys

import numpy as np
import pytest

from sparseprec.cli import config_schema, main
from sparseprec.io import read_matrix, write_matrix


def test_gen_case2_files(tmp_path, capsys):
    out = tmp_path / "dir"
    assert main(["gen", "case2", "--p", "60", "--seed", "7", "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"sigma.bin", "omega.bin", "spec.json"}
    spec = json.loads((out / "spec.json").read_text())
    assert spec["p"] == 60 and spec["seed"] == 7
    S, O = read_matrix(out / "sigma.bin"), read_matrix(out / "omega.bin")
    assert np.abs(S @ O - np.eye(60)).max() < 1e-8


def test_gen_case1_csv(tmp_path):
    assert main(["gen", "case1", "--p", "5", "--out", str(tmp_path), "--format", "csv"]) == 0
    assert read_matrix(tmp_path / "omega.csv")[0, 0] == pytest.approx(4 / 3)


def test_metrics_identical_is_zero(tmp_path, capsys):
    a = tmp_path / "a.bin"
    write_matrix(a, np.eye(3) * 2)
    assert main(["metrics", "--estimate", str(a), "--truth", str(a)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["frobenius"] == rep["elem_inf"] == rep["operator"] == rep["matrix_l1"] == 0.0


def test_bench_case1_table(capsys):
    assert main(["bench", "case1", "--p", "200", "--lambda", "1e-9", "--solvers", "giss,htp"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# sparseprec-bench-csv v1")
    assert lines[1] == "solver,nnz_1e-8,nnz_1e-4,nnz_raw_1e-8,relative_frobenius,failures"
    assert [ln.split(",")[:3] for ln in lines[2:]] == [["GISS", "598", "598"], ["HTP", "598", "598"]]


def test_estimate_with_telemetry(tmp_path, capsys):
    main(["gen", "case1", "--p", "8", "--out", str(tmp_path)])
    capsys.readouterr()
    out, tel = tmp_path / "est.csv", tmp_path / "t.jsonl"
    rc = main(["estimate", "--sigma", str(tmp_path / "sigma.bin"), "--lambda", "1e-9",
               "--threshold", "1e-8", "--out", str(out), "--telemetry", str(tel)])
    assert rc == 0
    assert np.count_nonzero(read_matrix(out)) == 22
    assert len(tel.read_text().splitlines()) == 8
    assert json.loads(capsys.readouterr().out)["failures"] == 0


def test_estimate_c_lambda_needs_n(tmp_path, capsys):
    write_matrix(tmp_path / "s.bin", np.eye(3))
    rc = main(["estimate", "--sigma", str(tmp_path / "s.bin"), "--c-lambda", "0.7", "--out", str(tmp_path / "o.bin")])
    assert rc == 1


def test_diagnose_outputs(tmp_path, capsys):
    main(["gen", "case1", "--p", "10", "--out", str(tmp_path)])
    capsys.readouterr()
    s = str(tmp_path / "sigma.bin")
    rc = main(["diagnose", "--sigma", s, "--s", "3", "--epsilon", "0.1",
               "--omega0", str(tmp_path / "omega.bin"), "--sigma0", s, "--lambda", "0.01"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"incoherence", "stopping", "deviation_condition"}
    assert out["deviation_condition"]["holds"]


def test_diagnose_degenerate_bound_exits_2(tmp_path, capsys):
    main(["gen", "case1", "--p", "10", "--out", str(tmp_path)])
    s = str(tmp_path / "sigma.bin")
    rc = main(["diagnose", "--sigma", s, "--omega0", str(tmp_path / "omega.bin"), "--sigma0", s, "--lambda", "0.1"])
    assert rc == 2


def test_degenerate_graph_exits_2(tmp_path, capsys):
    # at p = 2 seed 0 draws the empty graph, which has a single eigenvalue
    assert main(["gen", "case2", "--p", "2", "--seed", "0", "--out", str(tmp_path)]) == 2
    assert "DegenerateDraw" in capsys.readouterr().err


def test_usage_error_prints_schema(capsys):
    assert main(["bench", "nope"]) == 1
    err = capsys.readouterr().err
    assert "config schema" in err and '"bench"' in err


def test_missing_command(capsys):
    assert main([]) == 1


def test_missing_required_option(capsys):
    assert main(["gen", "case1", "--p", "5"]) == 1
    assert "--out" in capsys.readouterr().err


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bench": {"p": 20, "lambda": 1e-9, "solvers": ["giss"]}}))
    assert main(["bench", "case1", "--p", "999", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[2].startswith("GISS,58,58")


def test_config_flat_keys(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 4, "out": str(tmp_path / "g")}))
    assert main(["gen", "case1", "--config", str(cfg)]) == 0
    assert (tmp_path / "g" / "omega.bin").exists()


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["gen", "case1", "--config", str(cfg)]) == 1


def test_schema_covers_every_command():
    assert set(config_schema()["properties"]) == {"gen", "estimate", "bench", "metrics", "diagnose"}


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "sparseprec", "bench", "case1", "--p", "2",
                        "--lambda", "1e-9", "--solvers", "giss"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[2].startswith("GISS,4,4")
