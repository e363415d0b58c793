import json
import math
import subprocess
import sys

import numpy as np
import pytest

from smoothnp.cli import DataError, ingest, main
from smoothnp.distributions import norm_cdf


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def data_file(tmp_path):
    p = tmp_path / "x.txt"
    x = np.random.default_rng(5).normal(0.4, 1.0, 40)
    p.write_text("x\n" + "\n".join(repr(float(v)) for v in x) + "\n\n")
    return p


def test_ingest_variants(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("1.0\n-2.0\n3.0\n")
    assert ingest(p).values.tolist() == [1.0, -2.0, 3.0]
    p.write_text("x\n0.5\n")
    assert ingest(p).values.tolist() == [0.5]
    p.write_text("\n1.5\n\n2.5,\n")
    assert ingest(p).n == 2
    p.write_text("1.0\nabc\n")
    with pytest.raises(DataError, match=":2:"):
        ingest(p)
    p.write_text("\n\n")
    with pytest.raises(DataError, match="no observations"):
        ingest(p)
    p.write_text("1.0\ninf\n")
    with pytest.raises(DataError):
        ingest(p)
    with pytest.raises(DataError):
        ingest(tmp_path / "missing.txt")


def test_test_command_json(capsys, data_file):
    code, out, _ = run_cli(capsys, "test", "--data", str(data_file), "--test", "smoothed_sign",
                           "--kernel", "a11zero", "--bandwidth", "azzalini-log",
                           "--alpha", "0.05", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    for key in ("statistic", "standardized", "p_normal", "p_edgeworth", "threshold", "decision"):
        assert key in rep
    # derived fields recomputed from the report
    z = (rep["statistic"] - rep["null_mean"]) / math.sqrt(rep["null_variance"])
    assert abs(z - rep["standardized"]) < 1e-12
    assert abs((1 - norm_cdf(z)) - rep["p_normal"]) < 1e-12
    assert (rep["decision"] == "reject") == (rep["statistic"] >= rep["threshold"])
    assert rep["config"]["kernel"] == "a11zero" and rep["config"]["alpha"] == 0.05


@pytest.mark.parametrize("test", ["smoothed_sign", "smoothed_wilcoxon", "sign", "wilcoxon", "t"])
def test_all_negative_data_retains(capsys, tmp_path, test):
    p = tmp_path / "neg.txt"
    p.write_text("\n".join(str(-v) for v in range(1, 12)))
    code, out, _ = run_cli(capsys, "test", "--data", str(p), "--test", test)
    assert code == 0 and json.loads(out)["decision"] == "retain"


def test_default_kernel_for_wilcoxon(capsys, data_file):
    _, out, _ = run_cli(capsys, "test", "--data", str(data_file), "--test", "smoothed_wilcoxon")
    assert json.loads(out)["config"]["kernel"] == "epanechnikov4"


def test_density_adjusted_flags(capsys, data_file):
    code, _, err = run_cli(capsys, "test", "--data", str(data_file), "--variance-mode",
                           "density_adjusted", "--kernel", "epanechnikov")
    assert code == 1 and "--f0" in err
    code, out, _ = run_cli(capsys, "test", "--data", str(data_file), "--variance-mode",
                           "density_adjusted", "--kernel", "epanechnikov", "--f0", "0.3989",
                           "--f2-0", "-0.3989")
    assert code == 0 and json.loads(out)["p_edgeworth"] is None


def test_ci_command(capsys, data_file):
    code, out, _ = run_cli(capsys, "ci", "--data", str(data_file), "--method",
                           "smoothed_wilcoxon", "--level", "0.9")
    rep = json.loads(out)
    assert code == 0 and rep["lower"] < rep["upper"] and rep["level"] == 0.9
    code, _, err = run_cli(capsys, "ci", "--data", str(data_file), "--kernel", "epanechnikov")
    assert code == 2 and "A[1,1]" in err


def test_enumerate_command(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "--n", "10", "--alphas", "0.9,0.95,0.975")
    rep = json.loads(out)
    assert code == 0
    assert [(lv["s_wins"], lv["w_wins"]) for lv in rep["levels"]] == [(25, 82), (25, 48), (5, 21)]
    code, _, _ = run_cli(capsys, "enumerate", "--n", "30")
    assert code == 1
    code, out, _ = run_cli(capsys, "enumerate", "--n", "30", "--method", "joint-dp",
                           "--z-decimals", "2")
    assert code == 0 and json.loads(out)["method"] == "joint-dp"


def test_kernel_info_command(capsys):
    code, out, _ = run_cli(capsys, "kernel-info", "--kernel", "a11zero", "--n", "30")
    rep = json.loads(out)
    assert code == 0 and abs(rep["A_1_1"]) < 1e-10
    assert rep["bandwidth"] == pytest.approx(0.0946225, abs=1e-7)


def test_simulate_command(capsys, tmp_path):
    csv_path = tmp_path / "cells.csv"
    code, out, _ = run_cli(capsys, "simulate", "--experiment", "power", "--model",
                           "normal,laplace", "--n", "20", "--theta", "0,0.5",
                           "--replications", "300", "--seed", "7", "--csv", str(csv_path))
    rep = json.loads(out)
    assert code == 0 and rep["config"]["seed"] == 7 and len(rep["cells"]) == 12
    assert csv_path.read_text().startswith("model,n,theta,alpha,test,estimate,se")
    code, _, _ = run_cli(capsys, "simulate", "--experiment", "power", "--model", "cauchy")
    assert code == 1
    code, _, _ = run_cli(capsys, "simulate", "--experiment", "power", "--replications", "0")
    assert code == 1


def test_verify_command_text(capsys):
    code, out, _ = run_cli(capsys, "verify", "--format", "text")
    assert code == 0 and "passed: True" in out


def test_usage_and_data_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["test"])
    assert e.value.code == 1
    code, _, _ = run_cli(capsys, "test", "--data", str(tmp_path / "none.txt"))
    assert code == 2
    p = tmp_path / "bad.txt"
    p.write_text("1.0\nabc\n")
    code, _, err = run_cli(capsys, "test", "--data", str(p))
    assert code == 2 and "bad.txt:2" in err
    code, _, _ = run_cli(capsys, "test", "--data", str(p), "--alpha", "0")
    assert code == 1
    capsys.readouterr()


def test_invariant_breach_exit_code(capsys, data_file, monkeypatch):
    from smoothnp import cli, inference

    def broken(*a, **k):
        raise inference.InvariantError("forced")

    monkeypatch.setattr(cli, "confidence_interval", broken)
    code, _, err = run_cli(capsys, "ci", "--data", str(data_file))
    assert code == 3 and "forced" in err


def test_module_entry_point(data_file):
    res = subprocess.run([sys.executable, "-m", "smoothnp", "test", "--data", str(data_file),
                          "--format", "text"], capture_output=True, text=True)
    assert res.returncode == 0 and "decision:" in res.stdout
