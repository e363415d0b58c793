import csv
import io
import json
import math

import pytest

from smoothnp.distributions import DistributionModel
from smoothnp.simulation import (
    CSV_COLUMNS,
    SimulationConfig,
    merge_reports,
    run,
    run_edgeworth_accuracy,
    run_grid,
)


def cfg(experiment, **kw):
    kw.setdefault("replications", 3000)
    return SimulationConfig(experiment, **kw)


def test_defaults_and_validation():
    assert cfg("power").alphas == (0.05,)
    assert cfg("edgeworth_accuracy").alphas == (0.95,)
    for bad in ({"replications": 0}, {"n": 1}, {"alphas": (1.2,)}, {"statistic": "t"},
                {"kernel_sign": "gauss"}, {"workers": 0}):
        with pytest.raises(ValueError):
            cfg("power", **bad)
    with pytest.raises(ValueError):
        SimulationConfig("bootstrap")
    with pytest.raises(ValueError):
        run_edgeworth_accuracy(cfg("power"))


@pytest.mark.parametrize("experiment", ["tail_comparison", "edgeworth_accuracy",
                                        "power", "equivalence"])
def test_worker_count_does_not_change_results(experiment):
    base = cfg(experiment, block_size=500, n=25)
    one = run(base)
    many = run(SimulationConfig(**{**base.__dict__, "workers": 4}))
    assert one.same_results(many)


def test_seed_changes_results():
    a = run(cfg("power", theta=0.2))
    b = run(cfg("power", theta=0.2, seed=1))
    assert not a.same_results(b)


def test_single_replication_is_well_formed():
    rep = run(cfg("tail_comparison", replications=1, alphas=(0.9, 0.975)))
    for c in rep.cells:
        if c.test in ("S~", "W~", "tie", "region"):
            assert c.extra["count"] in (0, 1)
    json.loads(rep.to_json())


def test_probabilities_and_standard_errors():
    rep = run(cfg("power", theta=0.3, alphas=(0.01, 0.05)))
    for c in rep.cells:
        assert 0.0 <= c.estimate <= 1.0
        assert c.se == pytest.approx(math.sqrt(c.estimate * (1 - c.estimate) / 3000))
    assert rep.cell("S~", 0.01).estimate <= rep.cell("S~", 0.05).estimate


def test_edgeworth_accuracy_deterministic_columns():
    rep = run(cfg("edgeworth_accuracy", alphas=(0.95, 0.99)))
    assert round(rep.cell("S~:edge", 0.95).estimate, 5) == 0.04993
    assert rep.cell("S~:normal", 0.99).estimate == pytest.approx(0.01, abs=1e-15)
    w = run(cfg("edgeworth_accuracy", statistic="wilcoxon"))
    assert w.cell("W~:edge", 0.95).estimate == pytest.approx(0.0494172, abs=1e-7)


def test_density_adjusted_mode_runs():
    rep = run(cfg("edgeworth_accuracy", kernel_sign="epanechnikov",
                  variance_mode="density_adjusted"))
    assert rep.cell("S~:true", 0.95).se > 0
    assert "notes" not in rep.config


def test_simple_mode_with_unjustified_kernel_is_noted():
    rep = run(cfg("edgeworth_accuracy", kernel_sign="epanechnikov"))
    assert any("A[1,1]" in n for n in rep.config["notes"])


def test_power_grows_with_theta():
    small = run(cfg("power", theta=0.1, n=30))
    large = run(cfg("power", theta=0.5, n=30))
    for test in ("S~", "W~", "t"):
        assert large.cell(test).estimate > small.cell(test).estimate


def test_equivalence_report():
    rep = run(cfg("equivalence", n=40))
    assert {c.test for c in rep.cells} == {"S-S~", "W-W~"}
    assert all(c.estimate >= 0 and c.se > 0 for c in rep.cells)


def test_csv_and_grid():
    rep = run_grid(cfg("power", replications=500),
                   [DistributionModel("normal"), DistributionModel("laplace")], [20], [0.0, 0.5])
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 2 * 2 * 3
    assert {r["model"] for r in rows} == {"normal", "laplace"}
    assert len(merge_reports([rep, rep]).cells) == 24


def test_tail_comparison_counts_add_up():
    rep = run(cfg("tail_comparison", alphas=(0.95,)))
    s, w, t, reg = (rep.cell(k, 0.95).extra["count"] for k in ("S~", "W~", "tie", "region"))
    assert s + w + t == reg
    assert rep.cell("W~/S~", 0.95).estimate == pytest.approx(w / s)
