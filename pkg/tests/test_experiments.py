import math
import warnings

import numpy as np
import pytest

from caperc.experiments import (
    ExperimentReport,
    exp_black_threshold,
    exp_critical_window,
    exp_giant_lln,
    exp_intersection_structure,
    exp_poisson_small_components,
    exp_regime_scaling,
    exp_tree_census,
    grid_seed,
    parse_zeta_rule,
    poisson_chi2,
    relative_spread,
)


def test_relative_spread():
    assert relative_spread([2.0, 2.0]) == 0.0
    assert relative_spread([1.0, 3.0]) == pytest.approx(1.0)


def test_grid_seed_independent_of_grid():
    a = exp_regime_scaling((0.4, 0.4), (500, 1000), 3, 11)
    b = exp_regime_scaling((0.4, 0.4), (1000,), 3, 11)
    assert a.aggregates[1000].values == b.aggregates[1000].values
    assert grid_seed(11, 1000) != grid_seed(11, 500)


def test_regime_scaling_subcritical_smoke():
    rep = exp_regime_scaling((0.4, 0.4, 0.2), (1000, 2000), 5, 1)
    assert {v.check for v in rep.verdicts} == {"bounded_by_k"}
    assert set(rep.column("max_ca")) == {1000, 2000}


def test_regime_scaling_rejects_unclassified():
    with pytest.raises(ValueError):
        exp_regime_scaling((1.0, 0.5, 0.5), (1000,), 2, 1)


def test_regime_scaling_grid_must_increase():
    with pytest.raises(ValueError):
        exp_regime_scaling((0.4, 0.4), (2000, 1000), 2, 1)


def test_zeta_rules():
    assert parse_zeta_rule("inv-log")(math.e**2) == pytest.approx(0.5)
    assert parse_zeta_rule("power:0.5")(10**4) == pytest.approx(0.01)
    assert parse_zeta_rule("const:0.3")(10**9) == 0.3
    for bad in ("power:-1", "const:0", "linear"):
        with pytest.raises(ValueError):
            parse_zeta_rule(bad)


def test_constant_zeta_warns_and_defers():
    with pytest.warns(UserWarning, match="does not vanish"):
        rep = exp_critical_window("const:0.3", 0.5, (1000, 2000), 3, 2)
    assert rep.name == "regime-scaling"


def test_critical_window_smoke():
    rep = exp_critical_window("inv-log", 0.5, (1000, 4000), 4, 3)
    assert [v.n for v in rep.verdicts if v.check == "ratio_in_band"] == [1000, 4000]
    tight = exp_critical_window("power:0.5", 0.5, (1000, 4000), 4, 3)
    assert tight.verdict("q99_flat") is not None


def test_black_threshold_prediction_and_rejections():
    rep = exp_black_threshold(0.5, 0.05, (10**4,), 3, 4)
    rows = {r["metric"]: r for r in rep.rows}
    assert rows["max_black"]["predicted"] == pytest.approx(math.log(1e4) / math.log(20))
    for q in (0.0, 1.0):
        with pytest.raises(ValueError):
            exp_black_threshold(0.5, q, (1000,), 2, 1)


def test_black_threshold_prediction_at_million():
    from caperc.theory import black_threshold_prediction

    assert black_threshold_prediction(1e6, 0.05) == pytest.approx(4.612, abs=5e-4)


def test_tree_census_smoke():
    rep = exp_tree_census(0.5, 20000, 4, 5, s_check=3, rel_tol=0.5)
    checks = {v.check for v in rep.verdicts}
    assert {"no_large_components", "few_cyclic_vertices", "tree_count_s3", "isolated_vertices"} <= checks
    with pytest.raises(ValueError):
        exp_tree_census(1.5, 1000, 2, 1)


def test_poisson_smoke_and_regime_guard():
    rep = exp_poisson_small_components((0.45, 0.35, 0.25), 3000, 20, 6)
    assert rep.verdict("N2_dispersion").n == 3000
    assert rep.verdict("bounded_by_k").passed
    with pytest.raises(ValueError):
        exp_poisson_small_components((1.5, 0.2), 1000, 2, 1)


def test_poisson_chi2_on_poisson_sample():
    x = np.random.default_rng(0).poisson(2.0, size=2000)
    stat, p, dof = poisson_chi2(x)
    assert dof >= 1 and p > 0.001


def test_poisson_chi2_degenerate():
    stat, p, dof = poisson_chi2([0, 0, 0, 0])
    assert math.isnan(p)


def test_giant_smoke_records_warnings():
    rep = exp_giant_lln(0.2, (2000, 4000), 3, 7)
    assert any("outside barely-supercritical window" in note for note in rep.notes)
    with pytest.raises(ValueError):
        exp_giant_lln(0.5, (1000,), 2, 1)


def test_intersection_smoke():
    rep = exp_intersection_structure("inv-log", 0.5, 1000, 5, 8)
    assert {v.check for v in rep.verdicts} == {"outside_gk_clean", "outside_giant_clean"}


def test_intersection_threshold_above_max_is_clean():
    rep = exp_intersection_structure("inv-log", 0.5, 1000, 3, 8, threshold=10**6)
    assert all(v.observed == 1.0 for v in rep.verdicts)


def test_report_write(tmp_path):
    rep = exp_regime_scaling((0.4, 0.4), (500, 1000), 2, 9)
    out = rep.write(tmp_path)
    header = (out / "results.csv").read_text().splitlines()[0]
    assert header.startswith("n,metric,count,mean,sd,min,max,q01,q05,q25,q50,q75,q95,q99")
    assert (out / "plot.svg").read_text().count('class="point"') == 2
    assert isinstance(rep, ExperimentReport)
