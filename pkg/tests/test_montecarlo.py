import numpy as np
import pytest

from caperc.census import ca_census
from caperc.connectivity import ca_partition
from caperc.model import ModelParams, sample_model
from caperc.montecarlo import (
    Metric,
    Summary,
    TrialError,
    TrialResult,
    TrialSpec,
    aggregate,
    nearest_rank,
    run_trial,
    run_trials,
)

PARAMS = ModelParams(2000, 3, (1.2, 0.6, 0.4))
METRICS = (
    Metric.ca_census(),
    Metric.layer_census(1, 2),
    Metric.giant_size(1),
    Metric.black_threshold(0.2, 3),
    Metric.intersection(2),
)


def test_single_trial_equals_direct_pipeline():
    spec = TrialSpec(PARAMS, (Metric.ca_census(),), master_seed=77, trials=1)
    [res] = run_trials(spec)
    g = sample_model(PARAMS, 77, trial_index=0)
    cc = ca_census(ca_partition(g), PARAMS.k)
    assert res.scalars["max_ca"] == cc.max_ca_size
    assert res.scalars["N_2"] == cc.N[2] and res.scalars["N_3"] == cc.N[3]
    assert res.hists["ca_size_hist"] == cc.size_hist


def test_trials_are_sorted_and_reproducible():
    spec = TrialSpec(PARAMS, METRICS, master_seed=3, trials=6)
    a = run_trials(spec, workers=1)
    assert [r.trial_index for r in a] == list(range(6))
    b = run_trial(spec, 4)
    assert a[4].scalars == b.scalars and a[4].hists == b.hists and a[4].seeds == b.seeds


def test_workers_do_not_change_results():
    spec = TrialSpec(PARAMS, METRICS, master_seed=5, trials=8)
    a = run_trials(spec, workers=1)
    b = run_trials(spec, workers=4)
    assert [(r.scalars, r.hists, r.seeds) for r in a] == [(r.scalars, r.hists, r.seeds) for r in b]


def test_layer_only_metrics_skip_other_layers():
    spec = TrialSpec(PARAMS, (Metric.layer_census(2),), master_seed=9, trials=1)
    res = run_trial(spec, 0)
    assert set(res.seeds) == {"layer-2"}
    full = TrialSpec(PARAMS, (Metric.layer_census(2), Metric.max_ca()), master_seed=9, trials=1)
    assert run_trial(full, 0).scalars["layer{2}.max_size"] == res.scalars["layer{2}.max_size"]


def test_intersection_counts_are_consistent():
    spec = TrialSpec(PARAMS, (Metric.intersection(2), Metric.ca_census()), master_seed=1, trials=3)
    for r in run_trials(spec):
        large = r.scalars["intersection[t=2].large_ca"]
        assert large == sum(v for s, v in r.hists["ca_size_hist"].items() if s >= 2)
        assert 0 <= r.scalars["intersection[t=2].outside_gk"] <= large


def test_intersection_vacuous_when_threshold_exceeds_max():
    spec = TrialSpec(PARAMS, (Metric.intersection(10**6),), master_seed=1, trials=2)
    for r in run_trials(spec):
        assert r.scalars["intersection[t=1000000].outside_gk"] == 0


def test_failing_trial_carries_index(monkeypatch):
    import caperc.montecarlo as mc

    def boom(spec, t):
        if t == 2:
            raise RuntimeError("bad")
        return TrialResult(t, {}, {"x": 1.0})

    monkeypatch.setattr(mc, "run_trial", boom)
    spec = TrialSpec(PARAMS, (Metric.max_ca(),), master_seed=0, trials=4)
    with pytest.raises(TrialError) as info:
        mc.run_trials(spec)
    assert info.value.trial_index == 2


def test_spec_validation():
    with pytest.raises(ValueError):
        TrialSpec(PARAMS, (Metric.max_ca(),), 0, 0)
    with pytest.raises(ValueError):
        TrialSpec(PARAMS, (Metric.layer_census(4),), 0, 1)
    with pytest.raises(ValueError):
        Metric.black_threshold(0.0, 1)


class TestAggregate:
    def _results(self, values):
        return [TrialResult(i, {}, {"x": v}, {"h": {1: 1, int(v) % 3 + 1: 2}}) for i, v in enumerate(values)]

    def test_single(self):
        agg = aggregate(self._results([4.0]))
        s = agg["x"]
        assert (s.mean, s.sd, s.sd_defined) == (4.0, 0.0, False)

    def test_one_to_hundred(self):
        s = aggregate(self._results([float(v) for v in range(1, 101)]))["x"]
        assert s.quantiles[50] == 50
        assert s.mean == 50.5
        assert s.quantiles[1] == 1 and s.quantiles[99] == 99
        assert s.sd == pytest.approx(np.std(np.arange(1, 101), ddof=1))

    def test_order_independent(self):
        vals = list(np.random.default_rng(0).random(50) * 1e6)
        res = self._results(vals)
        perm = list(np.random.default_rng(1).permutation(len(res)))
        a, b = aggregate(res), aggregate([res[i] for i in perm])
        assert a.stats == b.stats and a.hists == b.hists

    def test_histograms_pooled(self):
        agg = aggregate(self._results([0.0, 1.0]))
        assert agg.hists["h"] == {1: 3, 2: 2}

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_mismatched_metrics(self):
        with pytest.raises(ValueError):
            aggregate([TrialResult(0, {}, {"x": 1}), TrialResult(1, {}, {"y": 1})])


def test_nearest_rank():
    xs = [10, 20, 30, 40]
    assert [nearest_rank(xs, p) for p in (1, 25, 50, 75, 99)] == [10, 10, 20, 30, 40]
    assert Summary.of([3, 1, 2]).quantiles[50] == 2
