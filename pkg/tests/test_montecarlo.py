import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from planarlab import models, montecarlo, solvers
from planarlab.montecarlo import ExperimentConfig, ResourceGuardError, empirical_tail, run_experiment


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(model="nope", n=3),
            dict(model="words", n=3),
            dict(model="words", n=3, k=0),
            dict(model="words", k=2),
            dict(model="binomial", n=3, p=1.5),
            dict(model="geometric", n=3, p=1.0),
            dict(model="odb", r=3, s=4, p=0.3),
            dict(model="words", n=3, k=2, trials=0),
            dict(model="words", n=3, k=2, workers=0),
            dict(model="words", n=3, k=2, statistic="height"),
            dict(model="binomial", n=3, p=0.5, split_q=2),
            dict(model="words", n=3, k=2, split_q=4),
            dict(model="words", n=3, k=2, tail_thresholds=[-1]),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)

    def test_defaults(self):
        cfg = ExperimentConfig("odb", n=5, p=0.2)
        assert cfg.statistic == "height" and cfg.r == cfg.s == 5


class TestExactCases:
    def test_words_single_letter(self):
        s = run_experiment(ExperimentConfig("words", n=37, k=1, trials=20, master_seed=1))
        assert s.mean == 37 and s.variance == 0 and s.min == s.max == 37

    def test_binomial_full(self):
        s = run_experiment(ExperimentConfig("binomial", n=25, p=1.0, trials=10))
        assert s.mean == 25 and s.se == 0

    def test_permutation_one(self):
        s = montecarlo.permutation_lis_experiment(1, 50, 3)
        assert s.min == s.max == 1

    def test_permutation_two(self):
        trials = 4000
        s = montecarlo.permutation_lis_experiment(2, trials, 4)
        assert abs(s.mean - 1.5) <= 5 * math.sqrt(0.25 / trials)

    def test_permutation_three_distribution(self):
        # LIS over the 6 permutations of 3: values 1,2,2,2,2,3 -> mean 2
        trials = 6000
        s = montecarlo.permutation_lis_experiment(3, trials, 5)
        var = (1 + 0 + 1) / 6
        assert abs(s.mean - 2.0) <= 5 * math.sqrt(var / trials)


class TestSolverAgreement:
    def test_words_matches_direct_recomputation(self):
        cfg = ExperimentConfig("words", n=60, k=5, trials=15, master_seed=9, retain_trials=True)
        s = run_experiment(cfg)
        direct = [solvers.lcs_length_dp(models.sample_word_pair(60, 60, 5, models.RngStream(9, t))) for t in range(15)]
        assert list(s.values) == direct
        assert s.total == sum(direct)

    def test_dp_and_sparse_agree(self):
        a = run_experiment(ExperimentConfig("words", n=80, k=7, trials=10, solver="dp"))
        b = run_experiment(ExperimentConfig("words", n=80, k=7, trials=10, solver="sparse"))
        assert a.total == b.total and a.total_sq == b.total_sq


class TestTail:
    def test_all_at_center(self):
        rows = empirical_tail([5, 5, 5], 5.0, [0.5, 1, 2])
        assert [r.frequency for r in rows] == [0, 0, 0]

    def test_zero_threshold(self):
        assert empirical_tail([1, 7, 3], 2.5, [0.0])[0].frequency == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_tail([], 0, [1])

    @given(st.lists(st.integers(0, 100), min_size=1, max_size=50), st.floats(0, 100),
           st.lists(st.floats(0, 100), min_size=1, max_size=10))
    def test_nonincreasing(self, values, center, thresholds):
        ths = sorted(thresholds)
        rows = empirical_tail(values, center, ths)
        freqs = [r.frequency for r in rows]
        assert all(0 <= f <= 1 for f in freqs)
        assert all(x >= y for x, y in zip(freqs, freqs[1:]))
        for r in rows:
            assert r.count == sum(abs(v - center) >= r.threshold for v in values)


@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=60))
def test_summary_stats_consistent(values):
    st_ = montecarlo.summary_stats(values)
    assert st_["min"] <= st_["mean"] <= st_["max"]
    assert st_["median"] == pytest.approx(float(np.median(values)))
    if len(values) > 1:
        exact = Fraction(sum(Fraction(v) ** 2 for v in values) - Fraction(sum(values)) ** 2 / len(values), len(values) - 1)
        assert st_["variance"] == pytest.approx(float(exact), rel=1e-12, abs=1e-12)
    else:
        assert st_["variance"] == 0
    assert st_["variance"] >= 0


def test_summary_fields_and_normalization():
    cfg = ExperimentConfig("words", n=400, k=16, trials=30, master_seed=2, tail_thresholds=(0.05, 0.1))
    s = run_experiment(cfg)
    assert s.center == pytest.approx(2 * 400 / 4)
    assert s.normalized == pytest.approx(s.mean * 4 / (2 * 400))
    assert len(s.tails) == 2 and s.tails[0].threshold == pytest.approx(0.05 * s.center)
    d = s.to_dict(timestamp=False)
    assert "timestamp" not in d and d["tails"][1]["relative"] == 0.1
    assert "timestamp" in s.to_dict()


def test_binomial_normalization():
    s = run_experiment(ExperimentConfig("binomial", n=256, p=1 / 64, trials=5))
    assert s.normalized == pytest.approx(s.mean / (2 * 256 / 8))


def test_worker_count_does_not_change_results():
    cfg1 = ExperimentConfig("words", n=300, k=9, trials=17, master_seed=11, workers=1, tail_thresholds=(0.1,))
    cfg3 = ExperimentConfig("words", n=300, k=9, trials=17, master_seed=11, workers=3, tail_thresholds=(0.1,))
    a = run_experiment(cfg1).to_dict(timestamp=False)
    b = run_experiment(cfg3).to_dict(timestamp=False)
    a["config"].pop("workers")
    b["config"].pop("workers")
    assert montecarlo.dumps(a) == montecarlo.dumps(b)


def test_jsonl_records():
    s = run_experiment(ExperimentConfig("permutation", n=10, trials=4, retain_trials=True))
    lines = montecarlo.trial_records_jsonl(s).splitlines()
    assert [json.loads(x)["trial"] for x in lines] == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        montecarlo.trial_records_jsonl(run_experiment(ExperimentConfig("permutation", n=10, trials=2)))


def test_dumps_rounds_to_twelve_digits():
    assert json.loads(montecarlo.dumps({"x": 1 / 3, "n": 10**15}))["x"] == 0.333333333333
    assert json.loads(montecarlo.dumps({"n": 10**15}))["n"] == 10**15


class TestResourceGuard:
    def test_dp_guard(self):
        cfg = ExperimentConfig("words", n=20_000, k=4, trials=1, solver="dp")
        with pytest.raises(ResourceGuardError):
            run_experiment(cfg)

    def test_custom_limit(self):
        with pytest.raises(ResourceGuardError):
            run_experiment(ExperimentConfig("odb", n=100, p=0.3, trials=1, cell_limit=1000))


class TestSplit:
    def test_q_one_equality(self):
        r = montecarlo.split_experiment(200, 6, 1, 10, 3)
        assert r.min_gap == 0 and r.mean_L == r.mean_block_sum

    def test_single_letter(self):
        r = montecarlo.split_experiment(50, 1, 7, 3, 3)
        assert r.mean_L == 50 and r.mean_block_sum == 7 * (50 // 7)

    def test_pathwise(self):
        r = montecarlo.split_experiment(512, 16, 4, 20, 5)
        assert r.violations == 0 and r.min_gap >= 0

    def test_rejects(self):
        with pytest.raises(ValueError):
            montecarlo.split_experiment(4, 2, 5, 1, 0)


def test_coupling():
    r = montecarlo.coupling_experiment(60, 0.5, 10, 1)
    assert r.violations == 0 and r.mean_cardinality <= r.mean_weight
    assert r.johansson_limit == pytest.approx(5.828427124746190)
    near_one = montecarlo.coupling_experiment(20, 0.999999, 3, 1)
    assert near_one.mean_weight == 0


def test_odb_dominance():
    r = montecarlo.odb_dominance_experiment(60, 0.3, 10, 2)
    assert r.violations == 0 and r.mean_height >= r.mean_strict


class TestProfile:
    def test_single_point(self):
        assert montecarlo.subadditive_profile(4, [100], 5, 0).monotone

    def test_k_one_constant(self):
        prof = montecarlo.subadditive_profile(1, [10, 20, 40], 3, 0)
        assert [row.per_n for row in prof.rows] == [1.0, 1.0, 1.0]

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            montecarlo.subadditive_profile(4, [20, 10], 2, 0)


def test_monotone_within():
    assert montecarlo.monotone_within([1.0, 0.99], [0.01, 0.01]) == [True]
    assert montecarlo.monotone_within([1.0, 0.9], [0.01, 0.01]) == [False]
