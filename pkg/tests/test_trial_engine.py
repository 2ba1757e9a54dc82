import math

import numpy as np
import pytest

from hctrial import (
    DesignConfig,
    OutcomeModel,
    PriorSpec,
    Scenario,
    SimilarityConfig,
    run_campaign,
    simulate_comparator,
    simulate_trial,
)
from hctrial.trial_engine import _replicate_stream, _run_replicate


def make_scenario(theta_c=0.0, theta_t=0.4, t=0.3, gamma=0.3, lam=1.0,
                  variant="design1", reps=20, seed=31, kind="continuous",
                  hist=None, n=200):
    model = OutcomeModel(kind)
    if hist is None:
        hist = (PriorSpec.normal(0.0, 70.0 ** -0.5) if kind == "continuous"
                else PriorSpec.beta(0.3, 65.0))
    treat = (PriorSpec.normal(0.0, 1.0) if kind == "continuous"
             else PriorSpec.beta(0.5, 1.0))
    design = DesignConfig(variant=variant, n_total=n, allocation_ratio=1.0, t=t,
                          lam=lam, eta=0.975, similarity=SimilarityConfig(gamma=gamma))
    return Scenario(model=model, theta_control=theta_c, theta_treatment=theta_t,
                    historical_prior=hist, treatment_prior=treat, design=design,
                    replications=reps, seed=seed)


class TestDeterminism:
    def test_same_stream_same_result(self):
        sc = make_scenario()
        a = simulate_trial(sc, np.random.default_rng(1234))
        b = simulate_trial(sc, np.random.default_rng(1234))
        assert a == b

    def test_comparator_deterministic(self):
        sc = make_scenario()
        a = simulate_comparator(sc, np.random.default_rng(99))
        b = simulate_comparator(sc, np.random.default_rng(99))
        assert a == b

    def test_binary_trial_deterministic(self):
        sc = make_scenario(theta_c=0.3, theta_t=0.5, kind="binary", n=180)
        a = simulate_trial(sc, np.random.default_rng(5))
        b = simulate_trial(sc, np.random.default_rng(5))
        assert a == b

    def test_campaign_matches_manual_replicates(self):
        sc = make_scenario(reps=8)
        ocs = run_campaign([sc], paired_comparator=False)
        manual = [simulate_trial(sc, _replicate_stream(sc.seed, 0, r)).n_saved
                  for r in range(8)]
        assert ocs[0].mean_saved == pytest.approx(float(np.mean(manual)))

    def test_worker_count_invariance(self):
        sc = make_scenario(reps=12)
        a = run_campaign([sc], paired_comparator=True, workers=1)
        b = run_campaign([sc], paired_comparator=True, workers=2)
        assert a == b


class TestBookkeeping:
    def test_design1_total_is_n_minus_saved(self):
        sc = make_scenario(reps=30)
        for r in range(30):
            res = simulate_trial(sc, _replicate_stream(sc.seed, 0, r))
            (n1c, n1t), (n2c, n2t) = res.arm_sizes
            assert n1c + n1t + n2c + n2t == sc.design.n_total - res.n_saved

    def test_design2_total_is_n(self):
        sc = make_scenario(variant="design2", lam=2.0, reps=30)
        for r in range(30):
            res = simulate_trial(sc, _replicate_stream(sc.seed, 0, r))
            (n1c, n1t), (n2c, n2t) = res.arm_sizes
            assert n1c + n1t + n2c + n2t == sc.design.n_total

    def test_interval_contains_point(self):
        sc = make_scenario(reps=10)
        for r in range(10):
            res = simulate_trial(sc, _replicate_stream(sc.seed, 0, r))
            lo, hi = res.delta_interval
            assert lo <= res.delta_point <= hi

    def test_comparator_arm_sizes(self):
        sc = make_scenario()
        res = simulate_comparator(sc, np.random.default_rng(0))
        assert res.arm_sizes == ((100, 100), (0, 0))
        assert res.n_saved == 0 and res.xi == 0.0


class TestBorrowingDisabled:
    def test_zero_gamma_equals_comparator_analysis(self):
        # with borrowing disabled and a zero-mean historical prior, the
        # adaptive trial runs the comparator's analysis on the same draws
        sc = make_scenario(theta_c=0.15, theta_t=0.55, gamma=0.0)
        for r in range(10):
            rng = _replicate_stream(sc.seed, 0, r)
            resp, a_design, a_comp = rng.spawn(3)
            from hctrial.trial_engine import _response_pools, _run_adaptive, _run_comparator

            pools = _response_pools(sc, resp)
            adaptive = _run_adaptive(sc, pools, a_design)
            comp = _run_comparator(sc, pools, a_comp)
            assert adaptive.xi == 0.0
            assert adaptive.n_saved == 0
            assert adaptive.arm_sizes[0] == (30, 30)
            assert adaptive.posterior_prob == pytest.approx(comp.posterior_prob, abs=1e-9)
            assert adaptive.success == comp.success
            assert adaptive.delta_point == pytest.approx(comp.delta_point, abs=1e-9)


class TestAggregation:
    def test_paired_fields_populated(self):
        sc = make_scenario(reps=40)
        oc = run_campaign([sc], paired_comparator=True)[0]
        assert oc.comparator_rejection_rate is not None
        assert oc.rejection_rate_diff == pytest.approx(
            oc.rejection_rate - oc.comparator_rejection_rate
        )
        assert 0.0 <= oc.rejection_rate <= 1.0
        assert oc.rejection_rate_se <= 0.5 / math.sqrt(40)

    def test_unpaired_fields_none(self):
        sc = make_scenario(reps=10)
        oc = run_campaign([sc], paired_comparator=False)[0]
        assert oc.comparator_rejection_rate is None
        assert oc.rejection_rate_diff is None

    def test_empty_scenario_list_rejected(self):
        with pytest.raises(ValueError):
            run_campaign([], paired_comparator=False)

    def test_binary_campaign_smoke(self):
        sc = make_scenario(theta_c=0.3, theta_t=0.5, kind="binary", n=180, reps=8)
        oc = run_campaign([sc], paired_comparator=True)[0]
        assert oc.replications == 8
        assert oc.mean_ci_length > 0


class TestScenarioValidation:
    def test_binary_theta_bounds(self):
        with pytest.raises(ValueError, match="theta_control"):
            make_scenario(theta_c=1.2, theta_t=0.5, kind="binary", n=180)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError, match="seed"):
            make_scenario(seed=-1)
