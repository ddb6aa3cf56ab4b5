import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpimager import CostParams, TimingSample, count_Fk, count_G, count_Map, fit_params, scalability_bound, scalability_bound_analytic
from lpimager.costmodel import iteration_model


@pytest.mark.parametrize("n, m, expected", [(2, 1, 23), (7, 4016, 56298), (5, 1, 62)])
def test_count_Fk(n, m, expected):
    assert count_Fk(n, m) == expected


@pytest.mark.parametrize("n, m, expected", [(2, 1, 40), (3, 2, 2 * (42 + 2 * 2 * 3 + 33 - 3)), (5, 10, 10 * (116 + 152))])
def test_count_Map(n, m, expected):
    assert count_Map(n, m) == expected


@given(st.integers(2, 100), st.integers(1, 10_000))
def test_decomposition(n, m):
    assert count_Map(n, m) == m * (count_G(n) + count_Fk(n, m))


class TestBound:
    def test_zero_latency_limit(self):
        p = CostParams(t_c=1e-300, t_map=8.0, t_a=2.0, m=3)
        assert scalability_bound(p) == pytest.approx(0.5 * math.sqrt(4.0 + 12), rel=1e-12)

    def test_communication_dominated(self):
        assert 0 < scalability_bound(CostParams(t_c=1e6, t_map=1.0, t_a=1.0, m=1)) < 1e-5

    def test_analytic_without_communication(self):
        n, m = 7, 4016
        assert scalability_bound_analytic(n, m, 1e-9, 0.0, 0.0) == pytest.approx(0.5 * math.sqrt(count_Map(n, m) + 4 * m), rel=1e-12)

    @pytest.mark.parametrize("field, factor, increases", [("t_map", 2.0, True), ("m", 4, True), ("t_c", 2.0, False)])
    def test_monotone(self, field, factor, increases):
        base = dict(t_c=1e-5, t_map=1e-2, t_a=1e-8, m=1000)
        bumped = dict(base, **{field: base[field] * factor})
        a, b = scalability_bound(CostParams(**base)), scalability_bound(CostParams(**bumped))
        assert (b > a) is increases

    def test_doubling_n(self):
        ratio = scalability_bound_analytic(128, 128, 1e-9, 0, 0) / scalability_bound_analytic(64, 64, 1e-9, 0, 0)
        assert ratio == pytest.approx(2 * math.sqrt(2), rel=0.02)

    def test_table_order(self):
        bounds = [scalability_bound_analytic(n, m, 1e-9, 1e-9, 1e-8) for n, m in ((5, 4012), (6, 4014), (7, 4016))]
        assert bounds[0] < bounds[1] < bounds[2]

    @pytest.mark.parametrize("kwargs", [{"t_c": 0.0}, {"t_map": -1.0}, {"m": 0}, {"D": 0.0}])
    def test_params_validation(self, kwargs):
        base = dict(t_c=1.0, t_map=1.0, t_a=1.0, m=1)
        with pytest.raises(ValueError):
            CostParams(**dict(base, **kwargs))

    def test_analytic_validation(self):
        with pytest.raises(ValueError):
            scalability_bound_analytic(1, 5, 1e-9, 0, 0)

    def test_from_machine(self):
        p = CostParams.from_machine(5, 10, 1e-9, 2e-9, 3e-8)
        assert p.t_c == pytest.approx(2 * (2e-9 + 3e-8))
        assert p.t_map == pytest.approx(count_Map(5, 10) * 1e-9)
        assert p.t_a == 1e-9


class TestFit:
    def test_recovers_synthetic(self):
        truth = np.array([2e-5, 4e-3, 1e-6])
        m = 4000
        rng = np.random.default_rng(1)
        log = []
        for L in (1, 2, 4, 8, 16, 32, 64):
            t = float(iteration_model(L, m) @ truth)
            log += [TimingSample(L, t * rng.uniform(0.998, 1.002)) for _ in range(9)]
        fit = fit_params(log, m)
        assert fit.t_c == pytest.approx(truth[0], rel=0.05)
        assert fit.t_map == pytest.approx(truth[1], rel=0.05)
        assert fit.t_a == pytest.approx(truth[2], rel=0.05)
        assert fit.bound() == pytest.approx(scalability_bound(CostParams(*truth, m=m)), rel=0.05)
        assert fit.warnings == []

    def test_constant_log_flags_map(self):
        fit = fit_params([(L, 1e-3) for L in (1, 2, 4, 8) for _ in range(3)], 100)
        assert any("t_map" in w for w in fit.warnings)

    def test_needs_three_counts(self):
        with pytest.raises(ValueError, match="3 distinct"):
            fit_params([(1, 1.0), (2, 0.5), (2, 0.6)], 10)

    def test_pairs_accepted(self):
        fit = fit_params([(1, 3.0), (2, 2.0), (4, 1.6)], 10)
        assert fit.m == 10
        assert set(fit.residuals) == {1, 2, 4}
