import math

import numpy as np
import pytest

from _oracles import bisect_root, closed_ratio, dense_argmax, noisy_case1, shape_factor
from hardybell.analysis import (
    HARDY_FRACTION,
    Method,
    NoBracketError,
    NotUnimodalError,
    PbMax,
    default_alpha_grid,
    default_eta_grid,
    figure1_curves,
    noise_curve,
    optimize_alpha,
    solve_threshold_bisection,
    threshold_case1,
    threshold_case2,
    threshold_case3,
    violation_curve,
)
from hardybell.hardy import ALPHA_H, build_hardy_state
from hardybell.inequality import eberhard_ratio, h_qm_closed_form, h_qm_noisy_case3, pb_max
from hardybell.qm import BasisParams, EfficiencySet, detected_joint_distribution

ALPHAS20 = np.linspace(0.05, 1.0, 20)


class TestThresholds:
    def test_case1_values(self):
        assert threshold_case1(1.0).critical_value == pytest.approx(2 / 3, abs=1e-15)
        r = threshold_case1(0.618034)
        assert r.critical_value == pytest.approx(0.839643, abs=1e-6)
        assert r.critical_value == pytest.approx(4 / (7 - math.sqrt(5)), abs=1e-6)
        # 2/(2 + 0.99^2), confirmed by plain bisection on the re-typed ratio
        r = threshold_case1(0.99)
        oracle = bisect_root(lambda e: closed_ratio(0.99, e, e, e, e) - 1, 1e-9, 1 - 1e-12)
        assert r.critical_value == pytest.approx(oracle, abs=1e-10)
        assert r.critical_value == pytest.approx(0.671118, abs=1e-6)
        assert r.method is Method.ClosedForm and r.feasible

    def test_case2_values(self):
        assert threshold_case2(1.0, 1.0).critical_value == pytest.approx(0.5, abs=1e-15)
        assert threshold_case2(0.618034, 1.0).critical_value == pytest.approx(0.723607, abs=1e-6)
        r = threshold_case2(0.618034, 0.42)
        assert not r.feasible and r.critical_value > 1 and r.bisection_value is None

    def test_case2_no_crossing(self):
        r = threshold_case2(0.5, 0.3)
        assert not r.feasible

    def test_case3_values(self):
        assert threshold_case3(0.9, 0.9).critical_value == pytest.approx(0.2469, abs=1e-4)
        assert threshold_case3(0.618034, 0.9).critical_value == pytest.approx(0.5236, abs=1e-4)
        for a in np.linspace(0.02, 1, 50):
            assert threshold_case3(a, 1.0).critical_value == 0.0

    def test_closed_vs_bisection_grid(self):
        etas = np.linspace(0.05, 1.0, 20)
        for a in ALPHAS20:
            r = threshold_case1(a)
            assert abs(r.critical_value - r.bisection_value) < 1e-9
            for e in etas:
                for r in (threshold_case2(a, e), threshold_case3(a, e)):
                    if r.bisection_value is not None:
                        assert abs(r.critical_value - r.bisection_value) < 1e-9

    def test_monotone_in_alpha(self):
        alphas = np.linspace(0.05, 1.0, 60)
        for fn, arg in ((threshold_case1, ()), (threshold_case2, (0.8,)), (threshold_case3, (0.85,))):
            vals = [fn(a, *arg).critical_value for a in alphas]
            assert all(x >= y for x, y in zip(vals, vals[1:]))

    def test_case1_threshold_means_violation(self):
        for a in np.linspace(0.05, 0.95, 19):
            thr = threshold_case1(a).critical_value
            h = build_hardy_state(BasisParams(a))
            for e in default_eta_grid():
                if e > thr + 1e-12:
                    d = detected_joint_distribution(h.state, h.params, EfficiencySet.uniform(e))
                    assert eberhard_ratio(d).violated

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            threshold_case1(0.0)


class TestBisection:
    def test_case1_bracket(self):
        root = solve_threshold_bisection(lambda e: h_qm_closed_form(ALPHA_H, EfficiencySet.uniform(e)), 0.5, 1.0, 1e-10)
        assert root == pytest.approx(0.839643, abs=1e-6)
        assert root == pytest.approx(2 / (2 + ALPHA_H**2), abs=1e-10)

    def test_one_percent_background(self):
        root = solve_threshold_bisection(lambda e: h_qm_noisy_case3(ALPHA_H, e, 1.0, 0.01), 0.0, 1.0)
        assert root == pytest.approx(0.3347, abs=1e-4)
        # independent: solve f a^2 e^2 = 0.01/0.99 directly
        assert root == pytest.approx(math.sqrt((0.01 / 0.99) / (shape_factor(ALPHA_H) * ALPHA_H**2)), abs=1e-9)

    def test_constant_objective(self):
        with pytest.raises(NoBracketError):
            solve_threshold_bisection(lambda x: 0.5, 0.0, 1.0)

    def test_evaluation_budget(self):
        calls = []

        def f(x):
            calls.append(x)
            return 3 * x

        root = solve_threshold_bisection(f, 0.0, 1.0, 1e-6)
        assert root == pytest.approx(1 / 3, abs=1e-6)
        interior = len(calls) - 2
        assert interior <= math.ceil(math.log2(1.0 / 1e-6))

    def test_decreasing_objective(self):
        assert solve_threshold_bisection(lambda x: 2 - 3 * x, 0, 1) == pytest.approx(1 / 3, abs=1e-10)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            solve_threshold_bisection(lambda x: x, 0, 2, 0.0)


class TestOptimizeAlpha:
    def test_hardy_fraction(self):
        a, v = optimize_alpha(HARDY_FRACTION)
        assert a == pytest.approx(0.6180340, abs=1e-6)
        assert a == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), abs=1e-8)
        assert v == pytest.approx((5 * math.sqrt(5) - 11) / 2, abs=1e-8)

    def test_pbmax_perfect(self):
        a, v = optimize_alpha(PbMax(1.0, 1.0))
        assert a == pytest.approx(0.6180340, abs=1e-6)
        assert v == pytest.approx(0.0827118, abs=1e-7)

    def test_pbmax_imperfect_prefers_larger_alpha(self):
        a, v = optimize_alpha(PbMax(0.9, 0.9))
        assert a > 0.618034
        assert a == pytest.approx(dense_argmax(lambda x: pb_max(x, 0.9, 0.9), lo=0.3), abs=1e-6)

    def test_unknown_objective(self):
        with pytest.raises(ValueError):
            optimize_alpha("nope")

    def test_not_unimodal(self, monkeypatch):
        import hardybell.analysis as an

        monkeypatch.setattr(an, "hardy_fraction", lambda a: math.sin(12 * a))
        with pytest.raises(NotUnimodalError) as exc:
            an.optimize_alpha(HARDY_FRACTION)
        assert exc.value.grid.size == exc.value.values.size


class TestCurves:
    def test_default_grids(self):
        g = default_eta_grid()
        assert g[0] == 0.0 and g[-1] == 1.0 and g.size == 201
        a = default_alpha_grid()
        assert a[0] == 0.005 and a[-1] == 0.995 and a.size == 199

    def test_figure1_thresholds(self):
        grid = default_eta_grid()
        for alpha, crit in ((0.99, 2 / (2 + 0.99**2)), (ALPHA_H, 4 / (7 - math.sqrt(5)))):
            pts = noise_curve(True, alpha, grid)
            first = next(p.x for p in pts if p.y > 0)
            assert first > crit and first - crit <= 0.005
            assert all(p.y == 0 for p in pts if p.x <= crit)

    def test_eta_b_one_positive(self):
        for alpha in (0.99, ALPHA_H):
            for p in noise_curve(False, alpha, default_eta_grid()):
                assert (p.y > 0) == (p.x > 0)

    def test_nondecreasing(self):
        pts = figure1_curves()
        series = {}
        for p in pts:
            series.setdefault(p.series_label, []).append(p.y)
        assert len(series) == 4
        for ys in series.values():
            assert all(b >= a for a, b in zip(ys, ys[1:]))

    def test_endpoint(self):
        pts = {(p.series_label, p.x): p.y for p in figure1_curves()}
        assert pts[("eta_b=1,alpha=0.618034", 1.0)] == pytest.approx(0.082712, abs=1e-6)

    def test_grid_range_checked(self):
        with pytest.raises(ValueError):
            noise_curve(True, 0.5, [1.2])

    def test_violation_values(self):
        pts = violation_curve(0.9, [0.0], [0.618034, ALPHA_H, 0.9999])
        assert pts[0].y == pytest.approx(1.719, abs=1e-3)
        assert pts[1].y == pytest.approx(ALPHA_H**2 * 0.9 / 0.2, abs=1e-12)
        # alpha -> 1 limit is alpha^2 eta / (2(1 - eta)) = 4.5
        assert pts[2].y == pytest.approx(4.5, abs=1e-3)

    def test_pure_background(self):
        for p in violation_curve(0.9, [1.0], [0.1, 0.5, 0.9]):
            assert p.y == pytest.approx(0.2, abs=1e-12)

    def test_violation_matches_noisy_oracle(self):
        for p in violation_curve(0.9, [0.0, 0.01, 0.05], default_alpha_grid()[::7]):
            pb = float(p.series_label.split("=")[1])
            want = noisy_case1(p.x, 0.9, pb)
            assert abs(p.y - want) < 1e-10
            assert (p.y > 1) == (want > 1)
