
import numpy as np

from hardybell.inequality import EberhardVariant, clauser_horne_value, eberhard_ratio
from hardybell.lhv import LocalStrategy, all_strategies, strategy_distribution, verify_lhv_bound
from hardybell.qm import JointDistribution, Outcome

P, M, N = Outcome.Plus, Outcome.Minus, Outcome.NoClick


def test_counts():
    assert len(all_strategies()) == 81
    assert len(all_strategies(allow_noclick=False)) == 16


def test_deterministic_distribution():
    d = strategy_distribution(LocalStrategy((P, M), (P, M)))
    assert d.p("a+", "a+") == 1 and d.p("a+", "b-") == 1 and d.p("b-", "a+") == 1
    assert d.p("b-", "b-") == 1 and d.p("b+", "b+") == 0
    assert np.all(d.pair_totals() == 1)


def test_all_noclick():
    d = strategy_distribution(LocalStrategy((N, N), (N, N)))
    assert np.all(d.table[:, :, :2, :] == 0) and np.all(d.table[:, :, :, :2] == 0)


def test_mixed_noclick_strategy():
    d = strategy_distribution(LocalStrategy((P, N), (P, P)))
    assert d.p("a+", "a+") == 1 and d.p("b0", "b+") == 1 and d.p("b0", "a+") == 1


def test_certificate():
    cert = verify_lhv_bound()
    assert cert.strategies_checked == 81
    assert cert.max_ch_value == 0
    assert cert.max_eberhard_excess == 0
    assert cert.holds
    d = strategy_distribution(cert.argmax_strategy)
    assert clauser_horne_value(d) == 0
    assert "81 strategies, max CH value 0" in cert.report()


def test_restricted_certificate():
    cert = verify_lhv_bound(allow_noclick=False)
    assert cert.strategies_checked == 16 and cert.max_ch_value == 0 and cert.holds


def test_every_vertex_exact():
    for s in all_strategies():
        d = strategy_distribution(s)
        assert clauser_horne_value(d) <= 0
        r = eberhard_ratio(d)
        assert r.numerator <= r.denominator


def test_all_variants_bounded_at_vertices():
    for s in all_strategies():
        d = strategy_distribution(s)
        for v in EberhardVariant:
            r = eberhard_ratio(d, v)
            assert r.numerator <= r.denominator


def test_random_mixtures():
    rng = np.random.default_rng(99)
    tables = np.array([strategy_distribution(s).table for s in all_strategies()])
    for _ in range(100):
        w = rng.dirichlet(np.full(len(tables), 0.3))
        d = JointDistribution(np.tensordot(w, tables, axes=1))
        assert clauser_horne_value(d) <= 1e-12
        r = eberhard_ratio(d)
        assert r.numerator - r.denominator <= 1e-12
        if r.denominator > 0:
            assert r.ratio <= 1 + 1e-12
