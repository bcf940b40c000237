import numpy as np
import pytest

from grenzero.families import Uniform
from grenzero.grenander import ecdf, eval_density, fit, sup_relative_error
from grenzero.majorant import argmax_affine


def test_ecdf_basic_and_ties():
    F = ecdf([1.0, 2.0, 4.0])
    np.testing.assert_array_equal(F.knots, [1, 2, 4])
    np.testing.assert_allclose(F.values, [1 / 3, 2 / 3, 1])
    G = ecdf([2.0, 2.0, 4.0])
    np.testing.assert_array_equal(G.knots, [2, 4])
    np.testing.assert_allclose(G.values, [2 / 3, 1])


def test_ecdf_counting_oracle(rng):
    x = np.round(rng.exponential(size=300), 2) + 0.01
    F = ecdf(x)
    for k, v in zip(F.knots, F.values):
        assert v == np.count_nonzero(x <= k) / x.size


@pytest.mark.parametrize("bad", [[], [1.0, 0.0], [1.0, -2.0], [np.inf], [np.nan]])
def test_ecdf_rejects(bad):
    with pytest.raises(ValueError):
        ecdf(bad)


def test_fit_example():
    est = fit([1.0, 2.0, 4.0])
    x = np.array([0.5, 2.0, 2.5, 4.0, 4.5])
    np.testing.assert_allclose(est(x, "left"), [1 / 3, 1 / 3, 1 / 6, 1 / 6, 0.0])
    assert eval_density(est, 2.0, "right") == pytest.approx(1 / 6)
    assert est.at_zero() == pytest.approx(1 / 3)
    assert est.support_max == 4.0


def test_fit_collinear_and_single():
    est = fit([0.25, 0.5, 0.75])
    np.testing.assert_allclose(est([0.1, 0.75], "left"), [4 / 3, 4 / 3])
    assert est(0.8) == 0.0
    one = fit([2.5])
    assert one(1.0) == pytest.approx(0.4)
    assert one(2.5, "left") == pytest.approx(0.4)


def test_beyond_support_is_zero(rng):
    x = rng.exponential(size=50)
    est = fit(x)
    assert est(x.max() * 1.01) == 0.0 and est(x.max() * 1.01, "left") == 0.0


def test_mass_one(rng):
    for _ in range(200):
        est = fit(rng.exponential(size=int(rng.integers(1, 300))))
        assert abs(est.mass() - 1.0) <= 1e-12
        assert np.all(est.levels >= 0) and np.all(np.diff(est.levels) <= 0)


def test_at_zero_identity(rng):
    for _ in range(100):
        x = rng.gamma(0.5, size=int(rng.integers(1, 200)))
        xs = np.sort(x)
        oracle = np.max(np.arange(1, xs.size + 1) / xs.size / xs)
        assert fit(x).at_zero() == pytest.approx(oracle, rel=1e-12)


def test_scale_equivariance(rng):
    for _ in range(20):
        x = rng.exponential(size=80)
        s = rng.uniform(0.1, 10)
        a, b = fit(x), fit(s * x)
        np.testing.assert_allclose(b(s * x), a(x) / s, rtol=1e-10)


def test_left_right_consistency(rng):
    est = fit(rng.exponential(size=100))
    x = np.linspace(1e-3, est.support_max * 1.1, 2000)
    left, right = est(x, "left"), est(x, "right")
    assert np.all(left >= right)
    off = ~np.isin(x, est.breakpoints)
    np.testing.assert_array_equal(left[off], right[off])


def test_switching_consequence_at_zero(rng):
    # f_n(0+) <= y  iff  the leftmost maximizer of F_n(x) - y x is 0
    for _ in range(50):
        x = rng.exponential(size=int(rng.integers(1, 60)))
        est = fit(x)
        F = ecdf(x)
        for y in rng.uniform(0.05, 2.0, 20) * est.at_zero():
            assert (est.at_zero() <= y) == (argmax_affine(F, y, "left") == 0.0)


def test_sup_relative_error_uniform():
    assert sup_relative_error(fit([0.25, 0.5, 0.75]), Uniform(), 0.75) == pytest.approx(1 / 3)


def test_sup_relative_error_self_is_zero(rng):
    est = fit(rng.exponential(size=40))
    inside = 0.5 * est.breakpoints[1]
    assert sup_relative_error(est, lambda t: est(t), inside) == pytest.approx(0.0, abs=1e-15)


def test_sup_relative_error_dense_grid(rng):
    from grenzero.families import BetaType

    fam = BetaType(0.5)
    est = fit(fam.sample(50, rng))
    c = est.breakpoints[3] * 1.3
    t = np.concatenate((np.geomspace(1e-300, c, 200_000), est.breakpoints[1:4]))
    t = t[t <= c]
    brute = np.max(np.abs(est(t) / fam.density(t) - 1))
    exact = sup_relative_error(est, fam, c)
    assert exact >= brute - 1e-12
    # the left limits at the breakpoints are the only points the grid cannot see
    bp = est.breakpoints[1:4]
    bp = bp[bp <= c]
    lim = np.max(np.abs(est(bp, "left") / fam.density(bp) - 1), initial=0.0)
    assert exact == pytest.approx(max(brute, lim), rel=1e-6)


def test_sup_relative_error_rejects_bad_density():
    est = fit([0.5])
    with pytest.raises(ValueError):
        sup_relative_error(est, lambda t: 0.0, 0.3)
    with pytest.raises(ValueError):
        sup_relative_error(est, Uniform(), 0.0)


def test_sup_relative_error_uniform_limit_law():
    # with c_upper = c/n the statistic tends to the law 1 - 1/(x+1)
    n, m, c = 400, 3000, 1.0
    fam = Uniform()
    vals = np.array([
        sup_relative_error(fit(fam.sample(n, np.random.default_rng(s))), fam, c / n) for s in range(m)
    ])
    grid = np.linspace(0, 10, 101)
    emp = np.searchsorted(np.sort(vals), grid, side="right") / m
    assert np.max(np.abs(emp - (1 - 1 / (grid + 1)))) < 0.05
