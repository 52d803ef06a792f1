import numpy as np
import pytest

from mosumseg import (Dataset, RefinementWindow, make_refinement_window,
                      objective_q, refine_location)

from oracles import naive_q


def test_q_constant_when_plug_ins_equal():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.standard_normal(30), rng.standard_normal((30, 2)))
    gamma = np.array([0.3, -1.1])
    vals = [objective_q(ds, k, 4, 26, gamma, gamma) for k in range(5, 27)]
    assert max(vals) - min(vals) <= 1e-10 * (1 + max(vals))
    resid = ds.y[4:26] - ds.X[4:26] @ gamma
    assert vals[0] == pytest.approx(float(resid @ resid))


def test_q_zero_for_zero_data():
    ds = Dataset(np.zeros(10), np.ones((10, 1)))
    for k in range(1, 11):
        assert objective_q(ds, k, 0, 10, np.zeros(1), np.zeros(1)) == 0.0


def test_q_hand_values_on_step_data():
    # y = (0,0,0,1,1,1), x = 1: Q(3) = 0, Q(2) = 1, Q(4) = 1
    ds = Dataset(np.array([0.0, 0, 0, 1, 1, 1]), np.ones((6, 1)))
    gl, gr = np.array([0.0]), np.array([1.0])
    assert objective_q(ds, 3, 0, 6, gl, gr) == 0.0
    assert objective_q(ds, 2, 0, 6, gl, gr) == 1.0
    assert objective_q(ds, 4, 0, 6, gl, gr) == 1.0


def test_q_index_validation():
    ds = Dataset(np.zeros(10), np.ones((10, 1)))
    g = np.zeros(1)
    with pytest.raises(ValueError):
        objective_q(ds, 0, 0, 10, g, g)
    with pytest.raises(ValueError):
        objective_q(ds, 5, 6, 10, g, g)
    with pytest.raises(ValueError):
        objective_q(ds, 11, 0, 11, g, g)


def test_incremental_profile_equals_direct_double_sum():
    rng = np.random.default_rng(1)
    ds = Dataset(rng.standard_normal(60), rng.standard_normal((60, 3)))
    gl = rng.standard_normal(3)
    gr = rng.standard_normal(3)
    a, b = 7, 52
    for k in range(a + 1, b + 1):
        direct = naive_q(ds, k, a, b, gl, gr)
        incremental = objective_q(ds, k, a, b, gl, gr)
        assert incremental == pytest.approx(direct, rel=1e-9)


def test_refine_recovers_break_with_exact_plug_ins():
    ds = Dataset(np.array([0.0, 0, 0, 1, 1, 1]), np.ones((6, 1)))
    window = RefinementWindow(location=3, bandwidth=3, a=0, b=6,
                              beta_left=np.array([0.0]), beta_right=np.array([1.0]))
    res = refine_location(ds, window)
    assert res.location == 3 and not res.fell_back


def test_refine_tie_breaks_toward_pre_estimate():
    # equal plug-ins make Q constant: the tie-break returns the pre-estimate
    rng = np.random.default_rng(2)
    ds = Dataset(rng.standard_normal(40), rng.standard_normal((40, 2)))
    g = rng.standard_normal(2)
    window = RefinementWindow(location=17, bandwidth=10, a=7, b=27,
                              beta_left=g, beta_right=g.copy())
    res = refine_location(ds, window)
    assert res.location == 17


def test_refine_output_within_window_bounds():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(30, 80))
        G = int(rng.integers(5, n // 2))
        k0 = int(rng.integers(1, n))
        ds = Dataset(rng.standard_normal(n), rng.standard_normal((n, 2)))
        window = RefinementWindow(location=k0, bandwidth=G,
                                  a=max(k0 - G, 0), b=min(k0 + G, n),
                                  beta_left=rng.standard_normal(2),
                                  beta_right=rng.standard_normal(2))
        res = refine_location(ds, window)
        assert max(k0 - G + 1, 1) <= res.location <= min(k0 + G, n - 1)


def test_refine_exact_on_noiseless_single_change():
    rng = np.random.default_rng(4)
    n, G, theta = 120, 25, 57
    X = rng.standard_normal((n, 3))
    b0 = np.array([1.0, 0.0, -1.0])
    b1 = np.array([-1.0, 0.5, 0.0])
    y = np.where(np.arange(n) < theta, X @ b0, X @ b1)
    ds = Dataset(y, X)
    for pre in (theta - 7, theta, theta + 9):
        window = RefinementWindow(location=pre, bandwidth=G,
                                  a=max(pre - G, 0), b=min(pre + G, n),
                                  beta_left=b0, beta_right=b1)
        assert refine_location(ds, window).location == theta


def test_make_window_plug_in_placement():
    rng = np.random.default_rng(5)
    n, G, theta = 200, 30, 95
    X = rng.standard_normal((n, 2))
    b0, b1 = np.array([2.0, 0.0]), np.array([0.0, 2.0])
    y = np.where(np.arange(n) < theta, X @ b0, X @ b1)
    ds = Dataset(y, X)
    window = make_refinement_window(ds, theta + 4, G, lam=0.0)
    assert not window.plug_in_collapsed
    # plug-in windows sit entirely inside single regimes here, so the
    # noiseless fits recover the true coefficients and refinement is exact
    np.testing.assert_allclose(window.beta_left, b0, atol=1e-7)
    np.testing.assert_allclose(window.beta_right, b1, atol=1e-7)
    assert refine_location(ds, window).location == theta


def test_collapsed_plug_in_falls_back():
    rng = np.random.default_rng(6)
    ds = Dataset(rng.standard_normal(40), rng.standard_normal((40, 2)))
    window = make_refinement_window(ds, 2, 20, lam=0.1)
    assert window.plug_in_collapsed
    res = refine_location(ds, window)
    assert res.fell_back and res.location == 2
