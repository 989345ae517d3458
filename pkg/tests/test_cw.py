import math
import random
from array import array

import numpy as np
import pytest

from nbestgec.cw import (
    THRESHOLD_GRID,
    CWModel,
    CWTrainConfig,
    accuracy,
    classify,
    confidence_quantile,
    cw_train,
    cw_update,
    parse_model,
    score,
    serialize_model,
    tune_threshold,
)
from nbestgec.features import SparseVector

from oracles import cw_dense

PHI = 1.2815515655446004


def sv(pairs):
    return SparseVector(array("i", [i for i, _ in pairs]), array("d", [v for _, v in pairs]))


def test_phi():
    assert math.isclose(confidence_quantile(0.9), PHI, abs_tol=1e-8)
    with pytest.raises(ValueError):
        confidence_quantile(0.5)


def test_worked_update():
    m = CWModel(1)
    step = m.update(sv([(0, 1.0)]), +1)
    assert math.isclose(step, 0.5384, abs_tol=1e-3)
    assert math.isclose(m.mu[0], 0.5384, abs_tol=1e-3)
    assert math.isclose(m.sigma[0], 0.4202, abs_tol=1e-3)
    assert math.isclose(score(m, sv([(0, 1.0)])), m.mu[0])


def test_zero_vector_is_a_no_op():
    m = CWModel(3)
    assert m.update(sv([]), 1) == 0.0
    assert m.update(sv([(1, 0.0)]), 1) == 0.0
    assert not m.mu.any() and (m.sigma == 1.0).all()
    assert score(m, sv([])) == 0.0


def test_satisfied_margin_is_a_no_op():
    m = CWModel(1)
    m.mu[0] = 5.0
    before = m.sigma.copy()
    assert m.update(sv([(0, 1.0)]), 1) == 0.0
    assert m.mu[0] == 5.0 and (m.sigma == before).all()


def test_random_updates_against_dense_oracle():
    rng = random.Random(0)
    checked = 0
    for stream in range(40):
        dim = rng.randint(1, 12)
        m = CWModel(dim)
        for _ in range(30):
            k = rng.randint(1, dim)
            idx = sorted(rng.sample(range(dim), k))
            x = sv([(i, rng.uniform(-2, 2)) for i in idx])
            y = rng.choice((-1, 1))
            mu0, sig0 = m.mu.copy(), m.sigma.copy()
            step = m.update(x, y)
            dense = np.zeros(dim)
            dense[list(x.indices)] = list(x.values)
            mu1, sig1, alpha = cw_dense(mu0, sig0, dense, y, PHI)
            assert math.isclose(step, alpha, rel_tol=1e-9, abs_tol=1e-12)
            assert np.allclose(m.mu, mu1, rtol=1e-9, atol=1e-12)
            assert np.allclose(m.sigma, sig1, rtol=1e-9, atol=1e-12)
            if step > 0:
                margin = y * float(m.mu @ dense)
                assert abs(margin - PHI * float(m.sigma @ dense ** 2)) <= 1e-6
            assert (m.sigma > 0).all()
            untouched = np.setdiff1d(np.arange(dim), np.asarray(x.indices))
            assert (m.mu[untouched] == mu0[untouched]).all()
            assert (m.sigma[untouched] == sig0[untouched]).all()
            assert (m.sigma <= sig0).all()
            checked += 1
    assert checked >= 1000


def test_score_is_linear():
    m = CWModel(2)
    m.mu[:] = [0.3, -1.2]
    x = sv([(0, 1.0), (1, 0.5)])
    x2 = sv([(0, 2.0), (1, 1.0)])
    assert math.isclose(score(m, x2), 2 * score(m, x))


@pytest.mark.parametrize("s, tau, expected", [(0.2, 0.0, True), (-0.01, -0.02, True), (0.3, 0.3, True), (-0.1, 0.0, False)])
def test_classify(s, tau, expected):
    m = CWModel(1, tau=tau)
    m.mu[0] = s
    assert classify(m, sv([(0, 1.0)])) is expected


def test_classify_is_monotone_in_tau():
    m = CWModel(1)
    m.mu[0] = 0.1
    x = sv([(0, 1.0)])
    decisions = []
    for tau in THRESHOLD_GRID:
        m.tau = tau
        decisions.append(classify(m, x))
    assert decisions == sorted(decisions, reverse=True)


def separable(seed=0, count=60):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        a, b = rng.uniform(-1, 1), rng.uniform(-1, 1)
        if abs(a - b) < 0.1:
            continue
        out.append((sv([(0, a), (1, b)]), a > b))
    return out


def test_separable_training():
    data = separable()
    m = cw_train(data, 2, CWTrainConfig(epochs=5))
    assert accuracy(m, data) == 1.0
    other = cw_train(data, 2, CWTrainConfig(epochs=5, shuffle_seed=9))
    assert [classify(m, x) for x, _ in data] == [classify(other, x) for x, _ in data]
    assert m.tau == 0.0


def test_repeated_example():
    x = sv([(0, 1.0), (2, -0.5)])
    m = cw_train([(x, False)] * 4, 3)
    assert score(m, x) < 0


def test_accuracy_bounds():
    data = separable(1, 20)
    m = cw_train(data, 2)
    flipped = [(x, not y) for x, y in data]
    assert accuracy(m, flipped) == 0.0
    with pytest.raises(ValueError):
        accuracy(m, [])


def test_training_errors():
    with pytest.raises(ValueError):
        cw_train([], 2)
    with pytest.raises(ValueError):
        CWTrainConfig(epochs=0)
    with pytest.raises(ValueError):
        CWTrainConfig(eta=1.2)


def test_training_is_deterministic():
    data = separable(3)
    a, b = cw_train(data, 2), cw_train(data, 2)
    assert (a.mu == b.mu).all() and (a.sigma == b.sigma).all()


def test_grid():
    assert len(THRESHOLD_GRID) == 101
    assert THRESHOLD_GRID[0] == -0.5 and THRESHOLD_GRID[-1] == 0.5 and THRESHOLD_GRID[50] == 0.0


def test_tune_threshold_visits_grid_and_breaks_ties_low():
    calls = []

    def flat(tau):
        calls.append(tau)
        return 0.5

    assert tune_threshold(flat) == -0.5
    assert len(calls) == 101
    assert tune_threshold(lambda t: -abs(t - 0.13)) == 0.13
    assert tune_threshold(lambda t: 1.0 if t >= 0.2 else 0.0) == 0.2


def test_model_round_trip():
    m = cw_train(separable(), 4, CWTrainConfig(initial_variance=0.5))
    m.tau = 0.07
    back = parse_model(serialize_model(m))
    assert (back.mu == m.mu).all() and (back.sigma == m.sigma).all()
    assert (back.tau, back.eta, back.initial_variance, back.dim) == (m.tau, m.eta, m.initial_variance, m.dim)


def test_model_header_checked():
    with pytest.raises(ValueError):
        parse_model("perceptron 1 2\n")


def test_functional_update_returns_model():
    m = CWModel(1)
    assert cw_update(m, sv([(0, 1.0)]), 1) is m and m.mu[0] > 0
