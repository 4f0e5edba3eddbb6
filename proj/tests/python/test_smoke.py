import numpy as np
import pytest

import _l1stream as l1


def test_signal_generation():
    x = l1.gen_signal("LinChirp", 1024, 256)
    assert x.shape == (1280,)
    assert np.all(x[:256] == 0.0)
    assert np.max(np.abs(x[256:])) > 0.1
    with pytest.raises(Exception):
        l1.gen_signal("nope", 1024, 256)


def test_wavelet_round_trip():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(256)
    a = l1.dwt(x)
    assert np.linalg.norm(l1.idwt(a) - x) < 1e-10
    assert abs(np.dot(a, a) - np.dot(x, x)) < 1e-10 * np.dot(x, x)


def test_dct_round_trip():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(128)
    assert np.linalg.norm(l1.idct(l1.dct(x)) - x) < 1e-10


def test_ser():
    x = np.array([1.0, 2.0, 3.0])
    assert l1.ser_db(x, x) == 300.0
    assert abs(l1.ser_db(x, np.zeros(3))) < 1e-12


def test_sparse_recovery():
    rng = np.random.default_rng(2)
    m, n, k = 40, 100, 5
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    x0 = np.zeros(n)
    x0[rng.choice(n, k, replace=False)] = rng.standard_normal(k)
    y = A @ x0 + 1e-3 * rng.standard_normal(m)
    w = np.full(n, 0.01 * np.max(np.abs(A.T @ y)))

    x, steps, kkt = l1.solve_weighted_l1(A, y, w)
    assert steps > 0
    assert kkt <= 1e-6
    assert l1.ser_db(x0, x) > 20.0

    # warm start at the solution ends immediately
    x2, steps2, _ = l1.solve_weighted_l1(A, y, w, x)
    assert steps2 == 0
    assert np.linalg.norm(x2 - x) < 1e-10

    # first-order reference solver agrees
    xp, iters = l1.solve_weighted_l1_prox(A, y, w)
    assert iters > 0
    assert np.linalg.norm(xp - x) / np.linalg.norm(x) < 1e-4
