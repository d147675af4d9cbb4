import random

import pytest

from quadwa import _kernels_py
from quadwa.kernels import BACKEND, box_search, fits_int64

compiled = pytest.importorskip("quadwa._kernels")


def random_gram(rng, k, bound):
    G = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            G[i][j] = G[j][i] = rng.randint(-bound, bound)
    return G


def test_backends_agree():
    rng = random.Random(0)
    for _ in range(300):
        k = rng.randint(1, 5)
        G = random_gram(rng, k, 30)
        H = rng.choice((1, 2, 3))
        assert compiled.box_search(G, H) == _kernels_py.box_search(G, H)


def test_witness_is_isotropic_and_canonical():
    rng = random.Random(1)
    for _ in range(100):
        G = random_gram(rng, 4, 9)
        x = box_search(G, 2)
        if x is not None:
            assert sum(x[i] * G[i][j] * x[j] for i in range(4) for j in range(4)) == 0
            assert next(t for t in x if t) > 0


def test_known_witness():
    assert _kernels_py.box_search([[1, 0], [0, -1]], 1) == (1, -1)


def test_int64_guard_falls_back():
    G = [[2**40, 0], [0, -(2**40)]]
    assert not fits_int64(G, 1)
    assert box_search(G, 1, backend="compiled") == (1, -1)


def test_backend_selected():
    assert BACKEND in ("compiled", "python")
