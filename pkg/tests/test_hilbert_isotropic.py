import random
from fractions import Fraction

import pytest

from oracles import brute_hilbert, brute_isotropic_mod, smooth_rational
from quadwa.errors import NotGloballySoluble
from quadwa.forms import QForm, evaluate
from quadwa.hilbert import hilbert_symbol
from quadwa.isotropic import (SearchStats, find_isotropic, is_locally_isotropic,
                              nonsingular_isotropic, represent_value)
from quadwa.nt import INF

PLACES = (2, 3, 5, 7, INF)


def test_symbol_examples():
    for p in PLACES:
        assert hilbert_symbol(1, 7, p) == 1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 5, 5) == -1
    assert hilbert_symbol(-1, -1, INF) == -1
    with pytest.raises(ValueError):
        hilbert_symbol(2, 3, 6)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_symbol_matches_brute_force_small(p):
    for a in range(-8, 9):
        for b in range(-8, 9):
            if a and b:
                assert hilbert_symbol(a, b, p) == brute_hilbert(a, b, p), (a, b, p)


@pytest.mark.parametrize("p", PLACES)
def test_symbol_bilinear(p):
    rng = random.Random(hash(p) % 1000)
    for _ in range(200):
        a, b1, b2 = (smooth_rational(rng) for _ in range(3))
        assert hilbert_symbol(a, b1 * b2, p) == hilbert_symbol(a, b1, p) * hilbert_symbol(a, b2, p)


def test_product_formula():
    rng = random.Random(3)
    for _ in range(200):
        a, b = smooth_rational(rng), smooth_rational(rng)
        prod = 1
        for p in (INF, 2, 3, 5, 7, 11, 13):
            prod *= hilbert_symbol(a, b, p)
        assert prod == 1


def test_symbol_accepts_rationals():
    assert hilbert_symbol(Fraction(1, 4), 3, 3) == 1
    assert hilbert_symbol(Fraction(-1, 9), Fraction(-1, 4), 2) == -1


def test_local_isotropy_examples():
    for p in PLACES:
        assert is_locally_isotropic(QForm.diagonal([1, -1]), p)
    assert not is_locally_isotropic(QForm.diagonal([1, 1, 1, 1]), 2)
    assert not brute_isotropic_mod((1, 1, 1, 1), 2, 4)
    with pytest.raises(ValueError):
        is_locally_isotropic(QForm.diagonal([1, 0, -1]), 3)


def test_rank5_locally_isotropic_everywhere_finite():
    rng = random.Random(5)
    for _ in range(100):
        d = [rng.choice((-1, 1)) * rng.randint(1, 60) for _ in range(5)]
        for p in (2, 3, 5, 7):
            assert is_locally_isotropic(QForm.diagonal(d), p)


def test_local_isotropy_against_brute_force():
    rng = random.Random(8)
    for _ in range(25):
        d = [rng.choice((-1, 1)) * rng.randint(1, 6) for _ in range(3)]
        for p in (3, 5):
            if all(c % p for c in d):
                assert is_locally_isotropic(QForm.diagonal(d), p) == brute_isotropic_mod(d, p, 1)


def test_find_isotropic_examples():
    v = find_isotropic(QForm.diagonal([1, -1, 2, 3, 5]))
    assert evaluate(QForm.diagonal([1, -1, 2, 3, 5]), v) == 0 and max(map(abs, v)) <= 10
    w = QForm.diagonal([1, 1, 1, 1, -7])
    v = find_isotropic(w)
    assert evaluate(w, v) == 0 and max(map(abs, v)) <= 10
    with pytest.raises(NotGloballySoluble) as exc:
        find_isotropic(QForm.diagonal([1, 1, 1, 1, 1]))
    assert exc.value.place == INF


def test_find_isotropic_returns_primitive_canonical():
    v = find_isotropic(QForm.diagonal([3, -12, 1, 1, 1]))
    from math import gcd
    g = 0
    for x in v:
        g = gcd(g, x)
    assert g == 1 and next(x for x in v if x) > 0


def test_radical_vector_first():
    stats = SearchStats()
    v = find_isotropic(QForm.diagonal([1, 0, 1]), stats=stats)
    assert v == (0, 1, 0) and stats.method == "radical"


def test_nonsingular_isotropic_avoids_radical():
    w = QForm([[1, 0, 0, 0, 0, 0], [0, -1, 0, 0, 0, 0], [0, 0, 2, 0, 0, 0],
               [0, 0, 0, 3, 0, 0], [0, 0, 0, 0, -5, 0], [0, 0, 0, 0, 0, 0]])
    v = nonsingular_isotropic(w)
    assert evaluate(w, v) == 0 and any(v[:5])


def test_random_rank5_forms_solved():
    rng = random.Random(11)
    solved = 0
    while solved < 30:
        G = [[0] * 5 for _ in range(5)]
        for i in range(5):
            for j in range(i, 5):
                G[i][j] = G[j][i] = rng.randint(-100, 100)
        w = QForm(G)
        from quadwa.forms import inertia
        p, q, z = inertia(w)
        if z or not p or not q:
            continue
        v = find_isotropic(w, seed=solved)
        assert evaluate(w, v) == 0 and any(v)
        solved += 1


def test_represent_value_examples():
    w = QForm.diagonal([1, 1, 1, 1])
    assert evaluate(w, represent_value(w, 7)) == 7
    w = QForm.diagonal([1, -1])
    assert evaluate(w, represent_value(w, 5)) == 5
    w = QForm.diagonal([2, 3, 5, 7, -1])
    for t in (Fraction(3, 7), Fraction(-11, 2), 13):
        assert evaluate(w, represent_value(w, t)) == t
    with pytest.raises(ValueError):
        represent_value(w, 0)
