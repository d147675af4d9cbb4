import random
from fractions import Fraction
from itertools import combinations

import pytest

from quadwa.admissibility import (CERTIFIED, INCONCLUSIVE, REFUTED, certify_real,
                                  generate_admissible, lemma3_check, min_rank_complex, thresholds)
from quadwa.forms import FormSystem, QForm, Subspace, inertia


def min_pq(W, c):
    p, q, _ = inertia(W.combination(c))
    return min(p, q)


def test_threshold_values():
    assert thresholds(2).f == 11 and thresholds(3).f == 23
    t = thresholds(1)
    assert (t.f, t.g) == (3, 1)
    with pytest.raises(ValueError):
        thresholds(0)


def test_threshold_recurrences():
    for n in range(2, 51):
        assert thresholds(n).f - 4 * n == thresholds(n - 1).f
        assert thresholds(n).g - (2 * n - 2) == thresholds(n - 1).g


def test_certify_examples():
    c = certify_real(FormSystem([QForm.diagonal([1, -1])]), 1)
    assert c.verdict == CERTIFIED and c.check()
    c = certify_real(FormSystem([QForm.diagonal([1, 1])]), 1)
    assert c.verdict == REFUTED and c.witness == (1,)


def test_certify_block_system():
    W, cert = generate_admissible(2, 3, 0)
    assert W.dim == 8 and cert.verdict == CERTIFIED
    assert certify_real(W, 3).verdict == CERTIFIED


def test_certified_is_sound():
    W, cert = generate_admissible(2, 3, 5)
    assert cert.delta > cert.covering_radius * cert.lipschitz_bound
    rng = random.Random(0)
    for _ in range(300):
        c = [Fraction(rng.randint(-1000, 1000), 1000) for _ in range(W.n)]
        if any(c):
            assert min_pq(W, c) >= 3


def test_refuted_witness_replays():
    W, _ = generate_admissible(2, 3, 1)
    c = certify_real(W, 5)
    assert c.verdict == REFUTED and min_pq(W, c.witness) < 5
    c = certify_real(W, 4, max_samples=256)  # fails only on a measure-zero set
    assert c.verdict in (REFUTED, INCONCLUSIVE)


def test_user_witness_refutes():
    W = FormSystem([QForm.diagonal([1, -1, 1, -1]), QForm.diagonal([1, 1, 1, -1])])
    c = certify_real(W, 1, witnesses=[(1, -1)])
    assert c.verdict == REFUTED and min_pq(W, c.witness) < 1


@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (2, 3), (2, 5), (3, 7)])
def test_generator_certifies(n, m):
    for seed in range(3):
        W, cert = generate_admissible(n, m, seed)
        assert W.n == n and W.dim == 2 * (m + n - 1)
        assert cert.certified


def test_generator_small_cases():
    W, _ = generate_admissible(1, 1, 0)
    assert W.dim == 2 and W[0].gram == ((0, Fraction(1, 2)), (Fraction(1, 2), 0))


def test_generator_general_position():
    W, cert = generate_admissible(3, 4, 2)
    lam = eval(cert.note.split("functionals ", 1)[1])
    for rows in combinations(lam, 3):
        det = (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
               - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
               + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))
        assert det != 0


def test_admissible_implies_indefinite():
    W, _ = generate_admissible(2, 5, 3)
    rng = random.Random(1)
    for _ in range(100):
        c = [rng.randint(-9, 9) for _ in range(2)]
        if any(c):
            p, q, _ = inertia(W.combination(c))
            assert p >= 1 and q >= 1


def random_subspace(rng, N, d):
    while True:
        try:
            return Subspace(tuple(tuple(rng.randint(-3, 3) for _ in range(N))
                                  for _ in range(N - d)), N)
        except ValueError:
            continue


def test_lemma3_examples():
    W, cert = generate_admissible(2, 3, 0)
    assert lemma3_check(W, cert, Subspace.full(8)).m == 3
    r = lemma3_check(W, cert, random_subspace(random.Random(4), 8, 1))
    assert r.m == 2 and r.verdict != REFUTED
    with pytest.raises(ValueError):
        lemma3_check(W, cert, random_subspace(random.Random(4), 8, 3))


def test_lemma3_never_refuted():
    rng = random.Random(7)
    W, cert = generate_admissible(2, 5, 1)
    for _ in range(10):
        d = rng.randint(1, 4)
        assert lemma3_check(W, cert, random_subspace(rng, W.dim, d)).verdict != REFUTED


def test_min_rank_complex_examples():
    assert min_rank_complex(FormSystem([QForm.diagonal([1, -1])])) == 2
    assert min_rank_complex(FormSystem([QForm.diagonal([1, 0]), QForm.diagonal([0, 1])])) == 1
    assert min_rank_complex(FormSystem([QForm.diagonal([1, 1, 1]), QForm.diagonal([1, 2, 3])])) == 2
    W3 = FormSystem([QForm.diagonal([1, 0, 0]), QForm.diagonal([0, 1, 0]), QForm.diagonal([0, 0, 1])])
    with pytest.raises(ValueError):
        min_rank_complex(W3)
    assert min_rank_complex(W3, heuristic=True) >= 1
