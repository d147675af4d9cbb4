import numpy as np
import pytest

from quadwa.admissibility import generate_admissible, thresholds
from quadwa.errors import InsufficientInertia
from quadwa.forms import FormSystem, QForm
from quadwa.local_solver import (evaluation_map, hyperbolic_basis, solve_sign_pattern,
                                 solve_values, solve_values_complex)

D11 = FormSystem([QForm.diagonal([1, -1])])


def block_system():
    W, _ = generate_admissible(2, 3, 0)
    return W


def test_evaluation_map_basics():
    W = block_system()
    assert np.all(evaluation_map(W, np.zeros(8)) == 0)
    v = np.random.default_rng(0).normal(size=8)
    assert np.allclose(evaluation_map(W, 2 * v), 4 * evaluation_map(W, v))
    with pytest.raises(ValueError):
        evaluation_map(W, np.zeros(3))


def test_solve_values_small():
    for c in (5.0, -1.0):
        s = solve_values(D11, [c], tol=1e-12)
        assert abs(s.v[0] ** 2 - s.v[1] ** 2 - c) <= 1e-12


def test_solve_values_zero_target_is_flagged():
    s = solve_values(D11, [0.0])
    assert s.trivial and not any(s.v)


def test_solve_values_block_system():
    W = block_system()
    s = solve_values(W, [1.0, -1.0], tol=1e-10)
    assert np.allclose(evaluation_map(W, np.array(s.v)), [1, -1], atol=1e-10)


@pytest.mark.parametrize("sign", [1, -1])
def test_sign_pattern_block_system(sign):
    W = block_system()
    s = solve_sign_pattern(W, 0, sign, tol=1e-10)
    e = evaluation_map(W, np.array(s.v))
    assert np.sign(e[0]) == sign and abs(e[0]) >= 1e-3 and abs(e[1]) <= 1e-10


def test_sign_pattern_single_form():
    s = solve_sign_pattern(D11, 0, -1)
    assert s.v[0] ** 2 - s.v[1] ** 2 < 0


def test_homogeneity_metamorphic():
    W = block_system()
    s = solve_values(W, [0.5, 2.0], tol=1e-12, seed=3)
    v = 3 * np.array(s.v)
    assert np.allclose(evaluation_map(W, v), [4.5, 18.0], atol=1e-9)


def test_residuals_are_recomputed():
    W = block_system()
    s = solve_values(W, [1.0, 2.0])
    again = np.abs(evaluation_map(W, np.array(s.v)) - [1.0, 2.0])
    assert np.allclose(again, s.residuals, atol=0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_targets_on_generated_instances(n):
    W, _ = generate_admissible(n, thresholds(n).g, 11)
    rng = np.random.default_rng(n)
    for _ in range(25):
        c = rng.normal(size=n)
        s = solve_values(W, c, tol=1e-9, seed=int(rng.integers(1 << 30)))
        assert s.max_residual <= 1e-9


def test_hyperbolic_basis():
    for w, m in ((QForm.diagonal([1, -1]), 1), (QForm.diagonal([1, 1, -1, -1]), 2)):
        G = np.array(w.gram, dtype=float)
        pairs = hyperbolic_basis(w, m)
        assert len(pairs) == m
        for i, (e, f) in enumerate(pairs):
            assert abs(e @ G @ e) < 1e-12 and abs(f @ G @ f) < 1e-12
            assert abs(e @ G @ f - 1) < 1e-12
            for e2, f2 in pairs[i + 1:]:
                for a in (e, f):
                    for b in (e2, f2):
                        assert abs(a @ G @ b) < 1e-12
    with pytest.raises(InsufficientInertia):
        hyperbolic_basis(QForm.diagonal([1, 1]), 1)


def test_complex_values():
    W = FormSystem([QForm.diagonal([1, 0, 0])])
    s = solve_values_complex(W, [-1])
    assert abs(s.v[0] ** 2 + 1) < 1e-9
