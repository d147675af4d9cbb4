import copy
from fractions import Fraction

import pytest

import quadwa.engine as engine
from quadwa.admissibility import certify_real
from quadwa.errors import InconsistentTarget, NotAdmissible
from quadwa.forms import FormSystem, QForm, evaluate
from quadwa.nt import INF
from quadwa.quadric_wa import LocalTarget, within
from quadwa.engine import Problem, check_conditions, plant_instance, solve, verify


def failed(report):
    return [c["name"] for c in report["checks"] if not c["pass"]]


@pytest.fixture(scope="module")
def planted2():
    p = plant_instance(2, 11, [INF, 2, 5], seed=0)
    return p, solve(p)


def test_single_form_example():
    W = FormSystem([QForm.diagonal([1, -1, 1, -1, 1, -1])])
    cert = certify_real(W, 3)
    targets = [LocalTarget(5, (1, 1, 0, 0, 0, 0), k=6),
               LocalTarget(INF, (3, 5, 4, 0, 0, 0), eps=Fraction(1, 2**10))]
    s = solve(Problem(W, cert, targets))
    assert evaluate(W[0], s.x) == 0
    assert all(within(t, s.x)[0] for t in targets)
    assert verify(s, Problem(W, cert, targets))["ok"]


@pytest.mark.parametrize("seed", range(4))
def test_planted_single_form(seed):
    p = plant_instance(1, 3, [INF, 2, 5], seed=seed)
    s = solve(p)
    r = verify(s, p)
    assert r["ok"], failed(r)


def test_planted_instance_shape():
    p = plant_instance(2, 11, [INF, 2, 5], seed=3)
    x = p.meta["planted"]
    assert p.W.dim == 24 and all(evaluate(w, x) == 0 for w in p.W)
    assert sorted(map(str, (t.place for t in p.targets))) == ["2", "5", "inf"]
    with pytest.raises(ValueError):
        plant_instance(2, 10, [INF], seed=0)


def test_unperturbed_targets_are_the_planted_point():
    p = plant_instance(1, 3, [INF, 3], seed=1, perturb=False)
    x = p.meta["planted"]
    assert all(tuple(t.point) == tuple(Fraction(v) for v in x) for t in p.targets)
    assert verify(solve(p), p)["ok"]


def test_two_forms_end_to_end(planted2):
    p, s = planted2
    r = verify(s, p)
    assert r["ok"], failed(r)
    names = {c["name"] for c in r["checks"]}
    for cond in ("orthogonality", "W0-isotropic", "w0-anisotropic", "opposite-signs",
                 "diagonal", "rank-5", "indefinite"):
        assert cond in names


def test_transcript_conditions_hold(planted2):
    p, s = planted2
    tr = s.transcript
    vs = [tuple(v) for v in tr["v"]]
    assert all(ok for _, ok in check_conditions(p.W, tr["w0_index"], vs))


def test_tampered_point_fails(planted2):
    p, s = planted2
    x = list(s.x)
    x[0] += 1
    bad = engine.Solution(tuple(x), s.distances, s.transcript)
    names = failed(verify(bad, p))
    assert any(n.startswith("vanishing") for n in names)


def test_tampered_transcript_fails(planted2):
    p, s = planted2
    tr = copy.deepcopy(s.transcript)
    v2 = list(tr["v"][1])
    v2[0] += 1
    tr["v"][1] = v2
    names = failed(verify(engine.Solution(s.x, s.distances, tr), p))
    assert "orthogonality" in names


def test_garbage_transcript_is_a_failed_check(planted2):
    p, s = planted2
    r = verify(engine.Solution(s.x, s.distances, {"n": 2, "dim": 24}), p)
    assert not r["ok"]


def test_early_exit(monkeypatch):
    p = plant_instance(2, 11, [INF, 3], seed=1, perturb=False)
    x = tuple(p.meta["planted"])
    inner = engine._solve_level

    def fake(W, targets, m, seed, ctx):
        if W.n == 1:
            return x, {"n": 1, "dim": W.dim, "level": m, "z0": list(x), "rounds": 0}
        return inner(W, targets, m, seed, ctx)

    monkeypatch.setattr(engine, "_solve_level", fake)
    s = solve(p)
    assert s.transcript["early_exit"] and tuple(s.x) == x
    assert verify(s, p)["ok"]


def test_requires_certified_level():
    p = plant_instance(1, 3, [INF], seed=0)
    low = copy.copy(p)
    low.cert = certify_real(p.W, 2)
    with pytest.raises(NotAdmissible):
        solve(low)
    W = FormSystem([QForm.diagonal([1, 1, 1, 1, 1, 1])])
    with pytest.raises(NotAdmissible):
        solve(Problem(W, certify_real(W, 3), [LocalTarget(3, (1, 0, 0, 0, 0, 0), k=2)]))


def test_inconsistent_target_rejected():
    p = plant_instance(1, 3, [INF], seed=0)
    far = Problem(p.W, p.cert, [LocalTarget(INF, (1, 1, 1, 1, 1, 1), eps=Fraction(1, 2**20))])
    with pytest.raises(InconsistentTarget):
        solve(far)


def test_deterministic():
    p = plant_instance(1, 3, [INF, 2, 5], seed=9)
    a, b = solve(p), solve(p)
    assert a.x == b.x and a.transcript == b.transcript
