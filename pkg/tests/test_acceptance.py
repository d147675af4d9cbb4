"""Acceptance criteria 1-12 at their stated sizes and tolerances.

Each test records one PASS/FAIL line (shown in the terminal summary) and
then asserts.  ``python tests/test_acceptance.py --digests`` recomputes the
documents of criteria 2-4 in a fresh interpreter; criterion 12 compares
those digests with the in-process ones.
"""

import hashlib
import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import brute_hilbert, smooth_rational  # noqa: E402
from quadwa import io  # noqa: E402
from quadwa.admissibility import (REFUTED, generate_admissible, lemma3_check,  # noqa: E402
                                  thresholds)
from quadwa.engine import check_conditions, plant_instance, solve, verify  # noqa: E402
from quadwa.errors import DegenerateChart, MaxIterationsExceeded, NotGloballySoluble  # noqa: E402
from quadwa.forms import QForm, Subspace, evaluate, inertia, matmul, rank, transpose  # noqa: E402
from quadwa.hilbert import hilbert_symbol  # noqa: E402
from quadwa.isotropic import find_isotropic  # noqa: E402
from quadwa.local_solver import evaluation_map, gram_stack, solve_sign_pattern, solve_values  # noqa: E402
from quadwa.nt import INF, val  # noqa: E402
from quadwa.quadric_wa import (parametrize, proj_distance, simultaneous_approx,  # noqa: E402
                               unparametrize, within)

PLACES = [INF, 2, 5]
N1_SEEDS = range(20)
N2_SEEDS = range(10)
LOCAL_TRIALS = 1000
RETRY_OFFSET = 1_000_003

DIGESTS: dict = {}


def _sha(doc) -> str:
    return hashlib.sha256(io.dumps(doc).encode()).hexdigest()


# ------------------------------------------------------------ runners (2-4)

def run_planted(n: int, m: int, seed: int):
    p = plant_instance(n, m, PLACES, seed=seed, k=6, eps=Fraction(1, 2**10))
    t = time.perf_counter()
    s = solve(p)
    dt = time.perf_counter() - t
    return p, s, dt


def planted_record(p, s):
    return _sha(io.problem_doc(p)) + ":" + _sha(io.solution_doc(s))


def exact_and_close(p, s) -> bool:
    vanish = all(evaluate(w, s.x) == 0 for w in p.W)
    close = all(within(t, s.x)[0] for t in p.targets)
    return vanish and close


def run_local(n: int):
    """Value and sign-pattern solves on the generated ``g(n)`` instance."""
    W, _ = generate_admissible(n, thresholds(n).g, seed=n)
    G = gram_stack(W)
    rng = np.random.default_rng(100 + n)
    docs, stats = [], {"first": 0, "retry": 0, "total": 0, "times": [], "worst": 0.0}

    def attempt(kind, arg, seed):
        t = time.perf_counter()
        try:
            if kind == "values":
                sol = solve_values(G, arg, tol=1e-9, seed=seed)
            else:
                sol = solve_sign_pattern(G, arg[0], arg[1], tol=1e-9, seed=seed)
        except MaxIterationsExceeded:
            stats["times"].append(time.perf_counter() - t)
            return None
        stats["times"].append(time.perf_counter() - t)
        vals = evaluation_map(G, np.asarray(sol.v))
        if kind == "values":
            res = float(np.max(np.abs(vals - np.asarray(arg))))
        else:
            i, sign = arg
            if np.sign(vals[i]) != sign:
                return None
            res = float(max((abs(x) for a, x in enumerate(vals) if a != i), default=0.0))
        if res > 1e-9:
            return None
        stats["worst"] = max(stats["worst"], res)
        return sol

    jobs = [("values", tuple(float(x) for x in rng.standard_normal(n) * 10.0)) for _ in range(LOCAL_TRIALS)]
    jobs += [("sign-pattern", (int(rng.integers(n)), int(rng.choice([-1, 1]))))
             for _ in range(LOCAL_TRIALS)]
    for j, (kind, arg) in enumerate(jobs):
        stats["total"] += 1
        sol = attempt(kind, arg, j)
        if sol is not None:
            stats["first"] += 1
        else:
            sol = attempt(kind, arg, j + RETRY_OFFSET)
            if sol is None:
                docs.append({"type": "failure", "job": j})
                continue
        stats["retry"] += 1
        docs.append(io.local_solution_doc(sol, kind))
    return W, docs, stats


def compute_digests() -> dict:
    out = {}
    for seed in N1_SEEDS:
        p, s, _ = run_planted(1, 3, seed)
        out[f"n1-{seed}"] = planted_record(p, s)
    for seed in N2_SEEDS:
        p, s, _ = run_planted(2, 11, seed)
        out[f"n2-{seed}"] = planted_record(p, s)
    for n in (1, 2, 3):
        _, docs, _ = run_local(n)
        out[f"local-{n}"] = _sha({"type": "batch", "docs": docs})
    return out


# --------------------------------------------------------------- criteria

def test_criterion_01_thresholds(acceptance):
    ok = thresholds(2).f == 11 and thresholds(3).f == 23
    for n in range(2, 51):
        t, s = thresholds(n), thresholds(n - 1)
        ok &= t.f - 4 * n == s.f and t.g - (2 * n - 2) == s.g
    acceptance(1, ok, f"f(2)={thresholds(2).f} f(3)={thresholds(3).f}, recurrences n<=50")
    assert ok


def test_criterion_02_planted_single_form(acceptance):
    bad, slow, worst = [], [], 0.0
    for seed in N1_SEEDS:
        p, s, dt = run_planted(1, 3, seed)
        assert p.W.dim == 6
        worst = max(worst, dt)
        if not (exact_and_close(p, s) and verify(s, p)["ok"]):
            bad.append(seed)
        if dt >= 5.0:
            slow.append(seed)
        DIGESTS[f"n1-{seed}"] = planted_record(p, s)
    ok = not bad and not slow
    acceptance(2, ok, f"20 instances, failed {bad}, over 5 s {slow}, slowest {worst:.2f} s")
    assert ok


def test_criterion_03_planted_two_forms(acceptance):
    bad, slow, times = [], [], []
    for seed in N2_SEEDS:
        p, s, dt = run_planted(2, 11, seed)
        assert p.W.dim == 24
        times.append(dt)
        tr = s.transcript
        conds = check_conditions(p.W, tr["w0_index"], [tuple(v) for v in tr["v"]])
        rep = verify(s, p)
        if not (exact_and_close(p, s) and rep["ok"] and all(c for _, c in conds)):
            bad.append(seed)
        if dt >= 60.0:
            slow.append(seed)
        DIGESTS[f"n2-{seed}"] = planted_record(p, s)
    ok = not bad and not slow
    acceptance(3, ok, f"10 instances, failed {bad}, over 60 s {slow}, "
                      f"solve times {min(times):.1f}-{max(times):.1f} s")
    assert ok


def test_criterion_04_local_solver(acceptance):
    lines, ok = [], True
    for n in (1, 2, 3):
        W, docs, st = run_local(n)
        DIGESTS[f"local-{n}"] = _sha({"type": "batch", "docs": docs})
        first = st["first"] / st["total"]
        mean_ms = 1e3 * float(np.mean(st["times"]))
        this = first >= 0.99 and st["retry"] == st["total"] and (W.dim > 24 or mean_ms < 10.0)
        ok &= this
        lines.append(f"n={n} dim={W.dim}: first {100 * first:.1f}%, retry {st['retry']}/{st['total']}, "
                     f"mean {mean_ms:.2f} ms, max {1e3 * max(st['times']):.1f} ms, "
                     f"worst residual {st['worst']:.1e}")
    acceptance(4, ok, "; ".join(lines))
    assert ok


def random_subspace(rng, N, d):
    while True:
        try:
            return Subspace(tuple(tuple(rng.randint(-3, 3) for _ in range(N))
                                  for _ in range(N - d)), N)
        except ValueError:
            continue


# n=3 restrictions sit close to the boundary of their level; a smaller sample
# budget keeps each trial to a couple of seconds (Inconclusive is allowed)
LEMMA3_BUDGET = {2: 16384, 3: 2048}


def test_criterion_05_lemma3(acceptance):
    rng = random.Random(5)
    counts = {}
    for n, m in ((2, 5), (3, 7)):
        W, cert = generate_admissible(n, m, seed=1)
        for _ in range(50):
            d = rng.randint(1, m - 1)
            r = lemma3_check(W, cert, random_subspace(rng, W.dim, d), max_samples=LEMMA3_BUDGET[n])
            counts[(n, r.verdict)] = counts.get((n, r.verdict), 0) + 1
    refuted = sum(v for (n, k), v in counts.items() if k == REFUTED)
    ok = refuted == 0
    acceptance(5, ok, "100 trials, " + ", ".join(f"n={n} {k}: {v}" for (n, k), v in sorted(counts.items())))
    assert ok


def lm_form(rng, N, r):
    G = [[Fraction(0)] * N for _ in range(N)]
    for _ in range(r):
        L = [rng.randint(-5, 5) for _ in range(N)]
        M = [rng.randint(-5, 5) for _ in range(N)]
        for i in range(N):
            for j in range(N):
                G[i][j] += Fraction(L[i] * M[j] + L[j] * M[i], 2)
    return G


def test_criterion_06_rank_bound(acceptance):
    rng = random.Random(6)
    worst = []
    for _ in range(500):
        r = rng.randint(1, 4)
        worst.append(rank(lm_form(rng, rng.randint(2, 14), r)) - 2 * r)
    ok = max(worst) <= 0
    acceptance(6, ok, f"500 forms, max rank - 2r = {max(worst)}")
    assert ok


def _sym(rng, n, lo, hi):
    G = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            G[i][j] = G[j][i] = Fraction(rng.randint(lo, hi))
    return G


def _invertible(rng, n):
    while True:
        P = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if rank(P) == n:
            return P


def test_criterion_07_sylvester(acceptance):
    rng = random.Random(7)
    congr = 0
    for _ in range(1000):
        n = rng.randint(1, 7)
        G = _sym(rng, n, -6, 6)
        if rng.random() < 0.3:  # singular cases too
            G = [list(r) for r in matmul(matmul(transpose(_invertible(rng, n)),
                 [[G[i][j] if i and j else Fraction(0) for j in range(n)] for i in range(n)]),
                 _invertible(rng, n))]
            G = [[(G[i][j] + G[j][i]) / 2 for j in range(n)] for i in range(n)]
        P = _invertible(rng, n)
        congr += inertia(QForm(matmul(matmul(transpose(P), G), P))) == inertia(QForm(G))
    agree = 0
    for _ in range(1000):
        n = rng.randint(1, 8)
        G = _sym(rng, n, -9, 9)
        lam = np.linalg.eigvalsh(np.array(G, dtype=float))
        p, q, z = inertia(QForm(G))
        # eigenvalues within the guard band may fall either way
        agree += (int(np.sum(lam > 1e-8)) <= p <= int(np.sum(lam > -1e-8))
                  and int(np.sum(lam < -1e-8)) <= q <= int(np.sum(lam < 1e-8))
                  and p + q + z == n)
    ok = congr == 1000 and agree == 1000
    acceptance(7, ok, f"congruence {congr}/1000, eigenvalue counts {agree}/1000")
    assert ok


def test_criterion_08_hilbert(acceptance):
    mismatch = []
    for p in (2, 3, 5, 7):
        for a in range(-20, 21):
            for b in range(-20, 21):
                if a and b and hilbert_symbol(a, b, p) != brute_hilbert(a, b, p):
                    mismatch.append((a, b, p))
    rng = random.Random(8)
    prod_ok = 0
    for _ in range(500):
        a, b = smooth_rational(rng), smooth_rational(rng)
        prod = 1
        for p in (INF, 2, 3, 5, 7, 11, 13):
            prod *= hilbert_symbol(a, b, p)
        prod_ok += prod == 1
    ok = not mismatch and prod_ok == 500
    acceptance(8, ok, f"brute force mismatches {len(mismatch)} of 6400, product formula {prod_ok}/500")
    assert ok


def test_criterion_09_isotropic(acceptance):
    ok, notes = True, []
    for d in ([1, -1, 2, 3, 5], [1, 1, 1, 1, -7]):
        w = QForm.diagonal(d)
        v = find_isotropic(w)
        good = evaluate(w, v) == 0 and any(v) and max(map(abs, v)) <= 10
        ok &= good
        notes.append(f"{d} -> {list(v)}")
    rejected = 0
    for d in ([1, 2, 3, 4, 5], [-1, -1, -3, -2, -9], [1, 1, 1]):
        try:
            find_isotropic(QForm.diagonal(d))
        except NotGloballySoluble:
            rejected += 1
    ok &= rejected == 3
    rng = random.Random(9)
    solved = tried = 0
    while tried < 100:
        w = QForm(_sym(rng, 5, -100, 100))
        p, q, z = inertia(w)
        if z or not p or not q:
            continue
        tried += 1
        v = find_isotropic(w, seed=tried)
        solved += evaluate(w, v) == 0 and any(v)
    ok &= solved == 100
    acceptance(9, ok, "; ".join(notes) + f"; definite rejected {rejected}/3; random rank 5 {solved}/100")
    assert ok


def _form_with_zero(rng):
    """Random rational form together with an exact isotropic vector."""
    while True:
        k = rng.randint(3, 7)
        G = _sym(rng, k, -9, 9)
        z0 = [rng.randint(-5, 5) for _ in range(k)]
        nz = [i for i in range(k) if z0[i]]
        if not nz:
            continue
        i = rng.choice(nz)
        G[i][i] -= evaluate(QForm(G), z0) / z0[i] ** 2
        w = QForm(G)
        if evaluate(w, z0) == 0 and any(sum(g * x for g, x in zip(row, z0)) for row in w.gram):
            return w, z0


def test_criterion_10_parametrize(acceptance):
    rng = random.Random(10)
    exact = degenerate = 0
    pool = [_form_with_zero(rng) for _ in range(500)]
    while exact < 10_000:
        w, z0 = pool[rng.randrange(len(pool))]
        u = [Fraction(rng.randint(-30, 30), rng.randint(1, 6)) for _ in range(w.dim)]
        try:
            x = parametrize(w, z0, u)
        except DegenerateChart:
            degenerate += 1
            continue
        assert evaluate(w, x) == 0, (w.gram, z0, u)
        exact += 1
    worst, trips = Fraction(0), 0
    while trips < 1000:
        w, z0 = pool[rng.randrange(len(pool))]
        u0 = [rng.randint(-20, 20) for _ in range(w.dim)]
        try:
            y = parametrize(w, z0, u0)
            y2 = parametrize(w, z0, unparametrize(w, z0, y))
        except DegenerateChart:
            continue
        worst = max(worst, Fraction(proj_distance(y2, y, INF)))
        trips += 1
    ok = exact == 10_000 and worst <= 1e-9
    acceptance(10, ok, f"10000 exact isotropic outputs ({degenerate} degenerate charts redrawn), "
                       f"1000 round trips, worst distance {float(worst):.1e}")
    assert ok


def _postconditions(targets, u) -> bool:
    for place, value, prec in targets:
        if place == INF:
            if abs(u - value) > prec:
                return False
        elif val(u - value, place) < prec:
            return False
    return True


def test_criterion_11_simultaneous_approx(acceptance):
    example = simultaneous_approx([(2, 3, 4), (INF, Fraction(1, 2), Fraction(1, 4))])
    ok = example == Fraction(19, 33)
    rng = random.Random(11)
    good = 0
    for _ in range(1000):
        places = rng.sample([INF, 2, 3, 5, 7, 11, 13], rng.randint(1, 4))
        targets = []
        for p in places:
            if p == INF:
                targets.append((INF, Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 1000)),
                                Fraction(1, 2 ** rng.randint(0, 30))))
            else:
                # denominators may contain any of the chosen primes
                targets.append((p, Fraction(rng.randint(-500, 500), rng.randint(1, 60)),
                                rng.randint(0, 8)))
        good += _postconditions(targets, simultaneous_approx(targets))
    ok &= good == 1000
    acceptance(11, ok, f"worked example -> {example}; postconditions {good}/1000")
    assert ok


def test_criterion_12_determinism(acceptance):
    if len(DIGESTS) < len(N1_SEEDS) + len(N2_SEEDS) + 3:
        DIGESTS.update(compute_digests())
    env = dict(os.environ, PYTHONHASHSEED="12345")
    out = subprocess.run([sys.executable, __file__, "--digests"], capture_output=True, text=True,
                         env=env, check=True, timeout=3600)
    fresh = json.loads(out.stdout)
    diff = sorted(k for k in DIGESTS if fresh.get(k) != DIGESTS[k])
    ok = not diff and set(fresh) == set(DIGESTS)
    acceptance(12, ok, f"{len(DIGESTS)} documents re-derived in a fresh process, differing: {diff}")
    assert ok


if __name__ == "__main__":
    if sys.argv[1:] == ["--digests"]:
        json.dump(compute_digests(), sys.stdout)
    else:
        sys.exit(pytest.main([__file__, "-q"]))
