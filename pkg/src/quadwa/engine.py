"""Weak approximation on the base locus of an admissible system of quadrics.

Induction on the number of forms.  One basis form ``w0`` is split off; a
rational point ``v1`` of the remaining system ``W0`` near the targets comes
from the recursion, four more vectors ``v2..v5`` make ``w0`` diagonal and
indefinite on ``V0 = span(v1..v5)`` while killing ``W0``, and a single rank-5
quadric step on ``V0`` finishes.  Every claim is re-checked in exact
arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np
from flint import fmpq, fmpq_mat

from .admissibility import AdmissCert, certify_real, thresholds
from .errors import (DegenerateChart, HenselConditionFailed, InconsistentTarget, MathFailure, NotAdmissible,
                     PrecisionExhausted, RestrictionNotInjective, MaxIterationsExceeded)
from .forms import (FormSystem, QForm, Subspace, as_vector, bilinear, canonical_projective,
                    evaluate, gram_times, primitive_integer, restrict_system)
from .lattice import integer_kernel
from .local_solver import solve_sign_pattern
from .nt import INF, padic_int, sqrt_mod_p_power, val
from .isotropic import nonsingular_isotropic
from .quadric_wa import (LocalTarget, approximate_on_quadric, p_primitive, parametrize, proj_distance,
                         within, _sqrt_approx)

RETRY_ROUNDS = 5
SIGN_ATTEMPTS = 4


@dataclass
class Problem:
    W: FormSystem
    cert: AdmissCert
    targets: list
    seed: int = 0
    rounds: int = RETRY_ROUNDS
    debug: bool = False
    meta: dict = field(default_factory=dict)


@dataclass
class Solution:
    x: tuple
    distances: dict
    transcript: dict


# ------------------------------------------------------------ helpers

def _child_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence([seed, *path]).generate_state(1)[0])


def _solve_rat(A, b):
    """Exact solution of the square system ``A x = b``."""
    n = len(A)
    M = fmpq_mat(n, n, [fmpq(x.numerator, x.denominator) for row in A for x in row])
    B = fmpq_mat(n, 1, [fmpq(x.numerator, x.denominator) for x in b])
    X = M.solve(B)
    return [Fraction(int(X[i, 0].p), int(X[i, 0].q)) for i in range(n)]


def _round_dyadic(x: Fraction, e: int) -> Fraction:
    """Nearest multiple of ``2^e``."""
    if e >= 0:
        return Fraction(round(x / (1 << e)) << e)
    D = 1 << -e
    return Fraction(round(x * D), D)


def _log2(x: Fraction) -> int:
    return x.numerator.bit_length() - x.denominator.bit_length()


def _gmax(w: QForm) -> Fraction:
    return max(abs(x) for row in w.gram for x in row)


# ------------------------------------------------- local points of W

def real_system_point(W: FormSystem, y, eta: Fraction, max_steps: int = 80):
    """Rational ``z`` near ``y`` with ``|w_a(z)| <= eta |G_a| |z|^2`` for every basis form.

    Minimum-norm Newton steps ``z - J^T (J J^T)^{-1} F`` in exact arithmetic,
    rounded to dyadics whose precision doubles as the iteration converges.
    """
    z = as_vector(y)
    gm = [_gmax(w) for w in W]
    bits = 64
    cap = max(64, -_log2(eta) + 64)
    for _ in range(max_steps):
        zm = max(abs(t) for t in z)
        F = [evaluate(w, z) for w in W]
        if all(abs(f) <= eta * g * zm * zm for f, g in zip(F, gm)):
            return z
        J = [[2 * t for t in gram_times(w, z)] for w in W]
        A = [[sum(a * b for a, b in zip(Ji, Jj)) for Jj in J] for Ji in J]
        try:
            s = _solve_rat(A, F)
        except (ZeroDivisionError, ValueError) as exc:
            raise InconsistentTarget(f"singular Jacobian at real target: {exc}") from None
        step = [sum(J[a][i] * s[a] for a in range(len(J))) for i in range(len(z))]
        e = _log2(zm) - bits
        z = tuple(_round_dyadic(t - d, e) for t, d in zip(z, step))
        if not any(z):
            raise InconsistentTarget("real refinement collapsed to zero")
        bits = min(2 * bits, cap)
    raise InconsistentTarget("real refinement did not converge")


def _padic_pivots(J, p: int):
    """Columns of a full-rank minor chosen by minimal-valuation pivoting, and its valuation."""
    A = [list(r) for r in J]
    n, N = len(A), len(A[0])
    rows, cols, vdet = set(), [], 0
    for _ in range(n):
        best = None
        for r in range(n):
            if r in rows:
                continue
            for c in range(N):
                if c in cols or A[r][c] == 0:
                    continue
                v = val(A[r][c], p)
                if best is None or v < best[0]:
                    best = (v, r, c)
        if best is None:
            raise HenselConditionFailed(float("inf"), float("inf"), "Jacobian is not of full rank")
        v, r, c = best
        rows.add(r)
        cols.append(c)
        vdet += v
        for r2 in range(n):
            if r2 not in rows and A[r2][c] != 0:
                f = A[r2][c] / A[r][c]
                A[r2] = [x - f * y for x, y in zip(A[r2], A[r])]
    return sorted(cols), vdet


def padic_system_point(W: FormSystem, y, p: int, K: int, max_steps: int = 200):
    """Integer ``z`` congruent to a p-adic point of ``X_W`` with ``val(w_a(z)) >= K``.

    Multivariate Newton on the columns of a minimal-valuation minor of the
    Jacobian; requires ``val(F(y)) > 2 val(det J_S)``.
    """
    y = p_primitive(y, p)
    F = [evaluate(w, y) for w in W]
    vF = min(val(f, p) for f in F)
    if vF >= K:
        return y
    J = [[2 * t for t in gram_times(w, y)] for w in W]
    cols, vdet = _padic_pivots(J, p)
    if vF <= 2 * vdet:
        raise HenselConditionFailed(vF, vdet)
    gv = min(val(x, p) for w in W for row in w.gram for x in row if x != 0)
    P = K + 2 * vdet + max(0, -gv) + 8
    mod = p**P
    z = [Fraction(padic_int(t, p, P)) for t in y]
    for _ in range(max_steps):
        F = [evaluate(w, z) for w in W]
        if min(val(f, p) for f in F) >= K:
            return tuple(z)
        J = [[2 * t for t in gram_times(w, z)] for w in W]
        JS = [[row[c] for c in cols] for row in J]
        delta = _solve_rat(JS, [-f for f in F])
        for c, d in zip(cols, delta):
            z[c] = Fraction(padic_int(z[c] + d, p, P) % mod)
    raise HenselConditionFailed(vF, vdet, "multivariate Hensel did not converge")


def _refine_targets(W: FormSystem, targets):
    """Replace each target by a nearby local point of the whole system.

    Returns working targets (same p-adic precision; real ``eps`` reduced by
    the distance moved) and the distances moved.
    """
    out, moved = [], {}
    for t in targets:
        if t.place == INF:
            z = real_system_point(W, t.point, (t.eps / 64) ** 4)
            d = proj_distance(z, t.point, INF)
            slack = t.eps - Fraction(d) * Fraction(1025, 1024) - t.eps / 2**20
            if slack <= t.eps / 64:
                raise InconsistentTarget(f"real target is {d:.3g} from the real locus (eps {float(t.eps):.3g})")
            out.append(LocalTarget(INF, z, eps=slack))
        else:
            try:
                z = padic_system_point(W, t.point, t.place, 4 * t.k + 32)
            except HenselConditionFailed as exc:
                raise InconsistentTarget(f"target at {t.place}: {exc}") from None
            good, d = within(t, z)
            if not good:
                raise InconsistentTarget(f"target at {t.place} is {d} from the nearest local point found")
            out.append(LocalTarget(t.place, z, k=t.k))
        moved[t.place] = d
    return out, moved


# ----------------------------------------------- local points on V0

def _is_padic_square(u: Fraction, p: int) -> bool:
    """``u`` a p-adic unit: is it a square in Z_p?"""
    a = padic_int(u, p, 3 if p == 2 else 1)
    if p == 2:
        return a % 8 == 1
    return pow(a, (p - 1) // 2, p) == 1


def _padic_point_near_e1(d, p: int, kmin: int, prec: int, seed: int):
    """``y = (1, p^e s)`` on ``sum d_i y_i^2 = 0`` with ``e >= kmin`` as large as found."""
    V = val(d[0], p)
    if V == float("inf"):
        return (Fraction(1),) + (Fraction(0),) * (len(d) - 1), prec
    lo = min(val(x, p) for x in d[1:])
    rng = random.Random(seed)
    for e in range((V - lo) // 2, kmin - 1, -1):
        c = -d[0] / Fraction(p) ** (2 * e)
        for attempt in range(96):
            j = 1 + attempt % (len(d) - 1)
            s = [Fraction(rng.randrange(p**3)) for _ in d[1:]]
            s[j - 1] = Fraction(0)
            R = (c - sum(di * si * si for di, si in zip(d[1:], s))) / d[j]
            if R == 0:
                continue
            vr = val(R, p)
            if vr < 0 or vr % 2:
                continue
            u = R / Fraction(p) ** vr
            if not _is_padic_square(u, p):
                continue
            r = sqrt_mod_p_power(padic_int(u, p, prec), p, prec)
            if r is None:
                continue
            s[j - 1] = Fraction(p ** (vr // 2) * r)
            return (Fraction(1),) + tuple(Fraction(p) ** e * x for x in s), e
    return None, None


def _real_point_near_e1(d, vs, bits: int):
    """``y = e1 + t e_j`` with ``d_1 + d_j t^2 = 0``, ``j`` minimising the ambient offset."""
    best = None
    n1 = max(abs(x) for x in vs[0])
    for j in range(1, len(d)):
        q = -d[0] / d[j]
        if q <= 0:
            continue
        cost = _log2(q) + 2 * _log2(Fraction(max(abs(x) for x in vs[j])) / n1)
        if best is None or cost < best[0]:
            best = (cost, j, q)
    if best is None:
        return None
    _, j, q = best
    t = _sqrt_approx(q, bits)
    y = [Fraction(0)] * len(d)
    y[0] = Fraction(1)
    y[j] = t
    return tuple(y)


# ------------------------------------------------------ conditions

def check_conditions(W: FormSystem, w0_index: int, vs) -> list[tuple[str, bool]]:
    """Conditions (1)-(4) on ``v1..v5`` plus the diagonal/rank/indefinite checks on ``w0|V0``."""
    w0 = W[w0_index]
    rest = [W[a] for a in range(W.n) if a != w0_index]
    vs = [as_vector(v) for v in vs]
    c1 = all(bilinear(w, vs[i], vs[j]) == 0 for w in W for i in range(len(vs)) for j in range(i))
    c2 = all(evaluate(w, v) == 0 for w in rest for v in vs)
    d = [evaluate(w0, v) for v in vs]
    c3 = all(x != 0 for x in d[1:])
    s1 = (d[0] > 0) - (d[0] < 0)
    c4 = all(((x > 0) - (x < 0)) == -s1 for x in d[1:])
    diag = all(bilinear(w0, vs[i], vs[j]) == 0 for i in range(len(vs)) for j in range(i))
    rank5 = len(vs) == 5 and all(x != 0 for x in d)
    indef = any(x > 0 for x in d) and any(x < 0 for x in d)
    return [("orthogonality", c1), ("W0-isotropic", c2), ("w0-anisotropic", c3),
            ("opposite-signs", c4), ("diagonal", diag), ("rank-5", rank5), ("indefinite", indef)]


# ------------------------------------------------------------ solver

class _Ctx:
    def __init__(self, rounds: int, debug: bool):
        self.rounds = rounds
        self.debug = debug


def _margins(W: FormSystem, m: int) -> list[float]:
    out = []
    for w in W:
        G = np.array([[float(x) for x in row] for row in w.gram])
        lam = np.linalg.eigvalsh(G)
        nrm = max(abs(lam[0]), abs(lam[-1])) or 1.0
        k = min(m, len(lam))
        out.append(float(min(lam[-k], -lam[k - 1])) / nrm)
    return out


def _normalised_stack(W: FormSystem) -> np.ndarray:
    out = []
    for w in W:
        e = _log2(_gmax(w))
        s = Fraction(1, 2**e) if e >= 0 else Fraction(2**-e)
        out.append([[float(x * s) for x in row] for row in w.gram])
    return np.array(out)


def _solve_level(W: FormSystem, targets, m: int, seed: int, ctx: _Ctx):
    """Exact point of ``X_W`` within every target's precision, and its transcript."""
    work, _ = _refine_targets(W, targets)
    n, N = W.n, W.dim
    if n == 1:
        res = approximate_on_quadric(W[0], work, seed=seed,
                                     local_points={t.place: t.point for t in work})
        return res.x, {"n": 1, "dim": N, "level": m, "z0": list(res.z0), "rounds": res.rounds}

    margins = _margins(W, m)
    w0i = max(range(n), key=lambda a: (margins[a], -a))
    rest = [a for a in range(n) if a != w0i]
    W0 = W.subsystem(rest)
    w0 = W[w0i]
    extra = {t.place: 0 for t in work if t.place != INF}
    shrink = Fraction(1)
    trace = []
    for rnd in range(ctx.rounds + 1):
        sub_targets = []
        for t in work:
            if t.place == INF:
                sub_targets.append(LocalTarget(INF, t.point, eps=t.eps**2 / 64 * shrink))
            else:
                sub_targets.append(LocalTarget(t.place, t.point, k=2 * t.k + 4 + extra[t.place]))
        v1, tr1 = _solve_level(W0, sub_targets, m, _child_seed(seed, rnd, 1), ctx)
        v1 = primitive_integer(v1)
        d1 = evaluate(w0, v1)
        base = {"n": n, "dim": N, "level": m, "w0_index": w0i, "margins": margins,
                "rounds": rnd, "v1": tr1}
        if d1 == 0:
            base.update({"early_exit": True, "v": [list(v1)], "d": [d1]})
            return v1, base
        sign = -1 if d1 > 0 else 1
        vs = [v1]
        children = []
        for i in range(2, 6):
            vi, ch = _next_vector(W, w0i, rest, vs, sign, m, _child_seed(seed, rnd, i), ctx)
            vs.append(vi)
            children.append(ch)
        conds = check_conditions(W, w0i, vs)
        bad = [name for name, ok in conds if not ok]
        if bad:
            raise ArithmeticError(f"construction violated {bad}")
        d = [evaluate(w0, v) for v in vs]
        B0 = [[vs[j][r] for j in range(5)] for r in range(N)]
        q = QForm.diagonal(d)
        local, short = {}, False
        for t in work:
            if t.place == INF:
                bits = 2 * max(64, -_log2(t.eps)) + 64
                y = _real_point_near_e1(d, vs, bits)
                ok, dist = within(LocalTarget(INF, t.point, eps=t.eps / 2), _emb(B0, y))
                if not ok:
                    shrink *= min(Fraction(1, 4), (Fraction(t.eps) / (4 * Fraction(dist))) ** 2)
                    trace.append(f"round {rnd}: real offset {dist:.3g}")
                    short = True
            else:
                prec = 4 * t.k + 2 * max(val(x, t.place) for x in d) + 40
                y, e = _padic_point_near_e1(d, t.place, t.k, prec, _child_seed(seed, rnd, t.place))
                ok = y is not None and within(t, _emb(B0, y))[0]
                if not ok:
                    got = e if e is not None else 0
                    extra[t.place] += 2 * max(t.k - got, 2) + 4
                    trace.append(f"round {rnd}: {t.place}-adic offset exponent {got}")
                    short = True
            local[t.place] = y
        if short:
            continue
        try:
            res = approximate_on_quadric(q, work, seed=_child_seed(seed, rnd, 7), embedding=B0,
                                         local_points=local)
        except PrecisionExhausted as exc:
            trace.append(f"round {rnd}: {exc}")
            shrink /= 16
            for p in extra:
                extra[p] += 4
            continue
        x = res.ambient
        if any(evaluate(w, x) != 0 for w in W):
            raise ArithmeticError("final point failed exact verification")
        base.update({"early_exit": False, "v": [list(v) for v in vs], "d": d,
                     "children": children, "quadric": {"z0": list(res.z0), "coords": list(res.x),
                                                       "rounds": res.rounds},
                     "trace": trace})
        return x, base
    raise PrecisionExhausted(f"n={n}: targets not reached after {ctx.rounds + 1} rounds", trace)


def _emb(B, y):
    return tuple(sum(B[r][c] * y[c] for c in range(len(y))) for r in range(len(B)))


def _column_exponents(basis) -> list[int]:
    return [_log2(Fraction(max(abs(x) for x in b))) for b in basis]


SHORT_GAP = 12  # bits; a jump this large splits off the short sublattice


def _short_prefix(basis, kmin: int) -> int | None:
    """Size of the span of the short vectors when the lengths jump by ``SHORT_GAP`` bits."""
    bits = [max(abs(x) for x in b).bit_length() for b in basis]
    for k in range(max(kmin, 1), len(bits)):
        if bits[k] - bits[k - 1] >= SHORT_GAP:
            return k
    return None


def _next_vector(W, w0i, rest, vs, sign, m, seed, ctx):
    """``v_i``: jointly orthogonal to ``vs``, ``W0``-isotropic, ``sign(w0(v_i)) = sign``.

    ``V_i`` is the joint orthogonal complement of ``vs``; its integer points
    carry an LLL basis.  When a few basis vectors are much longer than the
    rest, points off the span of the short ones have large height, so that
    span is tried first and ``V_i`` itself second.
    """
    N = W.dim
    rows = [gram_times(w, v) for v in vs for w in W]
    basis = sorted((tuple(b) for b in integer_kernel(rows, N)),
                   key=lambda b: max(abs(x) for x in b))
    full = Subspace(tuple(basis), N)
    if not restrict_system(W, full)[1]:
        raise RestrictionNotInjective(f"restriction to a codimension-{full.codim} subspace is not injective")
    candidates = []
    k = _short_prefix(basis, 2 * thresholds(max(W.n - 1, 1)).f + W.n)
    if k is not None:
        candidates.append(("short-sublattice", basis[:k]))
    candidates.append(("complement", basis))
    log = []
    for source, B in candidates:
        S = Subspace(tuple(B), N)
        Wi, inj = restrict_system(W, S)
        if not inj:
            log.append(f"{source}: restriction not injective")
            continue
        note = {"level": m - S.codim, "source": source}
        if ctx.debug:
            note["recertified"] = certify_real(Wi, m - S.codim).verdict
        try:
            return _realise(W, Wi, S, w0i, rest, sign, m - S.codim, seed, ctx, note, log)
        except MaxIterationsExceeded as exc:
            log.append(f"{source}: {exc}")
    raise MaxIterationsExceeded(float("nan"), "could not realise the required sign pattern: "
                                + "; ".join(log))


SMALL_CANDIDATES = 600
SMALL_HITS = 8


def _small_signed_point(w0, q, S, sign, seed):
    """Low-height zero of the single form ``q`` on ``S`` with ``sign(w0) = sign``.

    Candidates are ``param(z0, u)`` for a short zero ``z0`` and small integer
    ``u``; the lowest-height hit is returned with a level-1 transcript.
    """
    try:
        z0 = nonsingular_isotropic(q, seed=seed)
    except MathFailure:
        return None
    d = q.dim
    rng = random.Random(_child_seed(seed, 0x5A11))
    us = [tuple(int(i == j) for i in range(d)) for j in range(d)]
    us += [tuple(rng.choice((-1, 0, 0, 1)) for _ in range(d)) for _ in range(SMALL_CANDIDATES - d)]
    best, hits = None, 0
    for u in [None] + us:
        try:
            c = z0 if u is None else primitive_integer(parametrize(q, z0, u))
        except DegenerateChart:
            continue
        v = primitive_integer(S.lift(c))
        x = evaluate(w0, v)
        if x == 0 or ((x > 0) - (x < 0)) != sign:
            continue
        h = max(abs(t) for t in v)
        if best is None or h < best[0]:
            best = (h, v, c)
        hits += 1
        if hits == SMALL_HITS:
            break
    if best is None:
        return None
    return best[1], best[2], {"n": 1, "dim": d, "level": None, "z0": list(z0), "rounds": 0}


def _realise(W, Wi, S, w0i, rest, sign, level, seed, ctx, note, log):
    """Sign-pattern target on ``S`` (float, rescaled columns), then the recursion.

    The float solve sees the basis with columns rescaled by powers of two;
    the real target is polished there and mapped back with a correspondingly
    smaller ``eps``.
    """
    N = W.dim
    basis = S.basis
    Wi0 = Wi.subsystem(rest)
    if Wi0.n == 1:
        found = _small_signed_point(W[w0i], Wi0[0], S, sign, seed)
        if found is not None:
            v, c, tr = found
            tr["level"] = level
            return v, {"basis": [list(b) for b in basis], "coords": list(c), "eps": None,
                       "admissibility": dict(note, search="small"), "transcript": tr}
        log.append("small search: no point of the required sign")
    ex = _column_exponents(basis)
    spread = max(ex) - min(ex)
    scaled = S if spread == 0 else Subspace(
        tuple(tuple(x / 2**e for x in b) for b, e in zip(basis, ex)), N)
    Ws = restrict_system(W, scaled)[0]
    Ws0 = Ws.subsystem(rest)
    G = _normalised_stack(Ws)
    G0 = G[w0i]
    nrm0 = float(np.linalg.norm(G0, 2))
    d = S.dim
    for attempt in range(SIGN_ATTEMPTS):
        sol = solve_sign_pattern(G, w0i, sign, seed=_child_seed(seed, attempt))
        u = np.asarray(sol.v)
        uh = u / np.linalg.norm(u)
        margin = abs(float(uh @ G0 @ uh))
        eps = Fraction(min(0.125, margin / (4 * nrm0 * np.sqrt(d))))
        eps /= 2**spread * (isqrt(d) + 1)
        try:
            zs = real_system_point(Ws0, tuple(Fraction(float(x)) for x in u), (eps / 64) ** 4)
        except InconsistentTarget as exc:
            log.append(f"attempt {attempt}: polish failed: {exc}")
            continue
        point = tuple(x / 2**e for x, e in zip(zs, ex))
        for tighten in range(SIGN_ATTEMPTS):
            try:
                c, tr = _solve_level(Wi0, [LocalTarget(INF, point, eps=eps)], level,
                                     _child_seed(seed, attempt, tighten), ctx)
            except InconsistentTarget as exc:
                log.append(f"attempt {attempt}: {exc}")
                break
            v = primitive_integer(S.lift(c))
            x = evaluate(W[w0i], v)
            if x != 0 and ((x > 0) - (x < 0)) == sign:
                return v, {"basis": [list(b) for b in basis], "coords": list(c),
                           "eps": eps, "admissibility": note, "transcript": tr}
            log.append(f"attempt {attempt}: wrong sign at eps {float(eps):.3g}")
            eps /= 8
    raise MaxIterationsExceeded(float("nan"), "sign pattern attempts exhausted")


def solve(problem: Problem) -> Solution:
    """Exact rational point of ``X_W`` within every requested local precision."""
    W = problem.W
    cert = problem.cert
    th = thresholds(W.n)
    if cert is None or not cert.certified:
        raise NotAdmissible("a Certified admissibility certificate is required")
    if cert.m < th.f:
        raise NotAdmissible(f"certificate level {cert.m} is below the required {th.f}")
    targets = list(problem.targets)
    places = [t.place for t in targets]
    if not targets or len(set(places)) != len(places):
        raise ValueError("targets must be nonempty with distinct places")
    for t in targets:
        if len(t.point) != W.dim:
            raise ValueError("target dimension does not match the system")
    ctx = _Ctx(problem.rounds, problem.debug)
    x, tr = _solve_level(W, targets, cert.m, problem.seed, ctx)
    x = primitive_integer(x)
    dists = {}
    for t in targets:
        good, d = within(t, x)
        if not good:
            raise PrecisionExhausted(f"final distance {d} at {t.place} exceeds the precision")
        dists[t.place] = d
    return Solution(tuple(x), dists, tr)


# ------------------------------------------------------------ verify

def _check(report, name, ok, detail=""):
    report.append({"name": name, "pass": bool(ok), "detail": detail})


def _verify_transcript(W: FormSystem, x, tr: dict, report: list, path: str):
    n = W.n
    if tr.get("n") != n or tr.get("dim") != W.dim:
        _check(report, f"{path}shape", False, "transcript does not match the system")
        return
    if n == 1:
        return
    w0i = tr["w0_index"]
    rest = [a for a in range(n) if a != w0i]
    W0 = W.subsystem(rest)
    vs = [tuple(int(t) for t in v) for v in tr["v"]]
    if tr.get("early_exit"):
        _check(report, f"{path}early-exit", evaluate(W[w0i], vs[0]) == 0
               and canonical_projective(vs[0]) == canonical_projective(x))
        _verify_transcript(W0, vs[0], tr["v1"], report, path + "v1/")
        return
    for name, ok in check_conditions(W, w0i, vs):
        _check(report, f"{path}{name}", ok)
    c = tr["quadric"]["coords"]
    xs = _emb([[vs[j][r] for j in range(5)] for r in range(W.dim)], c)
    _check(report, f"{path}point-in-span", any(xs) and canonical_projective(xs) == canonical_projective(x))
    _verify_transcript(W0, vs[0], tr["v1"], report, path + "v1/")
    for i, ch in enumerate(tr.get("children", []), start=2):
        S = Subspace(tuple(tuple(b) for b in ch["basis"]), W.dim)
        Wi, inj = restrict_system(W, S)
        orth = all(bilinear(w, b, v) == 0 for w in W for b in S.basis for v in vs[:i - 1])
        _check(report, f"{path}V{i}-complement", orth and S.codim >= n * (i - 1))
        _check(report, f"{path}V{i}-injective", inj)
        lifted = S.lift(ch["coords"])
        _check(report, f"{path}v{i}-lift", any(lifted) and canonical_projective(lifted) == canonical_projective(vs[i - 1]))
        if inj:
            _verify_transcript(Wi.subsystem(rest), ch["coords"], ch["transcript"], report,
                               f"{path}v{i}/")


def verify(solution: Solution, problem: Problem) -> dict:
    """Recompute every claim of ``solution``; failures are report entries."""
    report: list = []
    W = problem.W
    x = tuple(solution.x)
    try:
        ok = len(x) == W.dim and any(x)
        _check(report, "dimension", ok)
        if ok:
            for a, w in enumerate(W):
                _check(report, f"vanishing[{a}]", evaluate(w, x) == 0, str(evaluate(w, x)))
            for t in problem.targets:
                good, d = within(t, x)
                _check(report, f"distance[{t.place}]", good, f"{d} <= {t.precision}")
            _verify_transcript(W, x, solution.transcript, report, "")
    except Exception as exc:  # malformed transcript counts as a failed check
        _check(report, "transcript-readable", False, f"{type(exc).__name__}: {exc}")
    return {"ok": all(c["pass"] for c in report), "checks": report}


# ------------------------------------------------------------ planting

def plant_instance(n: int, m: int, places, seed: int = 0, k: int = 6,
                   eps=Fraction(1, 2**10), perturb: bool = True) -> Problem:
    """A problem whose targets are local perturbations of a known rational point.

    The point has one nonzero coordinate per hyperbolic block, so every
    block product vanishes; p-adic targets move it by ``p^k`` times a
    tangent vector and the real target by a relative ``eps / 16``.
    """
    from .admissibility import generate_admissible
    if m < thresholds(n).f:
        raise ValueError("m must be at least f(n)")
    W, cert = generate_admissible(n, m, seed)
    N = W.dim
    primes = [p for p in places if p != INF]
    rng = random.Random(_child_seed(seed, 0xB10C))
    eps = Fraction(eps)
    for _ in range(64):
        xs = [0] * N
        for j in range(N // 2):
            a = rng.choice([x for x in range(1, 10) if all(x % p for p in primes)])
            xs[2 * j + rng.randrange(2)] = a * rng.choice((-1, 1))
        xs = primitive_integer(xs)
        if any(evaluate(w, xs) != 0 for w in W):
            raise ArithmeticError("planted point is not on the base locus")
        targets = []
        tangent = integer_kernel([gram_times(w, xs) for w in W], N)
        for p in places:
            if p == INF:
                pt = list(Fraction(x) for x in xs)
                if perturb:
                    scale = eps * max(abs(x) for x in xs) / (16 * isqrt(N) + 16)
                    pt = [x + scale * Fraction(rng.randint(-2**20, 2**20), 2**20) for x in pt]
                targets.append(LocalTarget(INF, tuple(pt), eps=eps))
            else:
                pt = list(xs)
                if perturb:
                    delta = [0] * N
                    for b in tangent:
                        c = rng.randint(-3, 3)
                        delta = [x + c * y for x, y in zip(delta, b)]
                    pt = [x + p**k * y for x, y in zip(pt, delta)]
                targets.append(LocalTarget(p, tuple(pt), k=k))
        try:
            _refine_targets(W, targets)
        except InconsistentTarget:
            continue
        return Problem(W, cert, targets, seed=seed, meta={"planted": list(xs)})
    raise ArithmeticError("could not plant a consistent instance")


__all__ = ["Problem", "Solution", "solve", "verify", "plant_instance", "check_conditions",
           "real_system_point", "padic_system_point"]
