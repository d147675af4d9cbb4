"""Weak approximation on a single quadric through a rational point.

A global isotropic ``z0`` gives the chart ``u -> w(u) z0 - 2 b(z0, u) u``
(second intersection of the line ``z0 + t u`` with the quadric).  Local
points are pulled back to chart coordinates, approximated simultaneously by
one rational vector with a shared denominator, and pushed forward again.
Every returned point is checked exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, prod
from typing import Sequence

import mpmath

from .errors import (DegenerateChart, HenselConditionFailed, NoCrossing, PrecisionExhausted)
from .forms import (QForm, as_rat, as_vector, bilinear, evaluate, gram_times, inertia,
                    primitive_integer)
from .isotropic import nonsingular_isotropic
from .nt import INF, check_place, padic_int, val

SAFETY_DIGITS = 4
SAFETY_EPS = Fraction(1, 16)
RETRY_ROUNDS = 5


@dataclass(frozen=True)
class LocalTarget:
    """A local point at one place with its precision demand (``k`` or ``eps``)."""

    place: object
    point: tuple
    k: int | None = None
    eps: Fraction | None = None

    def __post_init__(self):
        place = check_place(self.place)
        object.__setattr__(self, "place", place)
        pt = as_vector(self.point)
        if not any(pt):
            raise ValueError("target point must be nonzero")
        object.__setattr__(self, "point", pt)
        if place == INF:
            if self.eps is None or as_rat(self.eps) <= 0:
                raise ValueError("real target needs eps > 0")
            object.__setattr__(self, "eps", as_rat(self.eps))
            object.__setattr__(self, "k", None)
        else:
            if self.k is None or int(self.k) <= 0:
                raise ValueError("p-adic target needs k > 0")
            object.__setattr__(self, "k", int(self.k))
            object.__setattr__(self, "eps", None)

    @property
    def precision(self):
        """Largest admissible distance: ``p^-k`` or ``eps``."""
        if self.place == INF:
            return self.eps
        return Fraction(1, self.place**self.k)

    def with_point(self, point) -> "LocalTarget":
        return LocalTarget(self.place, tuple(point), self.k, self.eps)


# ---------------------------------------------------------------- distances

def p_primitive(v: Sequence, p: int) -> tuple[Fraction, ...]:
    """Scale by a power of ``p`` so the minimal valuation is zero."""
    v = as_vector(v)
    m = min(val(x, p) for x in v)
    if m == float("inf"):
        raise ValueError("zero vector")
    s = Fraction(p) ** (-m)
    return tuple(x * s for x in v)


def proj_distance(x: Sequence, y: Sequence, s) -> Fraction | float:
    """Distance between the lines through ``x`` and ``y`` at the place ``s``.

    p-adic: ``p^-k`` with ``k`` the agreement exponent after making both
    vectors p-primitive and scaling by the optimal unit (exact Fraction).
    Real: smallest sup-norm distance between Euclidean unit representatives
    (float, computed with 50 digits).
    """
    s = check_place(s)
    x = as_vector(x)
    y = as_vector(y)
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    if not any(x) or not any(y):
        raise ValueError("zero vector")
    if s == INF:
        return _real_distance(x, y)
    p = s
    xp = p_primitive(x, p)
    yp = p_primitive(y, p)
    i = next(j for j in range(len(yp)) if val(yp[j], p) == 0)
    k = float("inf")
    for j in range(len(xp)):
        d = xp[j] * yp[i] - xp[i] * yp[j]
        k = min(k, val(d, p))
    if k == float("inf"):
        return Fraction(0)
    return Fraction(1, p**k)


def _mp(q) -> "mpmath.mpf":
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def _real_distance(x, y) -> float:
    with mpmath.workdps(50):
        X = [_mp(q) for q in x]
        Y = [_mp(q) for q in y]
        nx = mpmath.sqrt(mpmath.fsum(t * t for t in X))
        ny = mpmath.sqrt(mpmath.fsum(t * t for t in Y))
        X = [t / nx for t in X]
        Y = [t / ny for t in Y]
        plus = max(abs(a - b) for a, b in zip(X, Y))
        minus = max(abs(a + b) for a, b in zip(X, Y))
        return float(min(plus, minus))


def within(target: LocalTarget, x: Sequence) -> tuple[bool, object]:
    d = proj_distance(x, target.point, target.place)
    return d <= target.precision, d


# ------------------------------------------------------------- chart maps

def parametrize(w: QForm, z0: Sequence, u: Sequence) -> tuple[Fraction, ...]:
    """``x = w(u) z0 - 2 b(z0, u) u``; exactly isotropic whenever ``w(z0) = 0``."""
    z0 = as_vector(z0)
    u = as_vector(u)
    if evaluate(w, z0) != 0:
        raise ValueError("z0 is not isotropic")
    wu = evaluate(w, u)
    b = bilinear(w, z0, u)
    x = tuple(wu * a - 2 * b * c for a, c in zip(z0, u))
    if not any(x):
        raise DegenerateChart("u lies on the tangent cone through z0")
    return x


def choose_pivot(z0: Sequence, points: Sequence[tuple[object, Sequence]], exclude=()) -> int:
    """Deterministic chart pivot: ``z0_i != 0`` and ``y_i`` of unit size at every place."""
    n = len(z0)
    best = None
    for i in range(n):
        if i in exclude or z0[i] == 0:
            continue
        score = 0.0
        ok = True
        for place, y in points:
            if y[i] == 0:
                ok = False
                break
            score = min(score, _unit_score(y, i, place))
        if not ok:
            continue
        if best is None or score > best[0]:
            best = (score, i)
            if score == 0.0:
                break
    if best is None:
        raise DegenerateChart("no admissible chart pivot")
    return best[1]


def _unit_score(y: Sequence, i: int, place) -> float:
    """0 when ``y_i`` has maximal size among the entries, negative otherwise."""
    if place == INF:
        m = max(abs(float(t)) if abs(t) < 10**300 else 1e300 for t in y)
        yi = abs(float(y[i])) if abs(y[i]) < 10**300 else 1e300
        r = yi / m if m else 0.0
        return 0.0 if r >= 0.5 else r - 1.0
    m = min(val(t, place) for t in y)
    return -float(val(y[i], place) - m)


def unparametrize(w: QForm, z0: Sequence, y: Sequence, pivot: int | None = None,
                  norm: int | None = None) -> tuple[Fraction, ...]:
    """Chart coordinates ``u = lambda y - z0`` (``u_pivot = 0``), optionally scaled so ``u_norm = 1``.

    ``parametrize(w, z0, u)`` is proportional to ``y`` when ``y`` lies on the
    quadric.
    """
    z0 = as_vector(z0)
    y = as_vector(y)
    if pivot is None:
        pivot = next((i for i in range(len(y)) if y[i] != 0 and z0[i] != 0), None)
        if pivot is None:
            raise DegenerateChart("no coordinate where both y and z0 are nonzero")
    if y[pivot] == 0 or z0[pivot] == 0:
        raise DegenerateChart("pivot coordinate vanishes")
    lam = z0[pivot] / y[pivot]
    u = tuple(lam * a - b for a, b in zip(y, z0))
    if not any(u):
        raise DegenerateChart("point is proportional to z0")
    if norm is not None:
        if u[norm] == 0:
            raise DegenerateChart("normalising coordinate vanishes")
        u = tuple(t / u[norm] for t in u)
    return u


# ------------------------------------------------------------ local points

def hensel_local_point(w: QForm, v: Sequence, p: int, k: int) -> tuple[Fraction, ...]:
    """Refine ``v`` to ``y`` with ``w(y) = 0 mod p^k`` by Newton along one coordinate.

    ``v`` is first made p-primitive.  The coordinate with the smallest
    gradient valuation ``delta`` is adjusted; the Newton condition is
    ``val(w(v)) > 2 delta``.
    """
    check_place(p)
    v = as_vector(v)
    if evaluate(w, v) == 0:
        return v
    M, s = w.integral_gram()
    vs = val(Fraction(s), p)
    yp = p_primitive(v, p)
    den = 1
    for t in yp:
        den = den * t.denominator // gcd(den, t.denominator)  # coprime to p
    y = [int(t * den) for t in yp]
    n = len(y)
    Q = lambda z: sum(z[i] * sum(M[i][j] * z[j] for j in range(n)) for i in range(n))
    grad = [2 * sum(M[i][j] * y[j] for j in range(n)) for i in range(n)]
    gv = [val(g, p) for g in grad]
    delta = min(gv)
    j = gv.index(delta)
    fv = val(Q(y), p)
    if delta == float("inf") or fv <= 2 * delta:
        raise HenselConditionFailed(fv - vs, delta)
    target = k + vs
    K = target + delta + 2
    mod = p**K
    while True:
        f = Q(y)
        fv = val(f, p)
        if fv >= target:
            break
        g = 2 * sum(M[j][i] * y[i] for i in range(n))
        gval, gu = _split(g, p)
        fval, fu = _split(f, p)
        # h = -f / g, p-integral since fv > delta
        h = -(p ** (fval - gval)) * fu * pow(gu, -1, mod) % mod
        y[j] = (y[j] + h) % mod
    return tuple(Fraction(t) for t in y)


def _split(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def real_local_point(w: QForm, v: Sequence, crossing_dir: Sequence | None = None,
                     eps=Fraction(1, 2**40)) -> tuple[Fraction, ...]:
    """Rational ``y = v + t d`` with ``|w(y)| <= eps * |G| * |y|^2`` (sup norms).

    ``d`` defaults to the gradient direction ``G v``.  The root ``t`` of the
    quadratic in ``t`` with the smallest absolute value is taken (positive on
    ties) and approximated by dyadic rationals until the bound holds.
    """
    v = as_vector(v)
    eps = as_rat(eps)
    wv = evaluate(w, v)
    if wv == 0:
        return v
    gmax = max(abs(x) for row in w.gram for x in row)
    vmax = max(abs(x) for x in v)
    if abs(wv) <= eps * gmax * vmax * vmax:
        return v
    d = as_vector(crossing_dir) if crossing_dir is not None else gram_times(w, v)
    a = evaluate(w, d)
    b = bilinear(w, v, d)
    c = wv
    # w(v + t d) = a t^2 + 2 b t + c
    if a == 0 and b == 0:
        raise NoCrossing("direction does not change the value")
    disc = b * b - a * c
    if disc < 0:
        raise NoCrossing("no sign change along the chosen direction")
    bits = 64
    for _ in range(40):
        if a == 0:
            t = -c / (2 * b)
        else:
            r = _sqrt_approx(disc, bits)
            # cancellation-free forms of the two roots
            sb = 1 if b >= 0 else -1
            big = -(b + sb * r)
            cands = [big / a] + ([c / big] if big != 0 else [])
            cands.sort(key=lambda q: (abs(q), -q))
            t = cands[0]
        y = tuple(x + t * dx for x, dx in zip(v, d))
        ymax = max(abs(x) for x in y)
        if abs(evaluate(w, y)) <= eps * gmax * ymax * ymax:
            return y
        bits *= 2
    raise NoCrossing("could not reach the requested real precision")


def _sqrt_approx(x: Fraction, bits: int) -> Fraction:
    """Dyadic approximation of ``sqrt(x)`` with relative error about ``2^-bits``."""
    if x == 0:
        return Fraction(0)
    e = max(0, bits - (x.numerator.bit_length() - x.denominator.bit_length()) // 2)
    D = 1 << e
    return Fraction(isqrt(x.numerator * D * D // x.denominator), D)


# ---------------------------------------------------- simultaneous approx

def _crt_data(targets):
    """Common p-power denominator ``D``, modulus ``M`` and CRT residues of ``D u_p``."""
    D = 1
    for place, value, prec in targets:
        if place != INF:
            e = max(0, -val(Fraction(value), place)) if Fraction(value) != 0 else 0
            D *= place**e
    M = 1
    residues = []
    for place, value, prec in targets:
        if place == INF:
            continue
        p = place
        e = val(Fraction(D), p)
        mod = p ** (int(prec) + e)
        residues.append((padic_int(Fraction(value) * D, p, int(prec) + e) % mod, mod))
        M *= mod
    return D, M, residues


def _check_places(targets):
    seen = set()
    for place, _, prec in targets:
        check_place(place)
        if place == INF and not Fraction(prec) > 0:
            raise ValueError("real precision must be positive")
        if place != INF and (int(prec) != prec or prec < 0):
            raise ValueError(f"precision at {place} must be a nonnegative integer")
        if place in seen:
            raise ValueError(f"duplicate target place {place}")
        seen.add(place)


def _crt(residues) -> int:
    a, m = 0, 1
    for r, mod in residues:
        t = (r - a) * pow(m, -1, mod) % mod
        a, m = a + m * t, m * mod
    return a


def _smallest_coprime(lower: Fraction, M: int) -> int:
    q = max(1, -((-lower.numerator) // lower.denominator))
    while gcd(q, M) != 1:
        q += 1
    return q


def _round_half_up(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def simultaneous_approx(targets: Sequence[tuple]) -> Fraction:
    """Rational ``u`` close to every ``(place, value, precision)`` target.

    Finite places need ``val_p(u - value) >= k``; the real place needs
    ``|u - value| <= eps``.  Built as ``a + M r / q`` from the CRT residue
    ``a mod M`` with ``q >= M / (2 eps)`` coprime to ``M``.
    """
    targets = [(check_place(pl), Fraction(v), pr) for pl, v, pr in targets]
    _check_places(targets)
    finite = [t for t in targets if t[0] != INF]
    real = [t for t in targets if t[0] == INF]
    if not real and len(finite) == 1:
        return finite[0][1]
    if not finite and not real:
        return Fraction(0)
    return simultaneous_approx_vector([(pl, (v,), pr) for pl, v, pr in targets])[0]


def simultaneous_approx_vector(targets: Sequence[tuple]) -> tuple[Fraction, ...]:
    """Vector version with one shared denominator ``q`` for every coordinate."""
    targets = [(check_place(pl), tuple(Fraction(x) for x in v), pr) for pl, v, pr in targets]
    _check_places(targets)
    n = len(targets[0][1])
    finite = [t for t in targets if t[0] != INF]
    real = [t for t in targets if t[0] == INF]
    if not finite and not real:
        return tuple(Fraction(0) for _ in range(n))
    # common p-power denominator across coordinates
    D = 1
    for place, vec, prec in finite:
        e = max([0] + [-val(x, place) for x in vec if x != 0])
        D *= place**e
    mods = []
    for place, vec, prec in finite:
        e = val(Fraction(D), place)
        mods.append((place, place ** (int(prec) + e)))
    M = 1
    for _, m in mods:
        M *= m
    a = []
    for i in range(n):
        res = []
        for (place, vec, prec), (_, mod) in zip(finite, mods):
            res.append((padic_int(vec[i] * D, place, _val_exp(mod, place)), mod))
        a.append(_crt(res))
    if not real:
        return tuple(Fraction(x, D) for x in a)
    _, uinf, eps = real[0]
    eps = Fraction(eps) * D
    # q must be a unit at every finite place, including those with k = 0
    q = _smallest_coprime(Fraction(M) / (2 * eps), M * prod(pl for pl, _, _ in finite))
    out = []
    for i in range(n):
        r = _round_half_up((uinf[i] * D - a[i]) * q / M)
        out.append((a[i] + Fraction(M * r, q)) / D)
    return tuple(out)


def _val_exp(mod: int, p: int) -> int:
    e = 0
    while mod % p == 0:
        mod //= p
        e += 1
    return e


# --------------------------------------------------------------- driver

@dataclass
class QuadricApproximation:
    x: tuple  # primitive integer coordinates on the quadric
    ambient: tuple  # embedded point (equals x without an embedding)
    distances: dict
    z0: tuple
    rounds: int
    trace: list = field(default_factory=list)


def _embed(B, x):
    if B is None:
        return tuple(x)
    return tuple(sum(B[r][c] * x[c] for c in range(len(x))) for r in range(len(B)))


def _z0_score(w: QForm, z: Sequence, points) -> float:
    """Smaller is better: how close ``b(z, y_s)`` is to vanishing at each place."""
    score = 0.0
    for place, y in points:
        b = bilinear(w, z, y)
        if b == 0:
            return float("inf")
        if place == INF:
            with mpmath.workdps(30):
                zb = mpmath.sqrt(mpmath.fsum(_mp(t) ** 2 for t in z))
                yb = mpmath.sqrt(mpmath.fsum(_mp(t) ** 2 for t in y))
                g = max(abs(x) for row in w.gram for x in row)
                rel = abs(_mp(b)) / (zb * yb * _mp(g))
                score += float(-mpmath.log(rel, 2)) / 8
        else:
            zp = p_primitive(z, place)
            yp = p_primitive(y, place)
            score += val(bilinear(w, zp, yp), place)
    return score


def choose_z0(w: QForm, z0: Sequence, points, seed: int = 0, candidates: int = 12) -> tuple:
    """Pick a chart centre among ``z0`` and a few of its images under the chart."""
    rng = random.Random(seed)
    best = (_z0_score(w, z0, points), tuple(z0))
    n = len(z0)
    for _ in range(candidates):
        u = [rng.randint(-2, 2) for _ in range(n)]
        try:
            z = primitive_integer(parametrize(w, z0, u))
        except DegenerateChart:
            continue
        s = _z0_score(w, z, points)
        if s < best[0]:
            best = (s, tuple(z))
    if best[0] == float("inf"):
        raise DegenerateChart("every chart centre is tangent to a target")
    return best[1]


def _refine_local(w: QForm, place, y, level):
    if place == INF:
        return real_local_point(w, y, eps=level)
    return hensel_local_point(w, y, place, level)


def approximate_on_quadric(w: QForm, targets: Sequence[LocalTarget], *, seed: int = 0,
                           z0: Sequence | None = None, embedding=None,
                           local_points: dict | None = None,
                           rounds: int = RETRY_ROUNDS) -> QuadricApproximation:
    """Exact rational zero of ``w`` within every target's precision.

    With ``embedding`` (an ``N x d`` integer matrix) the targets live in the
    ambient space and distances are measured after embedding; the caller then
    supplies ``local_points`` (place -> local point in ``w``'s coordinates).
    """
    p_, q_, _ = inertia(w)
    if p_ == 0 or q_ == 0:
        from .errors import NotGloballySoluble
        raise NotGloballySoluble(INF, "form is definite")
    targets = list(targets)
    places = [t.place for t in targets]
    if len(set(places)) != len(places):
        raise ValueError("duplicate target places")
    if embedding is None and local_points is None:
        local_points = {t.place: t.point for t in targets}
    base = tuple(z0) if z0 is not None else nonsingular_isotropic(w, seed=seed)
    n = w.dim
    # internal precisions, doubled / halved per round
    kin = {t.place: t.k + SAFETY_DIGITS for t in targets if t.place != INF}
    ein = {t.place: t.eps * SAFETY_EPS for t in targets if t.place == INF}
    trace = []
    for rnd in range(rounds + 1):
        pts = []
        for t in targets:
            y = local_points[t.place]
            if t.place == INF:
                y = _refine_local(w, INF, y, ein[INF] ** 2 / 4)
            else:
                y = _refine_local(w, t.place, y, 2 * kin[t.place] + 4)
            pts.append((t.place, y))
            good, d = within(t, _embed(embedding, y))
            if not good:
                raise PrecisionExhausted(
                    f"target at {t.place} is not within its precision of a local point "
                    f"(nearest refinement at distance {float(d):.3g})", trace)
        zc = choose_z0(w, base, pts, seed=seed + rnd)
        # param(z0, .) is homogeneous and invariant under u -> u + t z0, so a
        # unit-size multiple of each local point is its own chart preimage
        ap_targets = []
        for place, y in pts:
            if place == INF:
                un = _unit_real(y)
                e = ein[INF] / _real_embedding_gain(embedding, un)
                ap_targets.append((INF, un, _real_chart_eps(w, zc, un, e)))
            else:
                un = p_primitive(y, place)
                k = kin[place] + _padic_embedding_loss(embedding, un, place)
                ap_targets.append((place, un, _padic_chart_k(w, zc, un, place, k)))
        try:
            u = simultaneous_approx_vector(ap_targets)
            x = primitive_integer(parametrize(w, zc, u))
        except DegenerateChart as exc:
            trace.append(f"round {rnd}: {exc}")
            _tighten(kin, ein)
            continue
        if evaluate(w, x) != 0:
            raise ArithmeticError("chart image failed exact verification")
        amb = _embed(embedding, x)
        dists = {}
        ok = True
        for t in targets:
            good, d = within(t, amb)
            dists[t.place] = d
            ok = ok and good
        trace.append(f"round {rnd}: distances {[(str(k), float(v)) for k, v in dists.items()]}")
        if ok:
            return QuadricApproximation(tuple(x), tuple(primitive_integer(amb)), dists, zc, rnd, trace)
        _tighten(kin, ein)
    raise PrecisionExhausted("target precision not reached after retries", trace)


def _unit_real(y) -> tuple[Fraction, ...]:
    """``y`` scaled by a power of two so the largest entry lies in ``[1, 2)``."""
    m = max(abs(t) for t in y)
    e = m.numerator.bit_length() - m.denominator.bit_length()
    s = Fraction(1, 2**e) if e >= 0 else Fraction(2**-e)
    return tuple(t * s for t in y)


def _real_embedding_gain(B, y) -> Fraction:
    """Bound on how much the embedding can stretch real distances near ``y`` (>= 1)."""
    if B is None:
        return Fraction(1)
    N = len(B)
    with mpmath.workdps(30):
        cols = [max(abs(_mp(B[r][c])) for r in range(N)) for c in range(len(y))]
        By = max(abs(_mp(t)) for t in _embed(B, y))
        ym = max(abs(_mp(t)) for t in y)
        g = 2 * mpmath.sqrt(N) * mpmath.fsum(cols) * ym / By
        g = Fraction(str(mpmath.nstr(g, 15))) * Fraction(1001, 1000)
    return max(Fraction(1), g)


def _padic_embedding_loss(B, y, p: int) -> int:
    """Digits lost when the p-primitive ``y`` is embedded (its image may be divisible by p)."""
    if B is None:
        return 0
    Bs = [x for row in B for x in row if x != 0]
    return max(0, min(val(t, p) for t in _embed(B, y)) - min(val(x, p) for x in Bs))


def _tighten(kin: dict, ein: dict):
    for p in kin:
        kin[p] *= 2
    for p in ein:
        ein[p] /= 2


def _padic_chart_k(w: QForm, z0, u, p: int, k: int) -> int:
    """p-adic precision for chart coordinates so the image agrees to ``p^-k``."""
    x = parametrize(w, z0, u)
    cx = min(val(t, p) for t in x)
    cu = min(val(t, p) for t in u if t != 0)
    cz = min(val(t, p) for t in z0 if t != 0)
    g = min(val(t, p) for row in w.gram for t in row if t != 0)
    loss = cx - min(0, 2 * cu) - min(0, cz + g) - min(0, cu)
    return int(k + max(0, loss) + 1)


def _real_chart_eps(w: QForm, z0, u, eps: Fraction) -> Fraction:
    """Real chart precision from a float estimate of the chart's local Lipschitz constant."""
    with mpmath.workdps(40):
        Z = [_mp(t) for t in z0]
        U = [_mp(t) for t in u]
        G = [[_mp(t) for t in row] for row in w.gram]
        n = len(U)
        GU = [mpmath.fsum(G[i][j] * U[j] for j in range(n)) for i in range(n)]
        GZ = [mpmath.fsum(G[i][j] * Z[j] for j in range(n)) for i in range(n)]
        wu = mpmath.fsum(U[i] * GU[i] for i in range(n))
        bzu = mpmath.fsum(Z[i] * GU[i] for i in range(n))
        X = [wu * Z[i] - 2 * bzu * U[i] for i in range(n)]
        xn = max(abs(t) for t in X)
        # |dx| <= (2|GU||Z| + 2|GZ||U| + 2|bzu|) |du| in sup norms, crude but safe
        lip = (2 * max(abs(t) for t in GU) * max(abs(t) for t in Z) * n
               + 2 * max(abs(t) for t in GZ) * max(abs(t) for t in U) * n + 2 * abs(bzu))
        if xn == 0 or lip == 0:
            return eps
        r = eps * Fraction(1, 4) * Fraction(str(mpmath.nstr(xn / lip, 15)))
    return max(r, Fraction(1, 2**400))
