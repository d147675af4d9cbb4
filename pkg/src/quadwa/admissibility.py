"""m-admissibility of systems of real quadratic forms: thresholds, certificates, generators.

A system is m-admissible over R when every nonzero combination has at least
``m`` positive and ``m`` negative eigenvalues.  ``certify_real`` samples the
coefficient space on a grid and uses Weyl's perturbation bound to extend the
exact inertia counts at the grid points to the whole space.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Sequence

import numpy as np
from flint import fmpq, fmpq_poly, fmpz_mat

from .forms import (FormSystem, QForm, Subspace, as_rat, form_rank, inertia, inertia_int,
                    restrict_system)

CERTIFIED = "Certified"
REFUTED = "Refuted"
INCONCLUSIVE = "Inconclusive"

DEFAULT_RESOLUTION = 4  # grid intervals per face edge, doubled on demand
MAX_SAMPLES = 16384
GENERATOR_SAMPLES = 1 << 17


@dataclass(frozen=True)
class Thresholds:
    n: int
    f: int
    g: int


def thresholds(n: int) -> Thresholds:
    """``f(n) = 2n^2 + 2n - 1`` (weak approximation) and ``g(n) = n^2 - n + 1`` (surjectivity)."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    return Thresholds(n, 2 * n * n + 2 * n - 1, n * n - n + 1)


@dataclass
class AdmissCert:
    m: int
    verdict: str
    delta: Fraction = Fraction(0)
    covering_radius: Fraction = Fraction(0)
    lipschitz_bound: Fraction = Fraction(0)
    samples: int = 0
    resolution: int = 0
    witness: tuple | None = None
    note: str = ""
    margins: tuple = field(default=())

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def check(self) -> bool:
        """Internal consistency of the certificate fields."""
        if self.verdict == CERTIFIED:
            return self.delta > self.covering_radius * self.lipschitz_bound
        if self.verdict == REFUTED:
            return self.witness is not None and any(self.witness)
        return True


def _spectral_bound(w: QForm) -> Fraction:
    """Rational upper bound on the spectral norm: min(max row sum, ceil of Frobenius norm)."""
    rows = [sum(abs(x) for x in row) for row in w.gram]
    rowmax = max(rows) if rows else Fraction(0)
    fro2 = sum(x * x for row in w.gram for x in row)
    if fro2 == 0:
        return Fraction(0)
    # ceil(sqrt(fro2)) to 1/1024
    s = Fraction(isqrt(fro2.numerator * 1024**2 // fro2.denominator) + 1, 1024)
    return min(rowmax, s)


class _IntSystem:
    """Integer Gram matrices ``D0 * G_a`` for fast exact inertia of shifted combinations."""

    def __init__(self, W: FormSystem):
        den = 1
        for w in W:
            for row in w.gram:
                for x in row:
                    den = lcm(den, x.denominator)
        self.D0 = den
        self.mats = [fmpz_mat([[int(x * den) for x in row] for row in w.gram]) for w in W]
        self.N = W.dim

    def inertia(self, c, shift: Fraction = Fraction(0)) -> tuple[int, int, int]:
        """Inertia of ``G(c) - shift * I``."""
        K = 1
        for x in c:
            K = lcm(K, Fraction(x).denominator)
        K = lcm(K, (shift * self.D0).denominator)
        M = fmpz_mat(self.N, self.N)
        for x, Ma in zip(c, self.mats):
            if x:
                M += Ma * int(Fraction(x) * K)
        t = int(shift * self.D0 * K)
        if t:
            M -= fmpz_mat([[t if i == j else 0 for j in range(self.N)] for i in range(self.N)])
        return inertia_int(M)


def _min_pq(W: FormSystem, c) -> int:
    p, q, _ = inertia(W.combination(c))
    return min(p, q)


def _float_margin(G: np.ndarray, m: int) -> float:
    lam = np.linalg.eigvalsh(G)
    if m > len(lam):
        return -np.inf
    return float(min(lam[-m], -lam[m - 1]))


def lipschitz_bound(W: FormSystem) -> Fraction:
    """``L`` with ``|G(c) - G(c')|_2 <= L |c - c'|_inf`` for ``c, c'`` on one cube face.

    Minimum of two sound bounds: the spectral bound of the entrywise sum
    ``sum_a |G_a|``, and ``(n - 1) max_a |G_a|_2`` (only ``n - 1`` coordinates
    move on a face).
    """
    n = W.n
    N = W.dim
    absum = QForm([[sum(abs(w.gram[i][j]) for w in W) for j in range(N)] for i in range(N)])
    b1 = _spectral_bound(absum)
    b2 = (n - 1) * max(_spectral_bound(w) for w in W)
    return min(b1, b2)


def _initial_cells(n: int, res: int):
    """Cells ``(face, centre, half_width)`` tiling the faces ``c_a = 1`` of ``[-1, 1]^n``.

    With their negatives these cover every direction; ``min(p, q)`` is the same
    for ``G`` and ``-G`` so half the cube surface suffices.
    """
    h = Fraction(1, res)
    ticks = [Fraction(2 * i + 1, res) - 1 for i in range(res)]
    for a in range(n):
        for rest in itertools.product(ticks, repeat=n - 1):
            yield a, tuple(rest), h


def _point(a: int, rest) -> tuple:
    return tuple(rest[:a]) + (Fraction(1),) + tuple(rest[a:])


def certify_real(W: FormSystem, m: int, grid_resolution: int | None = None,
                 witnesses: Sequence[Sequence] = (), max_samples: int = MAX_SAMPLES) -> AdmissCert:
    """Sound three-valued check of m-admissibility over R.

    The cube faces are covered by cells of l-infinity half-width ``h``, refined
    where needed.  A cell is certified when, at its centre ``c``, ``G(c) - delta I``
    has ``>= m`` positive and ``G(c) + delta I`` has ``>= m`` negative
    eigenvalues (exact inertia) with ``delta > h L``; Weyl's inequality then
    covers the whole cell.  Refuted: some supplied or visited ``c`` has
    ``min(p, q) < m`` exactly.  The reported ``delta``/``covering_radius`` are
    those of the tightest cell.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    n = W.n
    for c in witnesses:
        c = tuple(as_rat(x) for x in c)
        if any(c) and _min_pq(W, c) < m:
            return AdmissCert(m, REFUTED, witness=c, samples=0, note="supplied witness")
    if 2 * m > W.dim:
        return AdmissCert(m, REFUTED, witness=(Fraction(1),) + (Fraction(0),) * (n - 1),
                          note="dimension below 2m")
    L = lipschitz_bound(W)
    isys = _IntSystem(W)
    grams = np.array([[[float(x) for x in row] for row in w.gram] for w in W])
    res = int(grid_resolution or DEFAULT_RESOLUTION)
    if n == 1:
        cells = [(0, (), Fraction(0))]
    else:
        cells = list(_initial_cells(n, res))
    samples = 0
    tight = None  # (delta, h)
    worst = np.inf
    finest = Fraction(1, res) if n > 1 else Fraction(0)
    while cells:
        a, rest, h = cells.pop()
        samples += 1
        if samples > max_samples:
            return AdmissCert(m, INCONCLUSIVE, lipschitz_bound=L, covering_radius=finest,
                              samples=samples, resolution=res,
                              note=f"sample budget exhausted; smallest margin {worst:.3g}")
        c = _point(a, rest)
        G = np.tensordot(np.array([float(x) for x in c]), grams, axes=1)
        mu = _float_margin(G, m)
        worst = min(worst, mu)
        if mu <= 1e-9 and _min_pq(W, c) < m:
            return AdmissCert(m, REFUTED, witness=c, samples=samples, resolution=res,
                              lipschitz_bound=L, note="sampled point")
        need = h * L
        if mu > 0 and float(need) < mu / 2:
            if need > 0:
                delta = need * Fraction(9, 8)
            else:
                delta = min(Fraction(1, 2**20), Fraction(mu / 4).limit_denominator(2**30))
            if isys.inertia(c, delta)[0] >= m and isys.inertia(c, -delta)[1] >= m:
                if tight is None or delta < tight[0]:
                    tight = (delta, h)
                continue
        if n == 1:
            break
        h2 = h / 2
        finest = min(finest, h2)
        for signs in itertools.product((-1, 1), repeat=n - 1):
            cells.append((a, tuple(x + s * h2 for x, s in zip(rest, signs)), h2))
    if tight is None or cells:
        return AdmissCert(m, INCONCLUSIVE, lipschitz_bound=L, samples=samples, resolution=res,
                          note=f"smallest sampled margin {worst:.3g}")
    return AdmissCert(m, CERTIFIED, delta=tight[0], covering_radius=tight[1], lipschitz_bound=L,
                      samples=samples, resolution=res, margins=(worst,))


# ------------------------------------------------------------ complex rank

def _minor_det_poly(A: list[list[Fraction]], B: list[list[Fraction]]) -> fmpq_poly:
    """``det(A + t B)`` by exact evaluation and interpolation."""
    k = len(A)
    xs = list(range(k + 1))
    ys = []
    for x in xs:
        M = [[A[i][j] + x * B[i][j] for j in range(k)] for i in range(k)]
        ys.append(_det(M))
    # Lagrange interpolation over Q
    poly = fmpq_poly([0])
    for i, xi in enumerate(xs):
        term = fmpq_poly([fmpq(ys[i].numerator, ys[i].denominator)])
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                term *= fmpq_poly([-xj, 1])
                denom *= xi - xj
        poly += term * fmpq(denom.denominator, denom.numerator)
    return poly


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return d


def _rank_mod(A, B, f: fmpq_poly) -> int:
    """Rank of ``A + t B`` over ``Q[t]/(f)`` for irreducible ``f``."""
    rows = [[fmpq_poly([fmpq(a.numerator, a.denominator), fmpq(b.numerator, b.denominator)]) % f
             for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
    n, ncols = len(rows), len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, n) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        g, inv, _ = rows[r][c].xgcd(f)
        inv = inv * fmpq_poly([1 / g[0]]) if g.degree() == 0 else inv
        for i in range(r + 1, n):
            if not rows[i][c].is_zero():
                fac = (rows[i][c] * inv) % f
                rows[i] = [(x - fac * y) % f for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == n:
            break
    return r


def min_rank_complex(W: FormSystem, heuristic: bool = False, samples: int = 64,
                     seed: int = 0) -> int:
    """Minimum rank over C of the nonzero forms in ``W``.

    Exact for ``n <= 2`` (pencil: rank drops at roots of compressed minors).
    For ``n >= 3`` only ``heuristic=True`` is allowed and the result is a
    sampled upper bound, not a certificate.
    """
    n = W.n
    if n >= 3 and not heuristic:
        raise ValueError("exact complex rank needs n <= 2; pass heuristic=True for a sampled bound")
    if heuristic:
        rng = random.Random(seed)
        best = min(form_rank(w) for w in W)
        for _ in range(samples):
            c = [rng.randint(-50, 50) for _ in range(n)]
            if any(c):
                best = min(best, form_rank(W.combination(c)))
        return best
    if n == 1:
        return form_rank(W[0])
    A = [list(r) for r in W[0].gram]
    B = [list(r) for r in W[1].gram]
    best = min(form_rank(W[0]), form_rank(W[1]))
    N = len(A)
    rng = random.Random(seed)
    generic = form_rank(QForm([[a + 7 * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]))
    generic = max(generic, form_rank(QForm([[a - 11 * b for a, b in zip(ra, rb)]
                                            for ra, rb in zip(A, B)])))
    if generic == 0:
        return 0
    # two random compressions to generic x generic; their gcd cuts out the drop locus
    polys = []
    for _ in range(2):
        P = [[Fraction(rng.randint(-9, 9)) for _ in range(N)] for _ in range(generic)]
        Q = [[Fraction(rng.randint(-9, 9)) for _ in range(generic)] for _ in range(N)]
        PA = _compress(P, A, Q)
        PB = _compress(P, B, Q)
        polys.append(_minor_det_poly(PA, PB))
    g = polys[0].gcd(polys[1])
    if g.degree() > 0:
        _, facs = g.factor()
        for f, _ in facs:
            if f.degree() == 1:
                t = -f.coeffs()[0] / f.coeffs()[1]
                t = Fraction(int(t.p), int(t.q))
                best = min(best, form_rank(QForm([[a + t * b for a, b in zip(ra, rb)]
                                                  for ra, rb in zip(A, B)])))
            else:
                best = min(best, _rank_mod(A, B, f))
    return min(best, generic)


def _compress(P, A, Q):
    PA = [[sum(P[i][k] * A[k][j] for k in range(len(A))) for j in range(len(A))]
          for i in range(len(P))]
    return [[sum(PA[i][k] * Q[k][j] for k in range(len(Q))) for j in range(len(Q[0]))]
            for i in range(len(P))]


# --------------------------------------------------------------- generator

def hyperbolic_block(r: int, j: int) -> list[list[Fraction]]:
    """Gram matrix of ``x_{2j} x_{2j+1}`` on ``2r`` variables."""
    G = [[Fraction(0)] * (2 * r) for _ in range(2 * r)]
    G[2 * j][2 * j + 1] = G[2 * j + 1][2 * j] = Fraction(1, 2)
    return G


SPREAD_SCALE = 8


def _primitive_row(v) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return [int(x) // g for x in v] if g else [int(x) for x in v]


def _spread_functionals(r: int, n: int, rng: random.Random | None) -> list[list[int]]:
    """``r`` integer directions spread over projective space, so margins stay large.

    n = 2: angles ``phi + j pi / r`` with slopes rounded to denominators <= 8
    (``r = 4`` gives (1,0), (1,1), (0,1), (-1,1)).  n = 3: a Fibonacci lattice
    on the upper hemisphere.  Larger n: Gaussian directions.  A seeded
    generator rotates the configuration.
    """
    if n == 1:
        return [[1] for _ in range(r)]
    rows = []
    if n == 2:
        phi = rng.random() * math.pi / r if rng else 0.0
        for j in range(r):
            th = phi + j * math.pi / r
            c, s_ = math.cos(th), math.sin(th)
            if abs(c) >= abs(s_):
                q = Fraction(s_ / c).limit_denominator(SPREAD_SCALE)
                rows.append([q.denominator, q.numerator])
            else:
                q = Fraction(c / s_).limit_denominator(SPREAD_SCALE)
                rows.append([q.numerator, q.denominator])
        return rows
    if n == 3:
        golden = math.pi * (3 - math.sqrt(5))
        pts = []
        for i in range(r):
            z = 1 - (i + 0.5) / r
            rad = math.sqrt(1 - z * z)
            pts.append([rad * math.cos(golden * i), rad * math.sin(golden * i), z])
        P = np.array(pts)
    else:
        g = np.random.default_rng(0 if rng is None else rng.randrange(2**32))
        P = g.standard_normal((r, n))
        P /= np.linalg.norm(P, axis=1, keepdims=True)
    if rng is not None and n >= 3:
        Q, _ = np.linalg.qr(np.random.default_rng(rng.randrange(2**32)).standard_normal((n, n)))
        P = P @ Q.T
    for u in P:
        rows.append(_primitive_row(np.rint(SPREAD_SCALE * u).astype(int)))
    return rows


def _general_position(lam: list[list[int]], n: int) -> bool:
    for idx in itertools.combinations(range(len(lam)), n):
        if _det([[Fraction(lam[i][a]) for a in range(n)] for i in idx]) == 0:
            return False
    return True


def generate_admissible(n: int, m: int, seed: int = 0) -> tuple[FormSystem, AdmissCert]:
    """``n`` forms on ``2r`` variables (``r = m + n - 1`` hyperbolic blocks), m-admissible by construction.

    ``w_a = sum_j lambda_{j,a} x_{2j} x_{2j+1}`` with every ``n`` of the
    functionals ``lambda_j`` independent, so a nonzero combination kills at
    most ``n - 1`` blocks.  Seed 0 gives the unrotated configuration.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    r = m + n - 1
    rng = random.Random(seed)
    lam = _spread_functionals(r, n, rng if seed else None)
    while not _general_position(lam, n):
        # rounding collapsed some directions: nudge a random entry
        j = rng.randrange(r)
        lam[j][rng.randrange(n)] += rng.choice((-1, 1))
    forms = []
    for a in range(n):
        G = [[Fraction(0)] * (2 * r) for _ in range(2 * r)]
        for j in range(r):
            G[2 * j][2 * j + 1] = G[2 * j + 1][2 * j] = Fraction(lam[j][a], 2)
        forms.append(QForm(G))
    W = FormSystem(forms)
    cert = certify_real(W, m, max_samples=GENERATOR_SAMPLES)
    if not cert.certified:
        raise ArithmeticError(f"generated system failed certification: {cert.verdict}")
    cert.note = "block construction; functionals " + repr(lam)
    return W, cert


def lemma3_check(W: FormSystem, cert: AdmissCert, S: Subspace,
                 max_samples: int = MAX_SAMPLES) -> AdmissCert:
    """Certify the restriction to ``S`` (codimension ``d``) at level ``m - d``."""
    d = S.codim
    if not cert.certified:
        raise ValueError("input certificate must be Certified")
    if cert.m <= d:
        raise ValueError("restriction needs m > codimension")
    R, injective = restrict_system(W, S)
    if not injective:
        # a nonzero combination restricts to zero: min(p, q) = 0
        from .forms import kernel
        vecs = [R[a].entries_vector() for a in range(R.n)]
        ker = kernel([[vecs[a][i] for a in range(R.n)] for i in range(len(vecs[0]))], R.n)
        return AdmissCert(cert.m - d, REFUTED, witness=tuple(Fraction(x) for x in ker[0]),
                          note="restriction not injective")
    return certify_real(R, cert.m - d, max_samples=max_samples)


__all__ = ["Thresholds", "thresholds", "AdmissCert", "certify_real", "min_rank_complex",
           "generate_admissible", "lemma3_check", "CERTIFIED", "REFUTED", "INCONCLUSIVE"]
