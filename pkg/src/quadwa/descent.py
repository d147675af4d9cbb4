"""Exact zeros of integer quadratic forms by descent to ternary forms.

Ternary forms are solved with Legendre's lattice method: the congruence
conditions ``a x^2 + b y^2 + c z^2 = 0 (mod abc)`` cut out a lattice of index
``|abc|`` on which the form divided by ``abc`` is unimodular, so a reduced
basis exposes a small zero.

For four or more variables a binary sublattice with easily factored
invariants ``a1, a2`` is kept and its orthogonal complement is collapsed
into a sampled value ``t = -Q(y)``; once ``t`` factors easily and the
ternary ``<a1, a2, -t>`` is locally soluble everywhere, Legendre finishes.
Only ``a1``, ``a2`` and the sampled ``t`` are ever factored.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from flint import fmpz_mat

from .errors import HeightBoundExceeded, NotGloballySoluble
from .hilbert import hilbert_unchecked
from .kernels import box_search, fits_int64
from .lattice import lll_gram, mat_to_lists
from .nt import INF, easy_factor, full_factor, sqrt_mod_squarefree

FACTOR_BITS = 32
FULL_FACTOR_DIGITS = 45


def factor_for_descent(n: int, bits: int = FACTOR_BITS) -> dict[int, int] | None:
    """Factorisation of ``|n|`` if it is cheap to obtain, else None."""
    f = easy_factor(n, bits)
    if f is None and len(str(abs(n))) <= FULL_FACTOR_DIGITS:
        f = full_factor(n)
    return f


def _legendre_core(a: int, b: int, c: int, pa, pb, pc) -> tuple[int, int, int]:
    """Zero of ``a x^2 + b y^2 + c z^2`` for squarefree, pairwise coprime ``a, b, c``.

    ``pa``, ``pb``, ``pc`` are the prime factors of ``|a|``, ``|b|``, ``|c|``.
    """
    if (a > 0) == (b > 0) == (c > 0):
        raise NotGloballySoluble(INF, "ternary form is definite")
    A, B, C = abs(a), abs(b), abs(c)

    def root(num: int, den: int, primes, mod: int) -> int:
        if mod == 1:
            return 0
        r = sqrt_mod_squarefree(num * pow(den, -1, mod) % mod, primes)
        if r is None:
            bad = next(p for p in primes if sqrt_mod_squarefree(num * pow(den, -1, p) % p, [p]) is None)
            raise NotGloballySoluble(bad, "ternary form has no solution modulo this prime")
        return r

    rA = root(-c, b, pa, A)  # y = rA z  (mod A)
    sB = root(-a, c, pb, B)  # z = sB x  (mod B)
    tC = root(-b, a, pc, C)  # x = tC y  (mod C)
    gens = []
    for row in ((1, 0, 0), (0, A, 0), (0, rA, 1)):
        gens.append([B * C * x for x in row])
    for row in ((0, 1, 0), (0, 0, B), (1, 0, sB)):
        gens.append([A * C * x for x in row])
    for row in ((0, 0, 1), (C, 0, 0), (tC, 1, 0)):
        gens.append([A * B * x for x in row])
    H = fmpz_mat(gens).hnf()
    L = [r for r in mat_to_lists(H) if any(r)]
    if len(L) != 3:
        raise ArithmeticError("congruence lattice is degenerate")
    maj = [[sum(L[i][k] * L[j][k] * w for k, w in enumerate((A, B, C))) for j in range(3)]
           for i in range(3)]
    T = lll_gram(maj)
    R = [[sum(T[i][k] * L[k][m] for k in range(3)) for m in range(3)] for i in range(3)]
    coef = (a, b, c)
    Gq = [[sum(R[i][k] * R[j][k] * coef[k] for k in range(3)) for j in range(3)] for i in range(3)]
    abc = A * B * C
    G2 = [[2 * x // abc for x in row] for row in Gq]
    for i in range(3):
        if Gq[i][i] == 0:
            return tuple(R[i])
    for Hb in (1, 2, 4, 8, 16, 32):
        if not fits_int64(G2, Hb):
            break
        y = box_search(G2, Hb)
        if y is not None:
            v = tuple(sum(y[i] * R[i][m] for i in range(3)) for m in range(3))
            return v
    raise HeightBoundExceeded(32, message="no small zero in the reduced congruence lattice")


def legendre(a: int, b: int, c: int, fa: dict, fb: dict, fc: dict) -> tuple[int, int, int]:
    """Nontrivial integer zero of ``a x^2 + b y^2 + c z^2`` given factorisations of |a|, |b|, |c|."""
    coef = [int(a), int(b), int(c)]
    if 0 in coef:
        i = coef.index(0)
        return tuple(int(j == i) for j in range(3))
    facs = [dict(fa), dict(fb), dict(fc)]
    # x_old = scale * x_new, tracked per coordinate
    scale = [Fraction(1)] * 3
    for i in range(3):
        sign = -1 if coef[i] < 0 else 1
        s, r = 1, 1
        nf = {}
        for p, e in facs[i].items():
            if e % 2:
                s *= p
                nf[p] = 1
            r *= p ** (e // 2)
        if s * r * r != abs(coef[i]):
            raise ValueError("factorisation does not match coefficient")
        coef[i] = sign * s
        facs[i] = nf
        scale[i] /= r  # a (x)^2 = s (r x)^2
    while True:
        shared = None
        for i in range(3):
            for j in range(i + 1, 3):
                common = set(facs[i]) & set(facs[j])
                if common:
                    shared = (i, j, min(common))
                    break
            if shared:
                break
        if not shared:
            break
        i, j, p = shared
        k = 3 - i - j
        if p in facs[k]:
            for m in range(3):
                coef[m] //= p
                del facs[m][p]
            continue
        coef[i] //= p
        coef[j] //= p
        del facs[i][p]
        del facs[j][p]
        coef[k] *= p
        facs[k][p] = 1
        scale[k] *= p  # p (a' x^2 + b' y^2) + c z^2 = 0 with z = p z'
    g = gcd(gcd(coef[0], coef[1]), coef[2])
    if g != 1:
        raise ArithmeticError("coefficients not coprime after reduction")
    v = _legendre_core(coef[0], coef[1], coef[2], sorted(facs[0]), sorted(facs[1]), sorted(facs[2]))
    x = [scale[i] * v[i] for i in range(3)]
    den = lcm(*(q.denominator for q in x))
    out = [int(q * den) for q in x]
    g = 0
    for q in out:
        g = gcd(g, q)
    out = tuple(q // g for q in out)
    if a * out[0] ** 2 + b * out[1] ** 2 + c * out[2] ** 2 != 0 or not any(out):
        raise ArithmeticError("Legendre solution failed verification")
    return out


def _ternary_ok(ai: int, aj: int, t: int, primes) -> bool:
    return all(hilbert_unchecked(ai * t, aj * t, p) == 1 for p in primes)


SAMPLE_BITS = 16


def _merge(*facs: dict) -> dict:
    out: dict[int, int] = {}
    for f in facs:
        for p, e in f.items():
            out[p] = out.get(p, 0) + e
    return out


def _qf(M, u) -> int:
    return sum(u[i] * sum(M[i][j] * u[j] for j in range(len(u))) for i in range(len(u)))


def _bf(M, u, v) -> int:
    return sum(u[i] * sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))


def _small_vectors(k: int, rng: random.Random):
    """Basis vectors first, then random small combinations of growing size."""
    for i in range(k):
        yield [int(j == i) for j in range(k)]
    bound = 1
    n = 0
    while True:
        n += 1
        if n % 64 == 0:
            bound += 1
        v = [rng.randint(-bound, bound) for _ in range(k)]
        if any(v):
            yield v


def split_zero(M: Sequence[Sequence[int]], seed: int = 0, max_samples: int = 100000) -> tuple[int, ...]:
    """Nontrivial integer zero of a nondegenerate indefinite integer Gram matrix (k >= 4).

    Picks a binary sublattice ``span(u1, u2)`` whose diagonal invariants
    ``a1 = Q(u1)`` and ``a2 = a1 * det`` factor easily, then samples values
    ``t = -Q(y)`` on its orthogonal complement until ``<a1, a2, -t>`` is
    locally soluble with ``t`` easy to factor.
    """
    from .lattice import integer_kernel

    M = [[int(x) for x in row] for row in M]
    k = len(M)
    if k < 4:
        raise ValueError("split_zero needs at least four variables")
    rng = random.Random(seed)
    gen = _small_vectors(k, rng)
    spent = 0
    while spent < max_samples:
        # binary part
        u1 = a1 = f1 = None
        while spent < max_samples:
            spent += 1
            u = next(gen)
            q = _qf(M, u)
            if q == 0:
                return tuple(u)
            f = easy_factor(q, SAMPLE_BITS)
            if f is not None:
                u1, a1, f1 = u, q, f
                break
        if u1 is None:
            break
        u2 = None
        for _ in range(400):
            spent += 1
            u = next(gen)
            b12 = _bf(M, u1, u)
            D = a1 * _qf(M, u) - b12 * b12
            if D == 0:
                continue
            f = easy_factor(D, SAMPLE_BITS)
            if f is None:
                continue
            u2, fD = u, f
            break
        if u2 is None:
            continue
        b12 = _bf(M, u1, u2)
        w2 = [a1 * x - b12 * y for x, y in zip(u2, u1)]  # orthogonal to u1, Q(w2) = a1 * D
        a2 = _qf(M, w2)
        f2 = _merge(f1, fD)
        if abs(a2) != abs(a1 * D):
            raise ArithmeticError("binary invariants inconsistent")
        cons = [[sum(M[i][j] * u1[j] for j in range(k)) for i in range(k)],
                [sum(M[i][j] * u2[j] for j in range(k)) for i in range(k)]]
        C = integer_kernel(cons, k)
        Mc = [[_bf(M, ci, cj) for cj in C] for ci in C]
        same_sign = (a1 > 0) == (a2 > 0)
        need_pos = a1 > 0  # sign t must take when the binary part is definite
        if same_sign:
            from .forms import QForm, inertia
            p, q, _ = inertia(QForm(Mc))
            # t = -Q(y) must have the binary sign, so Q must take the opposite one
            if (need_pos and q == 0) or (not need_pos and p == 0):
                continue
        base = sorted(set(f1) | set(f2) | {2})
        cgen = _small_vectors(len(C), rng)
        for _ in range(4000):
            spent += 1
            c = next(cgen)
            t = -_qf(Mc, c)
            y = [sum(c[l] * C[l][i] for l in range(len(C))) for i in range(k)]
            if t == 0:
                return tuple(y)
            if same_sign and (t > 0) != need_pos:
                continue
            if not _ternary_ok(a1, a2, t, base):
                continue
            ft = easy_factor(t, SAMPLE_BITS)
            if ft is None:
                continue
            extra = [p for p in ft if p not in base]
            if not _ternary_ok(a1, a2, t, extra):
                continue
            x, yy, z = legendre(a1, a2, -t, f1, f2, ft)
            X = [x * e1 + yy * e2 + z * e3 for e1, e2, e3 in zip(u1, w2, y)]
            if _qf(M, X) != 0 or not any(X):
                raise ArithmeticError("split solution failed verification")
            g = 0
            for v in X:
                g = gcd(g, v)
            return tuple(v // g for v in X)
    raise HeightBoundExceeded(max_samples, message="descent sampling exhausted")


def ternary_zero(M: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    """Rational zero of a nondegenerate integer ternary Gram matrix (factors the invariants)."""
    from .forms import QForm, diagonalize

    P, D = diagonalize(QForm(M))
    diag = [D.gram[i][i] for i in range(3)]
    alphas, ds = zip(*(integer_class(q) for q in diag))
    fs = [factor_for_descent(x) for x in alphas]
    if any(f is None for f in fs):
        raise HeightBoundExceeded(0, message="ternary invariants could not be factored")
    z = legendre(*alphas, *fs)
    y = [Fraction(d * zi) for d, zi in zip(ds, z)]
    return tuple(sum(P[r][c] * y[c] for c in range(3)) for r in range(3))


def integer_class(q: Fraction) -> tuple[int, int]:
    """``(alpha, d)`` with ``q * d^2 = alpha`` integral: ``alpha = num * den``, ``d = den``."""
    q = Fraction(q)
    return q.numerator * q.denominator, q.denominator


def local_obstruction(diag: Sequence[Fraction]) -> object | None:
    """First place where the nondegenerate diagonal form is anisotropic, or None.

    Needs full factorisations; returns None without deciding when they are
    too expensive (only used for rank at most 4).
    """
    from .hilbert import diagonal_is_isotropic

    if not diagonal_is_isotropic(diag, INF):
        return INF
    if len(diag) >= 5:
        return None
    primes = {2}
    for q in diag:
        q = Fraction(q)
        for n in (q.numerator, q.denominator):
            if abs(n) > 1:
                f = factor_for_descent(n)
                if f is None:
                    return None
                primes |= set(f)
    for p in sorted(primes):
        if not diagonal_is_isotropic(diag, p):
            return p
    return None


__all__ = ["legendre", "split_zero", "ternary_zero", "local_obstruction"]
