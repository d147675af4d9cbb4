"""Elementary number theory on Python integers and rationals."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, prod

from flint import fmpz
from sympy import isprime
from sympy.ntheory import sqrt_mod

INF = "inf"


def is_place(s) -> bool:
    return s == INF or (isinstance(s, int) and s >= 2 and isprime(s))


def check_place(s):
    if s == INF:
        return s
    if isinstance(s, bool) or not isinstance(s, int) or s < 2 or not isprime(s):
        raise ValueError(f"not a place of Q: {s!r}")
    return s


def val(x, p: int) -> int | float:
    """p-adic valuation of an integer or rational; +inf for zero."""
    if isinstance(x, Fraction):
        if x == 0:
            return float("inf")
        return val(x.numerator, p) - val(x.denominator, p)
    x = int(x)
    if x == 0:
        return float("inf")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def unit_part(x: int, p: int) -> tuple[int, int]:
    """Return ``(v, u)`` with ``x = p^v u`` and ``p`` not dividing ``u``."""
    if x == 0:
        raise ValueError("zero has no unit part")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def vec_val(v, p: int):
    return min(val(x, p) for x in v)


def padic_residue(x, p: int, k: int) -> Fraction:
    """Rational ``r`` with ``val(x - r) >= k`` and ``r = a / p^e``, ``0 <= a < p^(k+e)``.

    ``e = max(0, -val(x))`` so the representative is small.
    """
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    e = max(0, -val(x, p))
    y = x * p**e  # p-integral
    mod = p ** (k + e)
    a = y.numerator * pow(y.denominator, -1, mod) % mod if k + e > 0 else 0
    return Fraction(a, p**e)


def padic_int(x, p: int, k: int) -> int:
    """Integer congruent to the p-integral rational ``x`` modulo ``p^k``."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError("not p-integral")
    mod = p**k
    return x.numerator * pow(x.denominator, -1, mod) % mod


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of ``a`` modulo the prime ``p`` or None."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if fmpz(a).jacobi(fmpz(p)) != 1:
        return None
    r = fmpz(a).sqrtmod(fmpz(p))
    return int(r)


def sqrt_mod_squarefree(a: int, primes) -> int | None:
    """Square root of ``a`` modulo the squarefree product of ``primes`` (CRT)."""
    m = prod(primes)
    if m == 1:
        return 0
    r = 0
    for p in primes:
        s = sqrt_mod_prime(a, p)
        if s is None:
            return None
        q = m // p
        r = (r + s * q * pow(q, -1, p)) % m
    return r


def easy_factor(n: int, bits: int = 24) -> dict[int, int] | None:
    """Factor ``|n|`` if it is a smooth part times at most one large prime.

    Uses trial division / ECM up to ``bits`` bits; the leftover cofactor must
    be a probable prime.  Returns None otherwise.  Sign is dropped.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor zero")
    if n == 1:
        return {}
    fac = fmpz(n).factor_smooth(bits=bits)
    out: dict[int, int] = {}
    for q, e in fac:
        q = int(q)
        if q.bit_length() > bits and not fmpz(q).is_probable_prime():
            return None
        out[q] = out.get(q, 0) + int(e)
    return out


def full_factor(n: int) -> dict[int, int]:
    n = abs(int(n))
    return {int(q): int(e) for q, e in fmpz(n).factor()}


def squarefree_decomposition(n: int, fac: dict[int, int]) -> tuple[int, int, list[int]]:
    """Return ``(s, r, primes)`` with ``n = s * r^2``, ``s`` squarefree (signed)."""
    s = -1 if n < 0 else 1
    r = 1
    primes = []
    for q, e in sorted(fac.items()):
        if e % 2:
            s *= q
            primes.append(q)
        r *= q ** (e // 2)
    return s, r, primes


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    """Combine ``x = a1 mod m1`` and ``x = a2 mod m2`` for coprime moduli."""
    if gcd(m1, m2) != 1:
        raise ValueError("moduli not coprime")
    t = (a2 - a1) * pow(m1, -1, m2) % m2
    return a1 + m1 * t, m1 * m2


def rat_sqrt_floor(x: Fraction, denom_bits: int) -> Fraction:
    """Lower dyadic approximation of ``sqrt(x)`` with denominator ``2^denom_bits``."""
    if x < 0:
        raise ValueError("negative")
    D = 1 << denom_bits
    return Fraction(isqrt(int(x * D * D)), D)


def round_rat(x, bits: int) -> Fraction:
    """Round to the nearest multiple of ``2^-bits``."""
    D = 1 << bits
    x = Fraction(x)
    return Fraction(round(x * D), D)


def sqrt_mod_p_power(a: int, p: int, k: int) -> int | None:
    """Square root of the p-unit ``a`` modulo ``p^k`` (odd p) via sympy."""
    r = sqrt_mod(a % p**k, p**k)
    return None if r is None else int(r)
