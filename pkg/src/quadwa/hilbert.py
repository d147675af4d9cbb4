"""Hilbert symbols and local isotropy of rational quadratic forms."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from flint import fmpz

from .nt import INF, check_place, unit_part


def _int_class(a) -> int:
    """Integer in the same square class as the nonzero rational ``a``."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    return a.numerator * a.denominator


def _legendre(u: int, p: int) -> int:
    return int(fmpz(u % p).jacobi(fmpz(p)))


def hilbert_symbol(a, b, p) -> int:
    """``(a, b)_p``: +1 iff ``z^2 = a x^2 + b y^2`` has a nontrivial solution over Q_p.

    ``p`` is a prime or ``"inf"``.
    """
    check_place(p)
    return hilbert_unchecked(a, b, p)


def hilbert_unchecked(a, b, p) -> int:
    """``hilbert_symbol`` without validating that ``p`` is prime."""
    a = _int_class(a)
    b = _int_class(b)
    if p == INF:
        return -1 if (a < 0 and b < 0) else 1
    alpha, u = unit_part(a, p)
    beta, v = unit_part(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_v = ((v * v - 1) // 8) % 2
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= _legendre(u, p)
    if alpha % 2:
        sign *= _legendre(v, p)
    return sign


def is_square_local(a, p) -> bool:
    """Whether the nonzero rational ``a`` is a square in Q_p (or R)."""
    a = _int_class(a)
    if p == INF:
        return a > 0
    v, u = unit_part(a, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _legendre(u, p) == 1


def hasse_invariant(coeffs: Sequence, p) -> int:
    """``prod_{i<j} (a_i, a_j)_p`` for a diagonal form."""
    h = 1
    for i in range(len(coeffs)):
        for j in range(i + 1, len(coeffs)):
            h *= hilbert_unchecked(coeffs[i], coeffs[j], p)
    return h


def diagonal_is_isotropic(coeffs: Sequence, p) -> bool:
    """Local isotropy of the nondegenerate diagonal form ``<a_1, ..., a_r>`` at ``p``."""
    coeffs = [Fraction(c) for c in coeffs]
    if any(c == 0 for c in coeffs):
        return True
    r = len(coeffs)
    if p == INF:
        return any(c > 0 for c in coeffs) and any(c < 0 for c in coeffs)
    if r <= 1:
        return False
    d = Fraction(1)
    for c in coeffs:
        d *= c
    if r == 2:
        return is_square_local(-d, p)
    eps = hasse_invariant(coeffs, p)
    if r == 3:
        return hilbert_unchecked(-1, -d, p) == eps
    if r == 4:
        return (not is_square_local(d, p)) or eps == hilbert_unchecked(-1, -1, p)
    return True


def ternary_is_isotropic(a, b, c, p) -> bool:
    """``a x^2 + b y^2 + c z^2`` has a nontrivial zero over Q_p."""
    return hilbert_unchecked(-Fraction(a) * Fraction(c), -Fraction(b) * Fraction(c), p) == 1
