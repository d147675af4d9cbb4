"""Pure-Python bounded isotropic search (reference twin of ``_kernels.pyx``)."""

from __future__ import annotations

from itertools import product
from math import isqrt


def box_search(G, H: int):
    """Lexicographically smallest canonical ``x`` in ``[-H, H]^k`` with ``x^T G x = 0``.

    Canonical means nonzero with first nonzero entry positive.  The last
    coordinate is solved from the quadratic, the others enumerated.
    Returns a tuple or None.
    """
    k = len(G)
    G = [[int(x) for x in row] for row in G]
    if k == 1:
        return (1,) if G[0][0] == 0 else None
    a = G[k - 1][k - 1]
    last = G[k - 1]
    for xs in product(range(-H, H + 1), repeat=k - 1):
        lead = 0
        for x in xs:
            if x:
                lead = x
                break
        if lead < 0:
            continue
        b = 0
        c = 0
        for i in range(k - 1):
            xi = xs[i]
            if xi:
                b += last[i] * xi
                row = G[i]
                s = 0
                for j in range(k - 1):
                    s += row[j] * xs[j]
                c += xi * s
        for t in _roots(a, b, c, H):
            if lead == 0 and t <= 0:
                continue
            return xs + (t,)
    return None


def _roots(a: int, b: int, c: int, H: int):
    """Integer roots ``t`` in ``[-H, H]`` of ``a t^2 + 2 b t + c``, ascending."""
    if a == 0:
        if b == 0:
            return range(-H, H + 1) if c == 0 else ()
        num = -c
        den = 2 * b
        if num % den == 0:
            t = num // den
            if -H <= t <= H:
                return (t,)
        return ()
    D = b * b - a * c
    if D < 0:
        return ()
    s = isqrt(D)
    if s * s != D:
        return ()
    out = set()
    for num in (-b - s, -b + s):
        if num % a == 0:
            t = num // a
            if -H <= t <= H:
                out.add(t)
    return sorted(out)
