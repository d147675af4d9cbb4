"""Lattice reduction helpers built on FLINT's LLL."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np
from flint import fmpz_mat

from .forms import rank


def _to_int_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def mat_to_lists(M: fmpz_mat) -> list[list[int]]:
    return [[int(M[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]


def lll_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """LLL-reduce the lattice spanned by the (independent) integer rows."""
    if not rows:
        return []
    return mat_to_lists(fmpz_mat([list(map(int, r)) for r in rows]).lll())


def lll_gram(G: Sequence[Sequence[int]]) -> list[list[int]]:
    """Unimodular ``T`` such that ``T G T^T`` is LLL-reduced (``G`` positive definite)."""
    _, T = fmpz_mat([list(map(int, r)) for r in G]).lll(transform=True, rep="gram")
    return mat_to_lists(T)


def integer_kernel(rows: Sequence[Sequence], ncols: int) -> list[list[int]]:
    """LLL-reduced basis of the lattice ``{x in Z^N : A x = 0}``.

    Embeds ``[I | K A^T]`` and reduces; vectors with zero tail form a basis of
    the kernel lattice once the remaining tails are independent.  ``K`` grows
    until that holds.
    """
    if not rows:
        return lll_rows([[int(i == j) for j in range(ncols)] for i in range(ncols)])
    A = _to_int_rows(rows)
    r = rank(A)
    want = ncols - r
    if want == 0:
        return []
    size = max(max(abs(x) for x in row) for row in A)
    shift = max(ncols, size.bit_length() + ncols)
    for _ in range(8):
        K = 1 << shift
        emb = []
        for i in range(ncols):
            emb.append([int(i == j) for j in range(ncols)] + [K * A[a][i] for a in range(len(A))])
        red = lll_rows(emb)
        kern = [row[:ncols] for row in red if all(x == 0 for x in row[ncols:])]
        rest = [row[ncols:] for row in red if any(x != 0 for x in row[ncols:])]
        if len(kern) == want and rank(rest) == r:
            for v in kern:
                for row in A:
                    if sum(a * x for a, x in zip(row, v)) != 0:
                        raise ArithmeticError("kernel vector failed verification")
            return kern
        shift *= 2
    raise ArithmeticError("integer kernel did not stabilise")


def majorant(G: Sequence[Sequence[int]], scale_bits: int = 40) -> list[list[int]]:
    """Positive definite integer matrix comparable to ``|G|`` (absolute spectrum)."""
    top = max((abs(int(x)).bit_length() for r in G for x in r), default=0)
    D = 2 ** max(0, top - 900)  # keep the float conversion in range
    A = np.array([[int(x) / D for x in r] for r in G])
    s = np.max(np.abs(A))
    if s == 0:
        return [[int(i == j) for j in range(len(G))] for i in range(len(G))]
    A = A / s
    lam, V = np.linalg.eigh(A)
    P = (V * np.abs(lam)) @ V.T
    d = len(G)
    P = P + np.eye(d) * (2.0 ** (-scale_bits // 2))
    M = np.rint(P * 2.0**scale_bits)
    out = [[int(M[i, j]) for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(i):
            out[i][j] = out[j][i]
    for i in range(d):
        out[i][i] += d  # keep it safely positive definite after rounding
    return out


def reduce_indefinite(G: Sequence[Sequence[int]], rounds: int = 3) -> tuple[list[list[int]], list[list[int]]]:
    """Heuristic reduction of an indefinite integer Gram matrix.

    Returns ``(T, G')`` with ``T`` unimodular and ``G' = T G T^T``.  Each round
    LLL-reduces against a majorant of the current matrix.
    """
    d = len(G)
    T = [[int(i == j) for j in range(d)] for i in range(d)]
    cur = [list(map(int, r)) for r in G]
    for _ in range(rounds):
        U = lll_gram(majorant(cur))
        Uf = fmpz_mat(U)
        new = mat_to_lists(Uf * fmpz_mat(cur) * Uf.transpose())
        T = mat_to_lists(Uf * fmpz_mat(T))
        if new == cur:
            break
        cur = new
    return T, cur
