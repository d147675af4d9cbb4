"""Exact rational isotropic vectors of a single quadratic form.

Search order, each stage verified exactly:

1. radical vectors and isotropic basis vectors;
2. bounded-height box search in the given coordinates;
3. the same search after indefinite lattice reduction;
4. descent on a rank-5 (or rank-3/4) sub-block of the reduced form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .descent import local_obstruction, split_zero, ternary_zero
from .errors import HeightBoundExceeded, NotGloballySoluble
from .forms import (QForm, as_rat, canonical_projective, diagonalize, evaluate, inertia,
                    kernel, primitive_integer, rref)
from .hilbert import diagonal_is_isotropic, hilbert_symbol
from .kernels import box_search, fits_int64
from .lattice import reduce_indefinite
from .nt import INF, check_place

SEARCH_HEIGHTS = (1, 2, 4, 8)
SEARCH_BUDGET = 200_000  # lattice points per box


@dataclass
class SearchStats:
    method: str = ""
    height: int = 0
    boxes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"method": self.method, "height": self.height, "boxes": list(self.boxes)}


def _box_schedule(k: int):
    for H in SEARCH_HEIGHTS:
        if (2 * H + 1) ** (k - 1) <= SEARCH_BUDGET:
            yield H


def _search_block(M, idx, stats: SearchStats, label: str):
    sub = [[M[i][j] for j in idx] for i in idx]
    for H in _box_schedule(len(idx)):
        if not fits_int64(sub, H):
            break  # coefficients too large for small zeros to be likely
        stats.boxes.append([label, len(idx), H])
        y = box_search(sub, H)
        if y is not None:
            stats.method = label
            stats.height = H
            return y
    return None


def _block_signs(M, idx) -> tuple[int, int, int]:
    return inertia(QForm([[M[i][j] for j in idx] for i in idx]))


def _pick_block(M, size: int):
    """First index subset (in lexicographic order) spanning a nondegenerate indefinite block."""
    k = len(M)
    for idx in combinations(range(k), size):
        p, q, z = _block_signs(M, idx)
        if z == 0 and p > 0 and q > 0:
            return idx
    return None


def _finish(w: QForm, x) -> tuple[int, ...]:
    v = canonical_projective(x)
    if evaluate(w, v) != 0:
        raise ArithmeticError("isotropic witness failed verification")
    return v


def find_isotropic(w: QForm, seed: int = 0, stats: SearchStats | None = None) -> tuple[int, ...]:
    """Primitive integer ``v != 0`` with ``w(v) = 0`` (first nonzero entry positive).

    Raises NotGloballySoluble when a local obstruction is found and
    HeightBoundExceeded when every stage gives up.
    """
    stats = stats if stats is not None else SearchStats()
    M, _ = w.integral_gram()
    k = w.dim
    if k == 0:
        raise ValueError("zero-dimensional form")
    rad = kernel(M, k)
    if rad:
        stats.method = "radical"
        return _finish(w, rad[0])
    for i in range(k):
        if M[i][i] == 0:
            stats.method = "basis"
            return _finish(w, [int(j == i) for j in range(k)])
    p, q, _ = inertia(w)
    if p == 0 or q == 0:
        raise NotGloballySoluble(INF, "form is definite")

    if k <= 6:
        y = _search_block(M, tuple(range(k)), stats, "box")
        if y is not None:
            return _finish(w, y)

    T, R = reduce_indefinite(M)
    for i in range(k):
        if R[i][i] == 0:
            stats.method = "reduced-basis"
            return _finish(w, T[i])
    size = min(k, 5)
    idx = _pick_block(R, size)
    if idx is None:
        idx = tuple(range(k)) if k <= 5 else None
    if idx is not None:
        y = _search_block(R, idx, stats, "box-reduced")
        if y is not None:
            x = [sum(y[a] * T[i][c] for a, i in enumerate(idx)) for c in range(k)]
            return _finish(w, x)

    if idx is None:
        raise HeightBoundExceeded(SEARCH_HEIGHTS[-1], message="no indefinite sub-block found")
    sub = [[R[i][j] for j in idx] for i in idx]
    if len(idx) < 5:
        _, D = diagonalize(QForm(sub))
        bad = local_obstruction([D.gram[i][i] for i in range(len(idx))])
        if bad is not None:
            raise NotGloballySoluble(bad)
    stats.method = "descent"
    if len(idx) == 3:
        ysub = primitive_integer(ternary_zero(sub))
    else:
        ysub = split_zero(sub, seed=seed)
    x = [sum(ysub[a] * T[i][c] for a, i in enumerate(idx)) for c in range(k)]
    return _finish(w, primitive_integer(x))


def nonsingular_isotropic(w: QForm, seed: int = 0, stats: SearchStats | None = None) -> tuple[int, ...]:
    """Isotropic vector outside the radical of ``w``.

    For symmetric ``G``, any set of linearly independent columns indexes a
    nonsingular principal block; a zero of that block is a smooth point.
    """
    M, _ = w.integral_gram()
    if not kernel(M, w.dim):
        return find_isotropic(w, seed=seed, stats=stats)
    _, piv = rref(M)
    block = QForm([[w.gram[i][j] for j in piv] for i in piv])
    y = find_isotropic(block, seed=seed, stats=stats)
    x = [0] * w.dim
    for a, i in enumerate(piv):
        x[i] = y[a]
    return _finish(w, x)


def is_locally_isotropic(w: QForm, p) -> bool:
    """Whether the nondegenerate form ``w`` has a nontrivial zero over Q_p (or R)."""
    check_place(p)
    _, D = diagonalize(w)
    diag = [D.gram[i][i] for i in range(w.dim)]
    if any(d == 0 for d in diag):
        raise ValueError("degenerate form")
    return diagonal_is_isotropic(diag, p)


def represent_value(w: QForm, t, seed: int = 0) -> tuple[Fraction, ...]:
    """Rational ``v`` with ``w(v) = t`` (``t != 0``), via a zero of ``w + <-t>``."""
    t = as_rat(t)
    if t == 0:
        raise ValueError("target value must be nonzero")
    k = w.dim
    rows = [list(r) + [Fraction(0)] for r in w.gram]
    rows.append([Fraction(0)] * k + [-t])
    z = find_isotropic(QForm(rows), seed=seed)
    if z[-1] != 0:
        v = tuple(Fraction(x, z[-1]) for x in z[:-1])
    else:
        # z is isotropic for w: w represents everything along a hyperbolic pair
        x = z[:-1]
        Gx = [sum(g * xi for g, xi in zip(row, x)) for row in w.gram]
        j = next(i for i in range(k) if Gx[i] != 0)
        u = [Fraction(int(i == j)) for i in range(k)]
        s = (t - evaluate(w, u)) / (2 * Gx[j])
        v = tuple(s * xi + ui for xi, ui in zip(x, u))
    if evaluate(w, v) != t:
        raise ArithmeticError("representation failed verification")
    return v


__all__ = ["hilbert_symbol", "is_locally_isotropic", "find_isotropic", "nonsingular_isotropic",
           "represent_value",
           "SearchStats"]
