"""Exact rational quadratic forms.

A quadratic form on Q^N is stored as a symmetric Gram matrix ``G`` with
``w(v) = v^T G v``.  The associated bilinear form is ``b(u, v) = u^T G v``,
so ``w(u + v) = w(u) + w(v) + 2 b(u, v)``.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from flint import fmpz_mat

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


class DimensionError(ValueError):
    pass


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def as_vector(v: Iterable) -> Vector:
    return tuple(as_rat(x) for x in v)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(as_vector(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(A: Sequence[Sequence]) -> Matrix:
    if not A:
        return ()
    return tuple(tuple(col) for col in zip(*A))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def columns_to_matrix(cols: Sequence[Sequence]) -> Matrix:
    """N x d matrix whose columns are the given vectors."""
    return transpose(cols)


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector (sign kept)."""
    v = as_vector(v)
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def canonical_projective(v: Sequence) -> tuple[int, ...]:
    """Primitive integer representative whose first nonzero entry is positive."""
    w = primitive_integer(v)
    for x in w:
        if x:
            if x < 0:
                w = tuple(-y for y in w)
            break
    return w


@dataclass(frozen=True)
class QForm:
    """Quadratic form given by a symmetric rational Gram matrix."""

    gram: Matrix

    def __post_init__(self):
        g = as_matrix(self.gram)
        n = len(g)
        for i, row in enumerate(g):
            if len(row) != n:
                raise DimensionError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QForm":
        entries = as_vector(entries)
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else Fraction(0) for j in range(n))
                         for i in range(n)))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.gram for x in row)

    def integral_gram(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        """Return ``(M, s)`` with ``M = s * gram`` integral and ``s > 0`` minimal."""
        s = 1
        for row in self.gram:
            for x in row:
                s = lcm(s, x.denominator)
        return tuple(tuple(int(x * s) for x in row) for row in self.gram), s

    def entries_vector(self) -> Vector:
        n = self.dim
        return tuple(self.gram[i][j] for i in range(n) for j in range(i, n))

    def __add__(self, other: "QForm") -> "QForm":
        _check(self.dim == other.dim)
        return QForm(tuple(tuple(a + b for a, b in zip(r, s))
                           for r, s in zip(self.gram, other.gram)))

    def scale(self, c) -> "QForm":
        c = as_rat(c)
        return QForm(tuple(tuple(c * a for a in r) for r in self.gram))


def _check(cond: bool, msg: str = "dimension mismatch"):
    if not cond:
        raise DimensionError(msg)


def combine(forms: Sequence[QForm], coeffs: Sequence) -> QForm:
    """The form ``sum_a coeffs[a] * forms[a]``."""
    _check(len(forms) == len(coeffs))
    n = forms[0].dim
    coeffs = as_vector(coeffs)
    rows = []
    for i in range(n):
        rows.append(tuple(sum(c * f.gram[i][j] for c, f in zip(coeffs, forms))
                          for j in range(n)))
    return QForm(tuple(rows))


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with leftmost pivots.

    Elimination is fraction-free on an integer copy of the matrix; only the
    final normalisation divides.  Returns ``(R, pivots)`` where ``R`` holds the
    nonzero rows of the RREF.
    """
    if not rows:
        return [], []
    ncols = len(rows[0])
    work = []
    for r in rows:
        r = as_vector(r)
        den = 1
        for x in r:
            den = lcm(den, x.denominator)
        work.append([int(x * den) for x in r])
    pivots = []
    prev = 1
    top = 0
    nrows = len(work)
    for col in range(ncols):
        if top >= nrows:
            break
        piv = None
        for i in range(top, nrows):
            if work[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[top], work[piv] = work[piv], work[top]
        p = work[top][col]
        for i in range(top + 1, nrows):
            a = work[i][col]
            row_i = work[i]
            row_t = work[top]
            # Bareiss step: exact division by the previous pivot.
            work[i] = [(p * x - a * y) // prev for x, y in zip(row_i, row_t)]
        prev = p
        pivots.append(col)
        top += 1
    R = [[Fraction(x) for x in work[i]] for i in range(top)]
    # back substitution to reduced form
    for k in range(top - 1, -1, -1):
        c = pivots[k]
        piv = R[k][c]
        R[k] = [x / piv for x in R[k]]
        for i in range(k):
            f = R[i][c]
            if f:
                R[i] = [x - f * y for x, y in zip(R[i], R[k])]
    return R, pivots


def kernel(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of the right kernel ``{x : A x = 0}`` as primitive integer vectors.

    One basis vector per free column, in increasing column order.
    """
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    R, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for k, c in enumerate(pivots):
            v[c] = -R[k][f]
        basis.append(primitive_integer(v))
    return basis


@dataclass(frozen=True)
class FormSystem:
    """Basis of an n-dimensional space of quadratic forms on Q^N."""

    forms: tuple
    independent: bool = True

    def __post_init__(self):
        forms = tuple(f if isinstance(f, QForm) else QForm(f) for f in self.forms)
        if not forms:
            raise ValueError("a form system needs at least one form")
        N = forms[0].dim
        for f in forms:
            _check(f.dim == N)
        object.__setattr__(self, "forms", forms)
        if self.independent and rank([f.entries_vector() for f in forms]) != len(forms):
            raise ValueError("basis forms are linearly dependent")

    @property
    def n(self) -> int:
        return len(self.forms)

    @property
    def dim(self) -> int:
        return self.forms[0].dim

    def __len__(self):
        return len(self.forms)

    def __getitem__(self, i) -> QForm:
        return self.forms[i]

    def __iter__(self):
        return iter(self.forms)

    def combination(self, coeffs: Sequence) -> QForm:
        return combine(self.forms, coeffs)

    def subsystem(self, indices: Sequence[int]) -> "FormSystem":
        return FormSystem(tuple(self.forms[i] for i in indices))


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^N spanned by linearly independent basis vectors."""

    basis: tuple
    ambient_dim: int

    def __post_init__(self):
        basis = tuple(as_vector(b) for b in self.basis)
        for b in basis:
            _check(len(b) == self.ambient_dim)
        if basis and rank(basis) != len(basis):
            raise ValueError("subspace basis is not linearly independent")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(identity(n), n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    @property
    def matrix(self) -> Matrix:
        """N x d matrix with the basis vectors as columns."""
        return columns_to_matrix(self.basis)

    def lift(self, coords: Sequence) -> Vector:
        """Ambient vector with the given coordinates in this basis."""
        coords = as_vector(coords)
        _check(len(coords) == self.dim)
        N = self.ambient_dim
        return tuple(sum(c * b[i] for c, b in zip(coords, self.basis)) for i in range(N))

    def compose(self, inner: "Subspace") -> "Subspace":
        """The subspace ``self.matrix @ inner.matrix`` (inner given in self's coordinates)."""
        _check(inner.ambient_dim == self.dim)
        return Subspace(tuple(self.lift(b) for b in inner.basis), self.ambient_dim)


def evaluate(w: QForm, v: Sequence) -> Fraction:
    """``w(v) = v^T G v``."""
    v = as_vector(v)
    _check(len(v) == w.dim)
    total = Fraction(0)
    for i, row in enumerate(w.gram):
        if v[i]:
            total += v[i] * sum(g * x for g, x in zip(row, v))
    return total


def bilinear(w: QForm, u: Sequence, v: Sequence) -> Fraction:
    """``b_w(u, v) = u^T G v``, the polarisation of ``w``."""
    u = as_vector(u)
    v = as_vector(v)
    _check(len(u) == w.dim and len(v) == w.dim)
    return dot(u, matvec(w.gram, v))


def gram_times(w: QForm, v: Sequence) -> Vector:
    return matvec(w.gram, as_vector(v))


def restrict(w: QForm, S: Subspace) -> QForm:
    """Pull ``w`` back to ``S``: Gram matrix ``B^T G B``."""
    _check(S.ambient_dim == w.dim)
    GB = [matvec(w.gram, b) for b in S.basis]  # columns G b_j
    d = S.dim
    rows = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            x = dot(S.basis[i], GB[j])
            rows[i][j] = x
            rows[j][i] = x
    return QForm(tuple(tuple(r) for r in rows))


def restrict_system(W: FormSystem, S: Subspace) -> tuple[FormSystem, bool]:
    """Restrict every basis form; ``injective`` tells whether they stay independent.

    When the restriction is not injective the returned system is built with
    ``independent=False`` and must not be used where a basis is required.
    """
    _check(S.ambient_dim == W.dim)
    forms = tuple(restrict(w, S) for w in W.forms)
    injective = rank([f.entries_vector() for f in forms]) == len(forms) if S.dim else False
    return FormSystem(forms, independent=injective), injective


def diagonalize(w: QForm) -> tuple[Matrix, QForm]:
    """Congruence diagonalisation: returns ``(P, D)`` with ``P^T G P = D`` diagonal.

    Rows already orthogonal to the rest are skipped, so diagonal input gives
    ``P = I``.  Otherwise pivot on the first nonzero diagonal entry; when the
    remaining diagonal is zero, replace ``e_k`` by ``e_k + e_j`` for the first
    ``G_kj != 0``.
    """
    n = w.dim
    A = [list(r) for r in w.gram]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]  # columns are new basis

    def add_col(i, j, f):
        # basis e_i <- e_i + f e_j, applied as a congruence
        for r in range(n):
            A[r][i] += f * A[r][j]
        for c in range(n):
            A[i][c] += f * A[j][c]
        for r in range(n):
            P[r][i] += f * P[r][j]

    def swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in P:
            r[i], r[j] = r[j], r[i]

    for k in range(n):
        if all(A[k][j] == 0 for j in range(k + 1, n)):
            continue  # e_k already orthogonal to the rest
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][i] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                j = next(j for j in range(k + 1, n) if A[k][j] != 0)
                add_col(k, j, Fraction(1))
            if all(A[k][j] == 0 for j in range(k + 1, n)):
                continue
        d = A[k][k]
        for r in range(k + 1, n):
            if A[r][k] != 0:
                add_col(r, k, -A[r][k] / d)
    D = QForm.diagonal([A[i][i] for i in range(n)])
    return tuple(tuple(r) for r in P), D


def inertia_int(M) -> tuple[int, int, int]:
    """Inertia of a symmetric integer matrix (list of rows or ``fmpz_mat``).

    All eigenvalues are real, so Descartes' rule of signs on the characteristic
    polynomial counts the positive ones exactly; zeros are the multiplicity of
    the root 0.
    """
    if not isinstance(M, fmpz_mat):
        M = fmpz_mat([list(r) for r in M]) if len(M) else fmpz_mat(0, 0)
    n = M.nrows()
    coeffs = [int(c) for c in M.charpoly().coeffs()]
    z = next(i for i, c in enumerate(coeffs) if c != 0)
    nz = [c for c in coeffs if c != 0]
    pos = sum(1 for x, y in zip(nz, nz[1:]) if (x > 0) != (y > 0))
    return pos, n - pos - z, z


def inertia(w: QForm) -> tuple[int, int, int]:
    """``(p, q, z)``: numbers of positive, negative and zero eigenvalues."""
    if w.dim == 0:
        return 0, 0, 0
    M, _ = w.integral_gram()
    return inertia_int(M)


def form_rank(w: QForm) -> int:
    p, q, _ = inertia(w)
    return p + q


def joint_orthogonal_complement(W: FormSystem, vs: Sequence[Sequence]) -> Subspace:
    """``{v : b_w(v, v_j) = 0 for all w in W and all v_j in vs}``.

    The kernel of the ``(len(vs) * n) x N`` matrix with rows ``G_a v_j``.
    """
    N = W.dim
    rows = []
    for v in vs:
        v = as_vector(v)
        _check(len(v) == N)
        for w in W.forms:
            rows.append(matvec(w.gram, v))
    if not rows:
        return Subspace.full(N)
    return Subspace(tuple(kernel(rows, N)), N)
