"""Real (and optionally complex) solutions of ``w_a(v) = c_a`` for a system of forms.

Existence is guaranteed when the system is admissible enough; finding a
solution is done numerically by damped minimum-norm Newton steps with seeded
Gaussian restarts.  Results are re-evaluated before they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InsufficientInertia, MaxIterationsExceeded
from .forms import FormSystem, QForm, inertia

DEFAULT_TOL = 1e-10
MAX_STEPS = 200
RESTARTS = 32


@dataclass
class RealSolution:
    v: tuple
    residuals: tuple
    margin: float | None = None
    restarts: int = 0
    steps: int = 0
    trivial: bool = False
    norm: float = field(init=False)

    def __post_init__(self):
        self.norm = float(np.linalg.norm(np.asarray(self.v)))

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def gram_stack(W: FormSystem | Sequence[QForm], dtype=float) -> np.ndarray:
    """Gram matrices as an ``(n, N, N)`` array."""
    forms = list(W)
    return np.array([[[float(x) for x in row] for row in w.gram] for w in forms], dtype=dtype)


def evaluation_map(W, v) -> np.ndarray:
    """``(w_1(v), ..., w_n(v))``; ``W`` is a system or a precomputed Gram stack."""
    G = W if isinstance(W, np.ndarray) else gram_stack(W)
    v = np.asarray(v)
    if v.shape != (G.shape[1],):
        raise ValueError("dimension mismatch")
    return np.einsum("i,aij,j->a", v, G, v)


def _newton(G: np.ndarray, c: np.ndarray, v: np.ndarray, tol: float, max_steps: int):
    F = evaluation_map(G, v) - c
    res = np.max(np.abs(F))
    for step in range(max_steps):
        if res <= tol:
            return v, res, step
        J = 2.0 * np.einsum("aij,j->ai", G, v)
        JJ = J @ J.conj().T if np.iscomplexobj(J) else J @ J.T
        try:
            y = np.linalg.solve(JJ, F)
        except np.linalg.LinAlgError:
            return v, res, step
        d = -(J.conj().T @ y if np.iscomplexobj(J) else J.T @ y)
        alpha = 1.0
        while alpha > 1e-6:
            w = v + alpha * d
            Fw = evaluation_map(G, w) - c
            rw = np.max(np.abs(Fw))
            if rw < res:
                v, F, res = w, Fw, rw
                break
            alpha /= 2
        else:
            return v, res, step
    return v, res, max_steps


def _solve(G: np.ndarray, c: np.ndarray, tol: float, seed: int, max_steps: int, restarts: int,
           accept=None, complex_mode: bool = False):
    best = (np.inf, None, 0)
    N = G.shape[1]
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        v = rng.standard_normal(N)
        if complex_mode:
            v = v + 1j * rng.standard_normal(N)
        scale = np.abs(c).max() if c.size else 1.0
        v *= np.sqrt(max(scale, 1e-300) / max(N, 1))
        v, res, steps = _newton(G, c, v, tol, max_steps)
        if res <= tol and (accept is None or accept(v)):
            return v, res, r, steps
        if res < best[0]:
            best = (res, v, steps)
    raise MaxIterationsExceeded(float(best[0]))


def _package(G, c, v, restarts, steps, margin_index=None) -> RealSolution:
    vals = evaluation_map(G, v)
    residuals = tuple(float(abs(x)) for x in vals - c)
    margin = float(abs(vals[margin_index])) if margin_index is not None else None
    if np.iscomplexobj(v):
        vt = tuple(complex(x) for x in v)
    else:
        vt = tuple(float(x) for x in v)
    return RealSolution(vt, residuals, margin, restarts, steps)


def solve_values(W, c: Sequence[float], tol: float = DEFAULT_TOL, seed: int = 0,
                 max_steps: int = MAX_STEPS, restarts: int = RESTARTS) -> RealSolution:
    """Real ``v`` with ``|w_a(v) - c_a| <= tol`` for every basis form."""
    G = W if isinstance(W, np.ndarray) else gram_stack(W)
    c = np.asarray([float(x) for x in c])
    if c.shape != (G.shape[0],):
        raise ValueError("one target value per form required")
    if not c.any():
        z = np.zeros(G.shape[1])
        sol = _package(G, c, z, 0, 0)
        sol.trivial = True
        return sol
    v, res, r, steps = _solve(G, c, tol, seed, max_steps, restarts)
    sol = _package(G, c, v, r, steps)
    if sol.max_residual > tol:
        raise MaxIterationsExceeded(sol.max_residual, "re-evaluated residual exceeds tolerance")
    return sol


def solve_sign_pattern(W, w0_index: int, sign: int, tol: float = DEFAULT_TOL,
                       margin_floor: float = 1e-3, seed: int = 0, max_steps: int = MAX_STEPS,
                       restarts: int = RESTARTS) -> RealSolution:
    """``v`` isotropic (to ``tol``) for every basis form except ``w0``, with ``sign(w0(v)) = sign``."""
    G = W if isinstance(W, np.ndarray) else gram_stack(W)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not 0 <= w0_index < G.shape[0]:
        raise ValueError("w0_index out of range")
    c = np.zeros(G.shape[0])
    c[w0_index] = sign * max(1.0, 2.0 * margin_floor)

    def ok(v):
        x = evaluation_map(G, v)[w0_index]
        return np.sign(x) == sign and abs(x) >= margin_floor

    v, res, r, steps = _solve(G, c, tol, seed, max_steps, restarts, accept=ok)
    sol = _package(G, c, v, r, steps, margin_index=w0_index)
    # only the zero targets are contractual; w0 just needs sign and margin
    zero_res = [x for a, x in enumerate(sol.residuals) if a != w0_index]
    if zero_res and max(zero_res) > tol or not ok(np.asarray(sol.v)):
        raise MaxIterationsExceeded(sol.max_residual, "re-evaluated sign pattern failed")
    return sol


def solve_values_complex(W, c: Sequence[complex], tol: float = DEFAULT_TOL, seed: int = 0,
                         max_steps: int = MAX_STEPS, restarts: int = RESTARTS) -> RealSolution:
    """Complex ``v`` with ``w_a(v) = c_a`` (holomorphic Newton; forms are not conjugated)."""
    G = (W if isinstance(W, np.ndarray) else gram_stack(W)).astype(complex)
    c = np.asarray([complex(x) for x in c])
    if c.shape != (G.shape[0],):
        raise ValueError("one target value per form required")
    if not c.any():
        sol = _package(G, c, np.zeros(G.shape[1], dtype=complex), 0, 0)
        sol.trivial = True
        return sol
    v, res, r, steps = _solve(G, c, tol, seed, max_steps, restarts, complex_mode=True)
    sol = _package(G, c, v, r, steps)
    if sol.max_residual > tol:
        raise MaxIterationsExceeded(sol.max_residual)
    return sol


def hyperbolic_basis(w: QForm, m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """``m`` mutually orthogonal pairs with ``w(e) = w(f) = 0`` and ``b(e, f) = 1`` (floats)."""
    p, q, _ = inertia(w)
    if min(p, q) < m:
        raise InsufficientInertia(f"form has inertia ({p}, {q}); {m} hyperbolic pairs requested")
    G = np.array([[float(x) for x in row] for row in w.gram])
    lam, U = np.linalg.eigh(G)
    order = np.argsort(lam)
    neg = [i for i in order if lam[i] < 0][:m]
    pos = [i for i in order[::-1] if lam[i] > 0][:m]
    pairs = []
    for i, j in zip(pos, neg):
        a = U[:, i] / np.sqrt(lam[i])
        b = U[:, j] / np.sqrt(-lam[j])
        pairs.append(((a + b) / 2, a - b))
    return pairs


__all__ = ["RealSolution", "evaluation_map", "solve_values", "solve_sign_pattern",
           "solve_values_complex", "hyperbolic_basis", "gram_stack"]
