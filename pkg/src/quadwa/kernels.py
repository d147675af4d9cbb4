"""Backend selection for the hot search kernel.

The compiled extension is used when it imports; setting
``QUADWA_PURE_PYTHON=1`` forces the pure-Python twin.
"""

from __future__ import annotations

import os

from . import _kernels_py

_INT64_SAFE = 1 << 62

if os.environ.get("QUADWA_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def fits_int64(G, H: int) -> bool:
    """True when every intermediate of ``box_search`` stays below 2^62."""
    k = len(G)
    g = max((abs(int(x)) for row in G for x in row), default=0)
    # c <= k^2 g H^2, b^2 <= (k g H)^2, a*c <= k^2 g^2 H^2
    bound = max(k * k * g * H * H, (k * g * H) ** 2, 1) * 4
    return bound < _INT64_SAFE


def box_search(G, H: int, backend: str | None = None):
    """Dispatch to the compiled or pure-Python search.

    Results are identical across backends; the compiled one is used only when
    the int64 range is safe.
    """
    use = backend or BACKEND
    if use == "compiled" and _compiled is not None and fits_int64(G, H):
        return _compiled.box_search([[int(x) for x in r] for r in G], H)
    return _kernels_py.box_search(G, H)
