"""Linear-model kernels used by the contextual bandits.

The compiled extension is used when it imports; otherwise the pure-Python
module. Set ``DILEMMA_PURE_PYTHON=1`` to force the fallback. Both backends
give bit-identical results.
"""

from __future__ import annotations

import os

from dilemma.kernels import _pykernels

try:
    from dilemma.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

chol_update = forward_solve = linear_scores = sampled_scores = None
BACKEND = ""


def use_backend(name: str) -> None:
    global chol_update, forward_solve, linear_scores, sampled_scores, BACKEND
    try:
        mod = BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
    chol_update = mod.chol_update
    forward_solve = mod.forward_solve
    linear_scores = mod.linear_scores
    sampled_scores = mod.sampled_scores
    BACKEND = name


if os.environ.get("DILEMMA_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    use_backend("python")
else:
    use_backend("cython")
