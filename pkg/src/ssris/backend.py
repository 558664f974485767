"""Monte Carlo kernel selection: compiled extension if available, numpy
fallback otherwise.

Set ``SSRIS_PURE_PYTHON=1`` to force the fallback. Both implementations
are bit-identical (enforced by the test suite), so the choice affects
speed only.
"""

from __future__ import annotations

import os

from . import _mc_fallback


def _select():
    force = os.environ.get("SSRIS_PURE_PYTHON", "")
    if force and force != "0":
        return _mc_fallback, "python"
    try:
        from . import _mc_kernel
    except ImportError:
        return _mc_fallback, "python"
    return _mc_kernel, "compiled"


_impl, BACKEND = _select()

rayleigh_block_sums = _impl.rayleigh_block_sums


def available_backends() -> dict:
    """Importable kernel implementations, keyed by name."""
    impls = {"python": _mc_fallback}
    try:
        from . import _mc_kernel
        impls["compiled"] = _mc_kernel
    except ImportError:
        pass
    return impls
