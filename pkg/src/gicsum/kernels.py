"""Kernel selection: compiled extension when available, NumPy fallback otherwise.

Set ``GICSUM_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED_PURE = os.environ.get("GICSUM_PURE_PYTHON", "") == "1"

try:
    if _FORCED_PURE:
        raise ImportError("pure-Python kernel forced via GICSUM_PURE_PYTHON")
    from . import _ckernels  # type: ignore[attr-defined]

    min_slack_scan = _ckernels.min_slack_scan
    USING_COMPILED = True
except ImportError:
    min_slack_scan = _kernels_py.min_slack_scan
    USING_COMPILED = False


def implementations() -> dict:
    """All importable kernel implementations, keyed by name."""
    impls = {"python": _kernels_py.min_slack_scan}
    try:
        from . import _ckernels  # type: ignore[attr-defined]

        impls["compiled"] = _ckernels.min_slack_scan
    except ImportError:
        pass
    return impls
