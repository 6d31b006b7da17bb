"""Hot tree-growing kernels behind a backend switch.

The compiled Cython core is preferred; a pure NumPy implementation with
identical floating-point semantics is the fallback, so results never
depend on which backend is active. Set EMOWEAR_PURE_PYTHON=1 to force the
fallback (used by the benchmark for comparison).
"""

import os

from . import pure as _pure
from .pure import CRITERION_FRIEDMAN_MSE, CRITERION_SQUARED_ERROR

try:
    from . import _ctree as _compiled
except ImportError:
    _compiled = None

_force_pure = os.environ.get("EMOWEAR_PURE_PYTHON", "") not in ("", "0")
_impl = _pure if (_force_pure or _compiled is None) else _compiled

BACKEND = "pure" if _impl is _pure else "compiled"
grow_tree = _impl.grow_tree
apply_tree = _impl.apply_tree

__all__ = [
    "BACKEND",
    "CRITERION_FRIEDMAN_MSE",
    "CRITERION_SQUARED_ERROR",
    "apply_tree",
    "grow_tree",
]
