"""Tree-kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-NumPy twin
when the extension is unavailable or FAIRHPO_PURE_PYTHON is set. Both
backends are bit-identical for the same inputs (see tests/test_backends.py).
"""

import os

if os.environ.get("FAIRHPO_PURE_PYTHON"):
    from . import fallback as _backend
    COMPILED = False
else:
    try:
        from . import kernels as _backend  # type: ignore[no-redef]
        COMPILED = True
    except ImportError:
        from . import fallback as _backend
        COMPILED = False

grow_tree_gini = _backend.grow_tree_gini
grow_tree_newton = _backend.grow_tree_newton
tree_apply = _backend.tree_apply


def backend_name() -> str:
    return "compiled" if COMPILED else "fallback"
