"""Kernel dispatch: the Cython build when importable, pure Python otherwise.

``BACKEND`` names the implementation picked at import time. Both modules
expose the same functions, so callers never branch on it.
"""

try:
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    from . import _pykernels as _impl

    BACKEND = "python"

update_column = _impl.update_column

__all__ = ["BACKEND", "update_column"]
