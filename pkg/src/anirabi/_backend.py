"""Kernel backend selection.

The compiled Cython kernel is preferred when its extension module imports;
otherwise the pure-Python twin takes over transparently.  Set
``ANIRABI_BACKEND=python`` or ``ANIRABI_BACKEND=compiled`` to force a choice
(forcing ``compiled`` raises if the extension is missing).
"""

import os

_choice = os.environ.get("ANIRABI_BACKEND", "").strip().lower()

if _choice in ("", "compiled", "cython"):
    try:
        from . import _kernel_cy as _impl

        BACKEND = "compiled"
    except ImportError:
        if _choice:
            raise
        from . import _kernel_py as _impl

        BACKEND = "python"
elif _choice in ("python", "pure"):
    from . import _kernel_py as _impl

    BACKEND = "python"
else:
    raise ValueError(
        f"unknown ANIRABI_BACKEND={_choice!r}; use 'compiled' or 'python'"
    )

branch_series = _impl.branch_series
