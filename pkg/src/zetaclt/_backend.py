"""Select the compiled kernels when available, else the numpy fallback.

Set ``ZETACLT_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

NAME = "python"
kernels = _fallback

if os.environ.get("ZETACLT_BACKEND", "").lower() not in ("python", "numpy", "fallback"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        NAME = "compiled"
    except ImportError:  # extension not built
        pass

sample_euler = kernels.sample_euler
dirichlet_multi = kernels.dirichlet_multi
char_fn_grid = kernels.char_fn_grid


def get(name: str):
    """Kernel module by name ("compiled" or "python")."""
    if name == "python":
        return _fallback
    from . import _kernels

    return _kernels
