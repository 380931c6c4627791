"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python twin is
the fallback. Set CARRIERALLOC_BACKEND=c or =py before import to force a
specific backend (forcing "c" fails loudly if the extension is missing).
"""

from __future__ import annotations

import os

_forced = os.environ.get("CARRIERALLOC_BACKEND")

if _forced in ("py", "python"):
    from . import _kernels_py as kernels

    BACKEND = "python"
elif _forced == "c":
    from . import _kernels as kernels  # type: ignore[no-redef]

    BACKEND = "c"
elif _forced:
    raise ImportError(
        f"CARRIERALLOC_BACKEND={_forced!r} is not one of 'c', 'py'"
    )
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "python"


def backend_name() -> str:
    """Name of the kernel backend selected at import: 'c' or 'python'."""
    return BACKEND


def load_backend(name: str):
    """Load a specific kernel module regardless of the import-time choice.

    Used by the benchmark and the backend-equivalence tests.
    """
    if name == "c":
        from . import _kernels

        return _kernels
    if name in ("py", "python"):
        from . import _kernels_py

        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.insert(0, "c")
    except ImportError:
        pass
    return tuple(names)
