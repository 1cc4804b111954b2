"""Simulation-kernel backend selection.

Two interchangeable kernels exist: a compiled extension (``_ckernel``,
built at install time) and a pure-Python fallback (``_pykernel``).
They are bit-identical by construction; the compiled one is simply
faster.  Selection order:

1. the explicit ``backend=`` argument of :func:`ptsmc.simulate.run`;
2. the ``PTSMC_BACKEND`` environment variable (``auto`` | ``compiled``
   | ``pure``), read at import time;
3. ``auto``: compiled when available, else pure.
"""

from __future__ import annotations

import os

from . import _pykernel

_MODULES = {"pure": _pykernel}
try:
    from . import _ckernel  # type: ignore[attr-defined]

    _MODULES["compiled"] = _ckernel
except ImportError:
    pass

_ENV_CHOICE = os.environ.get("PTSMC_BACKEND", "auto")

VALID_CHOICES = ("auto", "compiled", "pure")


def available_backends() -> tuple[str, ...]:
    """Names of the kernels importable in this installation."""
    return tuple(sorted(_MODULES))


def get_backend(name: str | None = None):
    """Resolve a backend choice to a kernel module.

    ``None`` defers to ``PTSMC_BACKEND`` (default ``auto``).  Raises
    ``ValueError`` for unknown names and ``RuntimeError`` when the
    compiled kernel is requested but was not built.
    """
    choice = _ENV_CHOICE if name is None else name
    if choice not in VALID_CHOICES:
        raise ValueError(
            f"backend must be one of {VALID_CHOICES}, got {choice!r}"
            + ("" if name is not None else " (from PTSMC_BACKEND)")
        )
    if choice == "auto":
        choice = "compiled" if "compiled" in _MODULES else "pure"
    if choice not in _MODULES:
        raise RuntimeError(
            "compiled kernel requested but the extension is not built; "
            "reinstall the package or use PTSMC_BACKEND=pure"
        )
    return _MODULES[choice]


def active_backend() -> str:
    """Name of the kernel the default selection resolves to."""
    return get_backend(None).NAME
