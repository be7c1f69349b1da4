"""Backend selection: numba-compiled kernels with a pure-numpy fallback.

The environment flag ADAVR_BACKEND picks the epoch-loop implementation:

    ADAVR_BACKEND=numba   compiled kernels (default when numba imports)
    ADAVR_BACKEND=numpy   pure-numpy reference loops

Both backends share function signatures; see ``_pyref`` for the contract.
"""

from __future__ import annotations

import os
import warnings
from types import ModuleType

from . import _pyref

ENV_VAR = "ADAVR_BACKEND"

try:
    from . import _kernels

    _NUMBA_OK = True
except ImportError:  # pragma: no cover - exercised only without numba
    _kernels = None
    _NUMBA_OK = False

_BACKENDS: dict[str, ModuleType | None] = {"numpy": _pyref, "numba": _kernels}


def backend_name(name: str | None = None) -> str:
    """Resolve a backend name from the argument, the environment, or defaults."""
    if name is None:
        name = os.environ.get(ENV_VAR, "").strip().lower() or None
    if name is None:
        return "numba" if _NUMBA_OK else "numpy"
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose one of {sorted(_BACKENDS)}")
    if name == "numba" and not _NUMBA_OK:
        warnings.warn("numba unavailable; falling back to the numpy backend",
                      RuntimeWarning, stacklevel=2)
        return "numpy"
    return name


def get_backend(name: str | None = None) -> ModuleType:
    """Module providing the epoch kernels for the resolved backend."""
    return _BACKENDS[backend_name(name)]
