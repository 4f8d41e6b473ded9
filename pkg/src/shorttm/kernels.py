"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
reference kernels. ``SHORTTM_BACKEND`` (auto, cython, python) overrides.
"""

import logging
import os
from types import ModuleType

from . import _kernels_py

log = logging.getLogger(__name__)

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

BACKENDS = ("auto", "cython", "python")


def available() -> list[str]:
    return ["cython", "python"] if _kernels_c is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    name = (name or os.environ.get("SHORTTM_BACKEND") or "auto").lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    if name == "python":
        return _kernels_py
    if _kernels_c is None:
        if name == "cython":
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        log.debug("compiled kernels unavailable, using the Python fallback")
        return _kernels_py
    return _kernels_c


default = get_backend()
