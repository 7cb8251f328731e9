"""Eigensolver backend selection.

Prefers the compiled kernel when the extension was built, otherwise falls
back to the pure-Python twin.  Set ``POSMAP_PURE_PYTHON=1`` to force the
fallback (used by the benchmark and by tests that compare the two kernels).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("POSMAP_PURE_PYTHON", "") not in ("", "0"):
    from . import _eigen_py as _kernel
    BACKEND = "python"
else:
    try:
        from . import _eigen_cy as _kernel  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        from . import _eigen_py as _kernel  # type: ignore[no-redef]
        BACKEND = "python"


def hermitian_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of Hermitian ``h``.

    The input is not checked for Hermiticity here; callers that accept
    user-supplied matrices validate first (see ``linalg``).
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    if h.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    return _kernel.eigh(h)


def hermitian_eigvals(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of Hermitian ``h``, ascending."""
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    if h.shape[0] == 0:
        return np.zeros(0)
    return _kernel.eigvalsh(h)
