"""Dense complex Hermitian eigensolver, pure-Python kernel.

Classic three-stage scheme: unitary reduction of the Hermitian matrix to a
real symmetric tridiagonal one via Householder reflectors, implicit-shift QL
iteration on the tridiagonal, and back-transformation of the accumulated
eigenvectors.  The compiled extension ``_eigen_cy`` runs the identical
recurrences; either kernel is deterministic for a fixed input matrix.

Eigenvalues are returned in ascending order (stable sort), eigenvectors as
the columns of a unitary matrix.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = float(np.finfo(np.float64).eps)
_MAXITER = 60


def _tridiagonalize(a: np.ndarray, d: np.ndarray, e: np.ndarray,
                    tau: np.ndarray) -> None:
    """Reduce Hermitian ``a`` in place to real tridiagonal form (d, e).

    On exit ``a`` holds the Householder reflectors (upper columns hold the
    vectors, lower rows the scaled copies, diagonal the pivots) and ``tau``
    the unitary diagonal phases; both are needed by :func:`_back_transform`.
    ``e[i]`` couples positions i and i+1.
    """
    n = a.shape[0]
    tau[n - 1] = 1.0
    for i in range(n - 1, 0, -1):
        col = a[:i, i]
        scale = float(np.abs(col.real).sum() + np.abs(col.imag).sum())
        if scale == 0.0 or not math.isfinite(1.0 / scale):
            e[i] = 0.0
            d[i] = 0.0
            tau[i - 1] = 1.0
            continue
        if i == 1:
            f = a[0, 1]
            fa = abs(f)
            e[1] = fa
            d[1] = 0.0
            tau[0] = tau[1] * f / fa if fa != 0.0 else tau[1]
            continue
        a[:i, i] *= 1.0 / scale
        h = float((a[:i, i].real ** 2 + a[:i, i].imag ** 2).sum())
        f = a[i - 1, i]
        fa = abs(f)
        g = math.sqrt(h)
        h += g * fa
        e[i] = scale * g
        if fa != 0.0:
            phase = f / fa
            tz = -tau[i] * phase
            gc = g * phase
        else:
            tz = -tau[i]
            gc = complex(g)
        a[i - 1, i] += gc
        # project the remaining columns onto the reflector
        ff = 0.0 + 0.0j
        for j in range(i):
            a[i, j] = a[j, i] / h
            gg = np.vdot(a[:j + 1, j], a[:j + 1, i])
            if j + 1 < i:
                gg += a[j, j + 1:i] @ a[j + 1:i, i]
            tau[j] = gg / h
            ff += np.conj(tau[j]) * a[j, i]
        hh = ff / (2.0 * h)
        # rank-2 update of the leading block; only the upper triangle is kept
        for j in range(i):
            fj = a[j, i]
            gj = tau[j] - hh * fj
            tau[j] = gj
            a[:j + 1, j] -= np.conj(fj) * tau[:j + 1] + np.conj(gj) * a[:j + 1, i]
        tau[i - 1] = tz
        d[i] = h
    e[:n - 1] = e[1:]
    e[n - 1] = 0.0
    d[0] = 0.0
    for i in range(n):
        pivot = d[i]
        d[i] = a[i, i].real
        a[i, i] = pivot


def _tridiag_ql(d: np.ndarray, e: np.ndarray, z: np.ndarray | None) -> None:
    """Implicit-shift QL on the real tridiagonal (d, e).

    Rotations are accumulated into the columns of ``z`` when given.  ``e`` is
    destroyed.  Raises ``ArithmeticError`` if an eigenvalue fails to converge,
    which for double precision indicates a malformed input.
    """
    n = d.size
    e[n - 1] = 0.0
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m + 1 != n and abs(e[m]) > _EPS * (abs(d[m]) + abs(d[m + 1])):
                m += 1
            if m == l:
                break
            if iters >= _MAXITER:
                raise ArithmeticError(
                    f"QL iteration failed to converge at index {l}")
            iters += 1
            p = d[l]
            g = (d[l + 1] - p) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            shift = g - r if g < 0.0 else g + r
            g = d[m] - p + e[l] / shift
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                if abs(f) > abs(g):
                    c = g / f
                    r = math.hypot(c, 1.0)
                    e[i + 1] = f * r
                    s = 1.0 / r
                    c *= s
                else:
                    s = f / g if g != 0.0 else 0.0
                    r = math.hypot(s, 1.0)
                    e[i + 1] = g * r
                    c = 1.0 / r
                    s *= c
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    f_col = z[:, i + 1].copy()
                    z[:, i + 1] = s * z[:, i] + c * f_col
                    z[:, i] = c * z[:, i] - s * f_col
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def _back_transform(a: np.ndarray, tau: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Lift tridiagonal eigenvectors ``z`` to eigenvectors of the input."""
    v = z.astype(np.complex128) * tau[:, None]
    n = a.shape[0]
    for i in range(n):
        if a[i, i] != 0.0:
            g = np.conj(a[i, :i]) @ v[:i, :]
            v[:i, :] -= np.outer(a[:i, i], g)
    return v


def _prepare(h: np.ndarray) -> np.ndarray:
    a = np.array(h, dtype=np.complex128, order="C", copy=True)
    # the reduction reads the upper triangle; symmetrize so that tiny
    # Hermiticity defects cannot bias the result
    a += a.conj().T
    a *= 0.5
    return a


def eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and eigenvectors in
    the columns of ``v``.
    """
    n = h.shape[0]
    if n == 1:
        return (np.array([h[0, 0].real]),
                np.ones((1, 1), dtype=np.complex128))
    a = _prepare(h)
    d = np.zeros(n)
    e = np.zeros(n)
    tau = np.zeros(n, dtype=np.complex128)
    _tridiagonalize(a, d, e, tau)
    z = np.eye(n)
    _tridiag_ql(d, e, z)
    v = _back_transform(a, tau, z)
    order = np.argsort(d, kind="stable")
    return d[order], v[:, order]


def eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues only, ascending."""
    n = h.shape[0]
    if n == 1:
        return np.array([h[0, 0].real])
    a = _prepare(h)
    d = np.zeros(n)
    e = np.zeros(n)
    tau = np.zeros(n, dtype=np.complex128)
    _tridiagonalize(a, d, e, tau)
    _tridiag_ql(d, e, None)
    d.sort(kind="stable")
    return d
