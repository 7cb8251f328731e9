# cython: boundscheck=False, wraparound=False, cdivision=True
"""Dense complex Hermitian eigensolver, compiled kernel.

Same three-stage algorithm as ``_eigen_py`` (Householder tridiagonalization,
implicit-shift QL, back-transformation) with the inner loops spelled out for
the C compiler.  Results are deterministic for a fixed input matrix.
"""

import numpy as np

from libc.math cimport fabs, hypot, isfinite, sqrt

cdef double _EPS = np.finfo(np.float64).eps
cdef int _MAXITER = 60


cdef void _tridiagonalize(double complex[:, ::1] a, double[::1] d,
                          double[::1] e, double complex[::1] tau):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double scale, h, fa, g, pivot
    cdef double complex f, gc, tz, gg, ff, hh, fj, gj
    tau[n - 1] = 1.0
    for i in range(n - 1, 0, -1):
        scale = 0.0
        for k in range(i):
            scale += fabs(a[k, i].real) + fabs(a[k, i].imag)
        if scale == 0.0 or not isfinite(1.0 / scale):
            e[i] = 0.0
            d[i] = 0.0
            tau[i - 1] = 1.0
            continue
        if i == 1:
            f = a[0, 1]
            fa = abs(f)
            e[1] = fa
            d[1] = 0.0
            if fa != 0.0:
                tau[0] = tau[1] * f / fa
            else:
                tau[0] = tau[1]
            continue
        h = 0.0
        for k in range(i):
            a[k, i] = a[k, i] / scale
            h += a[k, i].real * a[k, i].real + a[k, i].imag * a[k, i].imag
        f = a[i - 1, i]
        fa = abs(f)
        g = sqrt(h)
        h += g * fa
        e[i] = scale * g
        if fa != 0.0:
            f = f / fa
            tz = -tau[i] * f
            gc = g * f
        else:
            tz = -tau[i]
            gc = g
        a[i - 1, i] = a[i - 1, i] + gc
        ff = 0.0
        for j in range(i):
            a[i, j] = a[j, i] / h
            gg = 0.0
            for k in range(j + 1):
                gg += a[k, j].conjugate() * a[k, i]
            for k in range(j + 1, i):
                gg += a[j, k] * a[k, i]
            tau[j] = gg / h
            ff += tau[j].conjugate() * a[j, i]
        hh = ff / (2.0 * h)
        for j in range(i):
            fj = a[j, i]
            gj = tau[j] - hh * fj
            tau[j] = gj
            for k in range(j + 1):
                a[k, j] = a[k, j] - (fj.conjugate() * tau[k]
                                     + gj.conjugate() * a[k, i])
        tau[i - 1] = tz
        d[i] = h
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    d[0] = 0.0
    for i in range(n):
        pivot = d[i]
        d[i] = a[i, i].real
        a[i, i] = pivot


cdef int _tridiag_ql(double[::1] d, double[::1] e, double[:, ::1] z,
                     bint wantz) except -1:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, w
    cdef int iters
    cdef double p, g, r, shift, s, c, f, b, fcol
    e[n - 1] = 0.0
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m + 1 != n and fabs(e[m]) > _EPS * (fabs(d[m]) + fabs(d[m + 1])):
                m += 1
            if m == l:
                break
            if iters >= _MAXITER:
                raise ArithmeticError(
                    f"QL iteration failed to converge at index {l}")
            iters += 1
            p = d[l]
            g = (d[l + 1] - p) / (2.0 * e[l])
            r = hypot(g, 1.0)
            if g < 0.0:
                shift = g - r
            else:
                shift = g + r
            g = d[m] - p + e[l] / shift
            s = 1.0
            c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                if fabs(f) > fabs(g):
                    c = g / f
                    r = hypot(c, 1.0)
                    e[i + 1] = f * r
                    s = 1.0 / r
                    c = c * s
                else:
                    if g != 0.0:
                        s = f / g
                    else:
                        s = 0.0
                    r = hypot(s, 1.0)
                    e[i + 1] = g * r
                    c = 1.0 / r
                    s = s * c
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if wantz:
                    for w in range(n):
                        fcol = z[w, i + 1]
                        z[w, i + 1] = s * z[w, i] + c * fcol
                        z[w, i] = c * z[w, i] - s * fcol
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


cdef void _back_transform(double complex[:, ::1] a, double complex[::1] tau,
                          double[:, ::1] z, double complex[:, ::1] v):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double complex g
    for k in range(n):
        for j in range(n):
            v[k, j] = z[k, j] * tau[k]
    for i in range(n):
        if a[i, i] != 0.0:
            for j in range(n):
                g = 0.0
                for k in range(i):
                    g += a[i, k].conjugate() * v[k, j]
                for k in range(i):
                    v[k, j] = v[k, j] - g * a[k, i]


def _prepare(h):
    a = np.array(h, dtype=np.complex128, order="C", copy=True)
    a += a.conj().T
    a *= 0.5
    return a


def eigh(h):
    """Eigen-decomposition of a Hermitian matrix; ``(w, v)``, w ascending."""
    cdef Py_ssize_t n = h.shape[0]
    if n == 1:
        return (np.array([complex(h[0, 0]).real]),
                np.ones((1, 1), dtype=np.complex128))
    a = _prepare(h)
    d = np.zeros(n)
    e = np.zeros(n)
    tau = np.zeros(n, dtype=np.complex128)
    _tridiagonalize(a, d, e, tau)
    z = np.eye(n)
    _tridiag_ql(d, e, z, True)
    v = np.empty((n, n), dtype=np.complex128)
    _back_transform(a, tau, z, v)
    order = np.argsort(d, kind="stable")
    return np.asarray(d)[order], np.asarray(v)[:, order]


def eigvalsh(h):
    """Eigenvalues only, ascending."""
    cdef Py_ssize_t n = h.shape[0]
    if n == 1:
        return np.array([complex(h[0, 0]).real])
    a = _prepare(h)
    d = np.zeros(n)
    e = np.zeros(n)
    tau = np.zeros(n, dtype=np.complex128)
    _tridiagonalize(a, d, e, tau)
    _tridiag_ql(d, e, np.empty((1, 1)), False)
    d.sort(kind="stable")
    return d
