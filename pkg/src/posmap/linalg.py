"""Dense complex matrix kernel.

Conventions used throughout the package:

* matrices are ``numpy.ndarray`` with dtype complex128; the JSON exchange
  format (rows/cols plus re/im lists) lives in ``serialize``;
* public indices are 1-based, matching the usual linear-algebra notation;
  anything 0-based is an internal detail;
* every comparison is tolerance-parameterized through :class:`Tolerance`;
  there is no exact float equality in the public contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import hermitian_eigh, hermitian_eigvals

Array = np.ndarray


@dataclass(frozen=True)
class Tolerance:
    """Numerical slack: ``psd_slack`` for eigenvalue sign tests, ``eq_atol``
    for entrywise equality."""

    psd_slack: float = 1e-9
    eq_atol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("psd_slack", "eq_atol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class BipartiteDims:
    """Subsystem dimensions of a bipartite operator on C^dA (x) C^dB."""

    dA: int
    dB: int

    def __post_init__(self) -> None:
        if self.dA < 1 or self.dB < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def total(self) -> int:
        return self.dA * self.dB

    def check(self, m: Array) -> None:
        if m.shape != (self.total, self.total):
            raise ValueError(
                f"matrix shape {m.shape} does not match dims "
                f"({self.dA}x{self.dB} = {self.total})")


def matrix_unit(d: int, i: int, j: int) -> Array:
    """d x d matrix with a single 1 at row i, column j (1-based)."""
    if not (1 <= i <= d and 1 <= j <= d):
        raise IndexError(f"indices ({i},{j}) out of range for dimension {d}")
    m = np.zeros((d, d), dtype=np.complex128)
    m[i - 1, j - 1] = 1.0
    return m


def kron(a: Array, b: Array) -> Array:
    """Kronecker product."""
    return np.kron(a, b)


def dagger(a: Array) -> Array:
    """Conjugate transpose."""
    return a.conj().T.copy()


def hermiticity_defect(h: Array) -> float:
    """Largest entrywise deviation of ``h`` from its conjugate transpose."""
    return float(np.abs(h - h.conj().T).max()) if h.size else 0.0


def _require_hermitian(h: Array, tol: Tolerance, label: str = "matrix") -> Array:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"{label} must be square, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol.eq_atol:
        raise ValueError(
            f"{label} is not Hermitian within {tol.eq_atol} "
            f"(defect {defect:.3e})")
    return h


def hermitian_eigenvalues(h: Array, tol: Tolerance = DEFAULT_TOL) -> Array:
    """Eigenvalues of a Hermitian matrix in nondecreasing order.

    Raises ``ValueError`` if the input fails the Hermiticity check.
    """
    return hermitian_eigvals(_require_hermitian(h, tol))


def is_psd(h: Array, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the minimum eigenvalue is >= -tol.psd_slack."""
    w = hermitian_eigenvalues(h, tol)
    return bool(w.size == 0 or w[0] >= -tol.psd_slack)


def min_eigenvalue(h: Array, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w = hermitian_eigenvalues(h, tol)
    if w.size == 0:
        raise ValueError("empty matrix has no eigenvalues")
    return float(w[0])


def schur_positivity(a: Array, x: Array, b: Array,
                     tol: Tolerance = DEFAULT_TOL) -> bool:
    """Positivity of the block matrix [[a, x], [x^dag, b]] via the Schur
    complement a - x b^{-1} x^dag.

    ``b`` must be PSD.  When ``b`` is nonsingular the complement uses the
    true inverse; on the singular boundary it uses the pseudo-inverse and
    additionally demands range(x^dag) within range(b), without which the
    block matrix cannot be PSD and the verdict is False.
    """
    a = _require_hermitian(a, tol, "A")
    b = _require_hermitian(b, tol, "B")
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (a.shape[0], b.shape[0]):
        raise ValueError(
            f"X shape {x.shape} incompatible with A {a.shape} and B {b.shape}")
    w, v = hermitian_eigh(b)
    if w.size and w[0] < -tol.psd_slack:
        raise ValueError(
            f"B has a negative eigenvalue beyond slack ({w[0]:.3e})")
    if w.size and w[0] > tol.psd_slack:
        inv = (v / w) @ v.conj().T
    else:
        nonzero = w > tol.psd_slack
        inv_w = np.where(nonzero, w, np.inf)
        inv = (v / inv_w) @ v.conj().T
        # range condition: X^dag must live inside range(B)
        projector = (v * nonzero.astype(float)) @ v.conj().T
        residual = x.conj().T - projector @ x.conj().T
        if residual.size and np.abs(residual).max() > tol.eq_atol:
            return False
    s = a - x @ inv @ x.conj().T
    s = (s + s.conj().T) / 2
    return is_psd(s, tol)


def assemble_block2(a: Array, x: Array, b: Array) -> Array:
    """The 2x2 block matrix [[a, x], [x^dag, b]]."""
    top = np.hstack([a, x])
    bottom = np.hstack([x.conj().T, b])
    return np.vstack([top, bottom])


def partial_transpose(m: Array, dims: BipartiteDims, which: str = "B") -> Array:
    """Transpose one tensor factor of a bipartite operator.

    ``which`` selects the factor: "A" for the first, "B" for the second.
    Involutive and trace-preserving.
    """
    m = np.asarray(m, dtype=np.complex128)
    dims.check(m)
    dA, dB = dims.dA, dims.dB
    r = m.reshape(dA, dB, dA, dB)
    if which == "A":
        r = r.transpose(2, 1, 0, 3)
    elif which == "B":
        r = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return r.reshape(dims.total, dims.total).copy()


def _as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unit_vector(d: int, seed: int | np.random.Generator) -> Array:
    """Deterministic pseudo-random unit vector in C^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = _as_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def haar_unitary(d: int, seed: int | np.random.Generator) -> Array:
    """Deterministic Haar-distributed d x d unitary (QR of a Ginibre matrix
    with the standard phase fix)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = _as_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases
