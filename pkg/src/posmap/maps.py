"""The six positive-map families and their numerical interfaces.

Every map is stored by its action on matrix units: ``images[i, j]`` is the
value on e_(i+1)(j+1), so applying to X is a single tensor contraction.
Families:

* ``reduction``: X -> (Tr(X) I - X) / (N - 1) on an N x N algebra.
* ``generalized_reduction``: same diagonal action, off-diagonal units are
  scaled by phases -z_ij / (N - 1).
* ``robertson``: the 4 x 4 two-block map with transposition twist
  R(Y) = sigma_y Y^T sigma_y^dag and prefactor 1/2.
* ``generalized_robertson``: the 4K x 4K two-block analogue with an arbitrary
  antisymmetric unitary twist and prefactor 1/(2K).
* ``complex_robertson_extension``: N blocks of size 2, phases z_ij on the
  off-diagonal blocks, prefactor 1/(2(N - 1)).
* ``new_family``: N blocks of size 2K, phases z_ij and antisymmetric unitary
  twist U, prefactor 1/(2K(N - 1)).  The other five are special cases, which
  the test suite exercises as exact identities.

Basis index i (0-based here) splits as i = p * 2K + r into a block index p
and an intra-block index r.  Phases form a strictly-upper table over block
pairs; below the diagonal the conjugate is used so Hermitian inputs map to
Hermitian outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import hermitian_eigh
from .linalg import (
    Array,
    DEFAULT_TOL,
    Tolerance,
    dagger,
    haar_unitary,
)

FAMILIES = (
    "reduction",
    "generalized_reduction",
    "robertson",
    "generalized_robertson",
    "complex_robertson_extension",
    "new_family",
)

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)

SEESAW_IMPROVEMENT = 1e-12
SEESAW_MAX_ALTERNATIONS = 200


def default_antisymmetric_unitary(two_k: int) -> Array:
    """J = I_K kron [[0, 1], [-1, 0]]: real, antisymmetric, orthogonal.

    Odd dimensions are rejected: an antisymmetric matrix of odd size is
    singular, so no antisymmetric unitary exists there.
    """
    if two_k < 2 or two_k % 2 != 0:
        raise ValueError(f"no antisymmetric unitary in odd dimension {two_k}")
    j2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(two_k // 2), j2).astype(np.complex128)


def random_antisymmetric_unitary(two_k: int, seed) -> Array:
    """V J V^T for Haar V; antisymmetric by construction and unitary because
    V^T conj(V) = I."""
    v = haar_unitary(two_k, seed)
    return v @ default_antisymmetric_unitary(two_k) @ v.T


def zeta(z: Array, p: int, q: int) -> complex:
    """Phase closure over block pairs: upper entry for p < q, conjugate
    below, 1 on the diagonal (0-based indices)."""
    if p == q:
        return 1.0 + 0.0j
    return complex(z[p, q]) if p < q else complex(np.conj(z[q, p]))


def phase_table(z, n: int, tol: Tolerance) -> Array:
    """Normalize scalar / array input to an (n, n) table with unit diagonal."""
    if z is None:
        return np.ones((n, n), dtype=np.complex128)
    if np.isscalar(z):
        table = np.ones((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(i + 1, n):
                table[i, j] = z
    else:
        table = np.asarray(z, dtype=np.complex128)
        if table.shape != (n, n):
            raise ValueError(f"phase table must be {n}x{n}, got {table.shape}")
        table = table.copy()
    for i in range(n):
        for j in range(i + 1, n):
            if abs(table[i, j]) > 1.0 + tol.eq_atol:
                raise ValueError(
                    f"|z[{i + 1},{j + 1}]| = {abs(table[i, j]):.6f} exceeds 1")
    return table


def _check_antisymmetric_unitary(u: Array, tol: Tolerance) -> Array:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("twist matrix must be square")
    m = u.shape[0]
    if np.abs(dagger(u) @ u - np.eye(m)).max() > np.sqrt(tol.eq_atol):
        raise ValueError("twist matrix is not unitary")
    if np.abs(u.T + u).max() > np.sqrt(tol.eq_atol):
        raise ValueError("twist matrix is not antisymmetric")
    return u


@dataclass
class MapSpec:
    """Family tag plus parameters.  ``n`` counts blocks, ``k`` is half the
    block side (0 for the scalar-block reduction families), ``z`` the phase
    table (None when the family has no phases), ``u`` the antisymmetric
    unitary twist (None when the family has no twist)."""

    family: str
    n: int
    k: int = 0
    z: Array | None = None
    u: Array | None = None

    def __post_init__(self) -> None:
        tol = DEFAULT_TOL
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family in ("reduction", "generalized_reduction"):
            if self.n < 2:
                raise ValueError("need at least 2 dimensions")
            if self.k != 0:
                raise ValueError("scalar-block family takes no block size")
            if self.u is not None:
                raise ValueError("scalar-block family takes no twist")
            if self.family == "reduction":
                if self.z is not None:
                    raise ValueError("plain reduction takes no phases")
            else:
                self.z = phase_table(self.z, self.n, tol)
            return
        if self.n < 2:
            raise ValueError("block families need at least 2 blocks")
        if self.k < 1:
            raise ValueError("half block size must be >= 1")
        if self.family == "robertson":
            if (self.n, self.k) != (2, 1):
                raise ValueError("robertson is fixed at n = 2, k = 1")
            if self.z is not None:
                raise ValueError("robertson takes no phases")
            self.u = SIGMA_Y.copy() if self.u is None else self.u
            if np.abs(np.asarray(self.u) - SIGMA_Y).max() > tol.eq_atol:
                raise ValueError("robertson twist is fixed to sigma_y")
        elif self.family == "generalized_robertson":
            if self.n != 2:
                raise ValueError("two-block family is fixed at n = 2")
            if self.z is not None:
                raise ValueError("two-block family takes no phases")
            if self.u is None:
                self.u = default_antisymmetric_unitary(2 * self.k)
        elif self.family == "complex_robertson_extension":
            if self.k != 1:
                raise ValueError("phase extension is fixed at k = 1")
            self.z = phase_table(self.z, self.n, tol)
            self.u = SIGMA_Y.copy() if self.u is None else self.u
            if np.abs(np.asarray(self.u) - SIGMA_Y).max() > tol.eq_atol:
                raise ValueError("phase extension twist is fixed to sigma_y")
        else:  # new_family
            self.z = phase_table(self.z, self.n, tol)
            if self.u is None:
                self.u = default_antisymmetric_unitary(2 * self.k)
        self.u = _check_antisymmetric_unitary(self.u, tol)
        if self.u.shape != (2 * self.k, 2 * self.k):
            raise ValueError(
                f"twist must be {2 * self.k}x{2 * self.k}, got {self.u.shape}")

    @property
    def block_side(self) -> int:
        return 2 * self.k if self.k else 1

    @property
    def d(self) -> int:
        return self.n * self.block_side

    # convenience constructors, 1-based in spirit but all sizes are counts
    @classmethod
    def reduction(cls, n: int) -> "MapSpec":
        return cls("reduction", n)

    @classmethod
    def generalized_reduction(cls, n: int, z) -> "MapSpec":
        return cls("generalized_reduction", n, z=z)

    @classmethod
    def robertson(cls) -> "MapSpec":
        return cls("robertson", 2, 1)

    @classmethod
    def generalized_robertson(cls, k: int, u: Array | None = None) -> "MapSpec":
        return cls("generalized_robertson", 2, k, u=u)

    @classmethod
    def complex_robertson_extension(cls, n: int, z) -> "MapSpec":
        return cls("complex_robertson_extension", n, 1, z=z)

    @classmethod
    def new_family(cls, n: int, k: int, z=None,
                   u: Array | None = None) -> "MapSpec":
        return cls("new_family", n, k, z=z, u=u)


@dataclass
class LinearMap:
    """Map stored through its matrix-unit images.

    ``images`` has shape (d_in, d_in, d_out, d_out) with
    ``images[i, j] = map(e_(i+1)(j+1))``; storing all of them makes apply,
    Choi matrix and adjoint single array operations.
    """

    d_in: int
    d_out: int
    images: Array
    spec: MapSpec | None = None

    def __post_init__(self) -> None:
        expected = (self.d_in, self.d_in, self.d_out, self.d_out)
        self.images = np.asarray(self.images, dtype=np.complex128)
        if self.images.shape != expected:
            raise ValueError(
                f"images must have shape {expected}, got {self.images.shape}")
        # Hermiticity preservation: the image of e_ji must be the adjoint of
        # the image of e_ij, otherwise Hermitian inputs leave the Hermitians
        mirror = np.conj(np.transpose(self.images, (1, 0, 3, 2)))
        defect = float(np.abs(self.images - mirror).max())
        if defect > DEFAULT_TOL.eq_atol:
            raise ValueError(
                f"images break Hermiticity preservation (defect {defect:.3e})")

    def apply(self, x: Array) -> Array:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.d_in, self.d_in):
            raise ValueError(
                f"input must be {self.d_in}x{self.d_in}, got {x.shape}")
        return np.tensordot(x, self.images, axes=([0, 1], [0, 1]))

    def choi(self, tol: Tolerance = DEFAULT_TOL):
        """Choi matrix (1/d) sum_ij e_ij kron images[i, j] as a Witness.

        The 1/d factor is part of the convention here: block (i, j) of the
        result is images[i, j] / d.
        """
        from .witness import Witness  # deferred: witness builds on this module
        from .linalg import BipartiteDims

        if self.d_in != self.d_out:
            raise ValueError("Choi matrix needs d_in = d_out")
        d = self.d_in
        w = self.images.transpose(0, 2, 1, 3).reshape(d * d, d * d) / d
        return Witness(matrix=w, dims=BipartiteDims(d, d),
                       provenance=self.spec, tol=tol)

    def adjoint(self) -> "LinearMap":
        """Trace-pairing dual: Tr(A^dag map(B)) = Tr(adjoint(A)^dag B)."""
        images = np.conj(np.transpose(self.images, (2, 3, 0, 1)))
        return LinearMap(self.d_out, self.d_in, images)


def _scalar_block_images(n: int, z: Array | None) -> Array:
    images = np.zeros((n, n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if i == j:
                images[i, i] = np.eye(n)
                images[i, i, i, i] = 0.0
            else:
                factor = 1.0 if z is None else zeta(z, i, j)
                images[i, j, i, j] = -factor
    return images / (n - 1)


def _two_block_apply(x: Array, u: Array) -> Array:
    """[[I Tr X_22, -(X_12 + R(X_21))], [-(X_21 + R(X_12)), I Tr X_11]]
    divided by the block side, with R(Y) = U Y^T U^dag."""
    b = u.shape[0]
    x11, x12 = x[:b, :b], x[:b, b:]
    x21, x22 = x[b:, :b], x[b:, b:]
    twist = lambda y: u @ y.T @ dagger(u)
    out = np.zeros((2 * b, 2 * b), dtype=np.complex128)
    out[:b, :b] = np.trace(x22) * np.eye(b)
    out[b:, b:] = np.trace(x11) * np.eye(b)
    out[:b, b:] = -(x12 + twist(x21))
    out[b:, :b] = -(x21 + twist(x12))
    return out / b


def _phase_extension_apply(x: Array, z: Array, n: int) -> Array:
    """N blocks of size 2: diagonal I_2 (Tr X - Tr X_pp), off-diagonal
    -zeta(p,q) (X_pq + sigma_y X_qp^T sigma_y^dag), all over 2(N-1)."""
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    total = np.trace(x)
    for p in range(n):
        sl_p = slice(2 * p, 2 * p + 2)
        out[sl_p, sl_p] = (total - np.trace(x[sl_p, sl_p])) * np.eye(2)
        for q in range(n):
            if q == p:
                continue
            sl_q = slice(2 * q, 2 * q + 2)
            bridge = x[sl_p, sl_q] + SIGMA_Y @ x[sl_q, sl_p].T @ dagger(SIGMA_Y)
            out[sl_p, sl_q] = -zeta(z, p, q) * bridge
    return out / (2.0 * (n - 1))


def _images_from_apply(d: int, fn) -> Array:
    images = np.zeros((d, d, d, d), dtype=np.complex128)
    unit = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            unit[i, j] = 1.0
            images[i, j] = fn(unit)
            unit[i, j] = 0.0
    return images


def _new_family_images(spec: MapSpec) -> Array:
    """Closed-form unit action.  With i = p b + r, j = q b + s, b = 2K:

    * q = p, s = r: (I_N - e_pp) kron I_b, weighted by the prefactor;
    * q = p, s != r: zero;
    * q != p: -(zeta(p,q) e_pq kron e_rs
               + conj(zeta(p,q)) e_qp kron U e_rs^T U^dag), weighted.

    The conjugate on the second term is forced by Hermiticity preservation.
    """
    n, b, d = spec.n, spec.block_side, spec.d
    u = spec.u
    pref = 1.0 / (b * (n - 1))
    images = np.zeros((d, d, d, d), dtype=np.complex128)
    eye_b = np.eye(b)
    for p in range(n):
        hole = np.eye(n)
        hole[p, p] = 0.0
        diag_image = pref * np.kron(hole, eye_b)
        for r in range(b):
            images[p * b + r, p * b + r] = diag_image
    unit_b = np.zeros((b, b), dtype=np.complex128)
    for r in range(b):
        for s in range(b):
            unit_b[r, s] = 1.0
            twisted = u @ unit_b.T @ dagger(u)
            for p in range(n):
                for q in range(n):
                    if q == p:
                        continue
                    zz = zeta(spec.z, p, q)
                    img = np.zeros((d, d), dtype=np.complex128)
                    img[p * b: p * b + b, q * b: q * b + b] = zz * unit_b
                    img[q * b: q * b + b, p * b: p * b + b] = \
                        np.conj(zz) * twisted
                    images[p * b + r, q * b + s] = -pref * img
            unit_b[r, s] = 0.0
    return images


def build(spec: MapSpec) -> LinearMap:
    """Materialize the family as matrix-unit images."""
    if spec.family == "reduction":
        images = _scalar_block_images(spec.n, None)
    elif spec.family == "generalized_reduction":
        images = _scalar_block_images(spec.n, spec.z)
    elif spec.family in ("robertson", "generalized_robertson"):
        u = spec.u
        images = _images_from_apply(spec.d, lambda x: _two_block_apply(x, u))
    elif spec.family == "complex_robertson_extension":
        z, n = spec.z, spec.n
        images = _images_from_apply(
            spec.d, lambda x: _phase_extension_apply(x, z, n))
    else:
        images = _new_family_images(spec)
    return LinearMap(spec.d, spec.d, images, spec=spec)


@dataclass
class ScanResult:
    """Outcome of the see-saw positivity falsifier."""

    min_value: float
    argmin_vector: Array
    trial_index: int
    trials: int
    seed: int


def _seesaw_refine(images: Array, psi: Array) -> tuple[float, Array]:
    """Alternate between the bottom output eigenvector y of map(|psi><psi|)
    and the bottom eigenvector of the Hermitian form
    (Phi_y)_{ji} = <y| map(e_ij) |y>.  Each half-step is an exact minimizer,
    so the value sequence is nonincreasing."""
    best_value = np.inf
    best_psi = psi
    previous = None
    for _ in range(SEESAW_MAX_ALTERNATIONS):
        h = np.tensordot(np.outer(psi, np.conj(psi)), images,
                         axes=([0, 1], [0, 1]))
        w, vecs = hermitian_eigh(h)
        value = float(w[0])
        y = vecs[:, 0]
        if value < best_value:
            best_value = value
            best_psi = psi
        if previous is not None and previous - value < SEESAW_IMPROVEMENT:
            break
        previous = value
        phi = np.einsum("ijkl,k,l->ji", images, np.conj(y), y)
        phi = (phi + dagger(phi)) / 2.0
        _, pv = hermitian_eigh(phi)
        psi = pv[:, 0]
    return best_value, best_psi


def positivity_scan(linear_map: LinearMap, trials: int = 500,
                    seed: int = 42) -> ScanResult:
    """Multistart see-saw minimization of lambda_min(map(|psi><psi|)).

    Deterministic for fixed (trials, seed): each trial draws from its own
    seed spawned from the master sequence, so results do not depend on
    execution order.  A falsifier only: values near zero do not prove
    positivity, but a clearly negative minimum disproves it.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    children = np.random.SeedSequence(seed).spawn(trials)
    best = ScanResult(np.inf, np.zeros(linear_map.d_in), -1, trials, seed)
    for index, child in enumerate(children):
        rng = np.random.default_rng(child)
        psi = rng.standard_normal(linear_map.d_in) \
            + 1j * rng.standard_normal(linear_map.d_in)
        psi = psi / np.linalg.norm(psi)
        value, argmin = _seesaw_refine(linear_map.images, psi)
        if value < best.min_value:
            best = ScanResult(value, argmin, index, trials, seed)
    return best
