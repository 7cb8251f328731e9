"""Entanglement-witness analysis for the block map families.

A Choi matrix W of a positive but not completely positive map is an
entanglement witness: product vectors give nonnegative expectations while
some entangled vector gives a negative one.  This module builds the
companion PPT state whose pairing with W is negative (certifying that W
detects a PPT entangled state, hence indecomposability of the map), the
product-vector zero sets whose span certifies optimality, and the
partial-transpose covariance identity behind nd-optimality.

Index conventions match ``maps``: basis index i splits as i = p * 2K + r
(block p, intra-block r, 0-based internally, 1-based in reports).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    Array,
    BipartiteDims,
    DEFAULT_TOL,
    Tolerance,
    dagger,
    hermitian_eigenvalues,
    hermiticity_defect,
    min_eigenvalue,
    partial_transpose,
)
from .maps import MapSpec, build, phase_table, zeta


class NecessityViolation(ValueError):
    """Raised when a phase has modulus < 1: the zero-product construction
    needs unimodular phases, and sub-unit phases break optimality."""

    def __init__(self, pairs: list[tuple[int, int]], moduli: list[float]):
        self.pairs = pairs
        self.moduli = moduli
        detail = ", ".join(
            f"z[{i},{j}] (|z| = {m:.6f})" for (i, j), m in zip(pairs, moduli))
        super().__init__(f"phases with modulus below 1: {detail}")


@dataclass
class Witness:
    """Hermitian matrix on a bipartite space, with the map spec it came
    from (when built via a Choi matrix) kept for downstream builders."""

    matrix: Array
    dims: BipartiteDims
    provenance: MapSpec | None = None
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        total = self.dims.total
        if self.matrix.shape != (total, total):
            raise ValueError(
                f"matrix must be {total}x{total}, got {self.matrix.shape}")
        defect = hermiticity_defect(self.matrix)
        if defect > self.tol.eq_atol:
            raise ValueError(f"witness matrix is not Hermitian ({defect:.3e})")

    def block(self, i: int, j: int) -> Array:
        """(i, j) block of size dB x dB, 1-based."""
        da, db = self.dims.dA, self.dims.dB
        if not (1 <= i <= da and 1 <= j <= da):
            raise IndexError(f"block index ({i}, {j}) out of range for {da}")
        return self.matrix[(i - 1) * db: i * db, (j - 1) * db: j * db]

    def min_eigenvalue(self, tol: Tolerance | None = None) -> float:
        return min_eigenvalue(self.matrix, tol or self.tol)


def expectation_product(w: Witness, psi: Array, phi: Array) -> float:
    """<psi kron phi| W |psi kron phi>, enforced real within 1e-10."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if psi.shape != (w.dims.dA,) or phi.shape != (w.dims.dB,):
        raise ValueError("factor dimensions do not match the witness")
    v = np.kron(psi, phi)
    value = complex(np.vdot(v, w.matrix @ v))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


@dataclass
class PptDetector:
    """The companion state: positive, positive under partial transposition,
    unit trace, built block-by-block from the witness.

    ``block_table`` tags each 1-based block pair: "diagonal",
    "stripe2Kl" (blocks a multiple of 2K apart, carrying -W_ij), "zero"
    (same block row, off-diagonal) or "residual" (single scaled entry).
    ``normalization`` is the scalar the raw block sum was divided by.
    """

    n: int
    k: int
    rho: Array
    block_table: dict[tuple[int, int], str]
    normalization: float
    trace_raw: float
    psd_ok: bool
    ppt_ok: bool
    min_eig: float
    min_eig_gamma: float

    @property
    def d(self) -> int:
        return 2 * self.k * self.n


def build_ppt_detector(n: int, k: int, z, witness: Witness,
                       tol: Tolerance = DEFAULT_TOL) -> PptDetector:
    """Assemble the detector state from the witness blocks.

    Diagonal blocks are I_d/d - (2K(N-1) - 1) W_ii; blocks whose indices
    differ by a multiple of 2K carry -W_ij; other cross-block positions get
    the single entry zeta / ((2K)^2 N(N-1)); same-block off-diagonal blocks
    vanish.  The raw block sum has trace 2K+1; normalizing by the measured
    trace must reproduce that constant or the construction is broken.
    """
    spec = witness.provenance
    if spec is None or spec.family != "new_family":
        raise ValueError(
            "detector construction needs a witness built from the general "
            "block family")
    if (spec.n, spec.k) != (n, k):
        raise ValueError(
            f"witness provenance is (n, k) = ({spec.n}, {spec.k}), "
            f"requested ({n}, {k})")
    z_table = phase_table(z, n, tol)
    if np.abs(z_table - spec.z).max() > 1e-12:
        raise ValueError("phase table does not match the witness provenance")

    d, b = spec.d, spec.block_side
    w4 = witness.matrix.reshape(d, d, d, d)
    c = 2 * k * (n - 1) - 1
    residual_scale = 1.0 / ((2 * k) ** 2 * n * (n - 1))
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    table: dict[tuple[int, int], str] = {}
    for i in range(d):
        for j in range(d):
            p, q, r, s = i // b, j // b, i % b, j % b
            blk = np.zeros((d, d), dtype=np.complex128)
            if i == j:
                blk = np.eye(d) / d - c * w4[i, :, i, :]
                tag = "diagonal"
            elif p == q:
                tag = "zero"
            elif r == s:
                blk = -w4[i, :, j, :]
                tag = "stripe2Kl"
            else:
                blk[i, j] = zeta(z_table, p, q) * residual_scale
                tag = "residual"
            rho[i * d:(i + 1) * d, j * d:(j + 1) * d] = blk
            table[(i + 1, j + 1)] = tag

    trace_raw = float(np.trace(rho).real)
    if abs(trace_raw - (2 * k + 1)) > 1e-8:
        raise ValueError(
            f"raw trace {trace_raw!r} differs from 2K+1 = {2 * k + 1}; "
            "the block rule is broken")
    rho = rho / trace_raw
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"normalized trace {trace!r} is not 1")

    ev = min_eigenvalue(rho, tol)
    gamma = partial_transpose(rho, BipartiteDims(d, d), "B")
    ev_gamma = min_eigenvalue((gamma + dagger(gamma)) / 2, tol)
    return PptDetector(
        n=n, k=k, rho=rho, block_table=table,
        normalization=1.0 / trace_raw, trace_raw=trace_raw,
        psd_ok=ev >= -tol.psd_slack, ppt_ok=ev_gamma >= -tol.psd_slack,
        min_eig=ev, min_eig_gamma=ev_gamma)


@dataclass
class DetectionReport:
    """Tr(W rho) with its three-part decomposition and the closed-form
    constant -1 / ((2K+1)(2K)^3 N(N-1)) it must reproduce."""

    value: float
    stripe_sum: float
    near_diagonal_sum: float
    residual_sum: float
    expected_constant: float
    matches_constant: bool

    def describe(self) -> str:
        verdict = "matches" if self.matches_constant else "DIFFERS FROM"
        return (f"detection value {self.value!r} {verdict} closed form "
                f"{self.expected_constant!r}")


def detection_value(w: Witness, rho: PptDetector,
                    tol: Tolerance = DEFAULT_TOL) -> DetectionReport:
    """Pairing Tr(W rho), decomposed by the block tag of rho."""
    d = rho.d
    if w.dims.total != d * d:
        raise ValueError("witness and detector dimensions do not match")
    w4 = w.matrix.reshape(d, d, d, d)
    r4 = rho.rho.reshape(d, d, d, d)
    sums = {"stripe": 0.0 + 0.0j, "near": 0.0 + 0.0j, "residual": 0.0 + 0.0j}
    for i in range(d):
        for j in range(d):
            term = complex(np.einsum("ab,ba->", w4[i, :, j, :], r4[j, :, i, :]))
            tag = rho.block_table[(j + 1, i + 1)]
            if tag in ("diagonal", "stripe2Kl"):
                sums["stripe"] += term
            elif tag == "zero":
                sums["near"] += term
            else:
                sums["residual"] += term
    total = sums["stripe"] + sums["near"] + sums["residual"]
    direct = complex(np.trace(w.matrix @ rho.rho))
    if abs(total - direct) > 1e-10 or abs(direct.imag) > 1e-10:
        raise ValueError("partial sums do not recombine to Tr(W rho)")
    n, k = rho.n, rho.k
    expected = -1.0 / ((2 * k + 1) * (2 * k) ** 3 * n * (n - 1))
    value = float(direct.real)
    return DetectionReport(
        value=value,
        stripe_sum=float(sums["stripe"].real),
        near_diagonal_sum=float(sums["near"].real),
        residual_sum=float(sums["residual"].real),
        expected_constant=expected,
        matches_constant=abs(value - expected) <= 1e-10)


@dataclass
class ZeroProductSet:
    """d^2 product-vector pairs with vanishing witness expectation.

    Cases: d diagonal pairs (e_k, e_k); for each m < n a pair built from
    phi = e_m + exp(-i alpha/2) e_n used on both sides, and a pair
    (e_m + i exp(-i alpha/2) e_n, e_m - i exp(-i alpha/2) e_n), where
    alpha is the argument of the phase attached to the blocks of (m, n).
    ``conjugate_left`` records whether the left tensor factor had to be
    conjugated for the expectations to vanish (auto-detected).
    """

    d: int
    pairs: list[tuple[Array, Array]]
    tags: list[str]
    alphas: dict[tuple[int, int], float]
    expectations: Array
    max_abs_expectation: float
    sigma_min: float
    conjugate_left: bool

    @property
    def cardinality(self) -> int:
        return len(self.pairs)


_CONVENTION: bool | None = None


def _product_value(matrix: Array, left: Array, right: Array,
                   conjugate_left: bool) -> complex:
    lvec = np.conj(left) if conjugate_left else left
    v = np.kron(lvec, right)
    return complex(np.vdot(v, matrix @ v))


def _zero_pairs(spec: MapSpec) -> tuple[list, list, dict]:
    d, b = spec.d, spec.block_side
    eye = np.eye(d, dtype=np.complex128)
    pairs: list[tuple[Array, Array]] = []
    tags: list[str] = []
    alphas: dict[tuple[int, int], float] = {}
    for idx in range(d):
        pairs.append((eye[idx], eye[idx]))
        tags.append(f"diag {idx + 1}")
    for m in range(d):
        for n_idx in range(m + 1, d):
            alpha = float(np.angle(zeta(spec.z, m // b, n_idx // b)))
            alphas[(m + 1, n_idx + 1)] = alpha
            shift = np.exp(-0.5j * alpha)
            phi = eye[m] + shift * eye[n_idx]
            pairs.append((phi, phi))
            tags.append(f"phi {m + 1},{n_idx + 1}")
            phi_p = eye[m] + 1j * shift * eye[n_idx]
            phi_m = eye[m] - 1j * shift * eye[n_idx]
            pairs.append((phi_p, phi_m))
            tags.append(f"phi-tilde {m + 1},{n_idx + 1}")
    return pairs, tags, alphas


def _stacked_sigma_min(pairs: list[tuple[Array, Array]],
                       tol: Tolerance) -> float:
    columns = np.stack(
        [np.kron(left, right) for left, right in pairs], axis=1)
    columns = columns / np.linalg.norm(columns, axis=0, keepdims=True)
    gram = dagger(columns) @ columns
    w = hermitian_eigenvalues(gram, tol)
    return float(np.sqrt(max(0.0, float(w[0]))))


def detected_left_conjugation(tol: Tolerance = DEFAULT_TOL) -> bool:
    """Decide once whether zero expectations need the left factor
    conjugated, by trying both on a small phase-twisted instance.  A
    twisted phase is essential: at z = 1 both conventions give zeros."""
    global _CONVENTION
    if _CONVENTION is None:
        probe = MapSpec.new_family(2, 1, z=np.exp(1j * np.pi / 3))
        w = build(probe).choi(tol)
        pairs, _, _ = _zero_pairs(probe)
        residual = {
            flag: max(abs(_product_value(w.matrix, left, right, flag))
                      for left, right in pairs)
            for flag in (False, True)
        }
        _CONVENTION = residual[True] < residual[False]
    return _CONVENTION


def optimality_zero_set(spec: MapSpec, w: Witness,
                        tol: Tolerance = DEFAULT_TOL) -> ZeroProductSet:
    """Construct and verify the d^2 zero-expectation product vectors.

    Requires every phase unimodular; sub-unit phases raise
    NecessityViolation naming the offending 1-based block pairs.
    """
    if spec.family != "new_family":
        raise ValueError("zero sets are defined for the general block family")
    if w.dims.total != spec.d * spec.d:
        raise ValueError("witness dimensions do not match the map parameters")
    bad_pairs, bad_moduli = [], []
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            modulus = abs(spec.z[i, j])
            if modulus < 1.0 - tol.eq_atol:
                bad_pairs.append((i + 1, j + 1))
                bad_moduli.append(float(modulus))
    if bad_pairs:
        raise NecessityViolation(bad_pairs, bad_moduli)

    conj_left = detected_left_conjugation(tol)
    pairs, tags, alphas = _zero_pairs(spec)
    values = np.array([
        _product_value(w.matrix, left, right, conj_left)
        for left, right in pairs])
    return ZeroProductSet(
        d=spec.d, pairs=pairs, tags=tags, alphas=alphas,
        expectations=values,
        max_abs_expectation=float(np.abs(values).max()),
        sigma_min=_stacked_sigma_min(pairs, tol),
        conjugate_left=conj_left)


@dataclass
class NdOptimalityReport:
    """Covariance identity (1 kron V) W (1 kron V^dag) = W^Gamma with
    V = I_N kron U^dag, where Gamma transposes the first tensor factor,
    plus the verdicts for the transformed zero set on W^Gamma."""

    covariance_residual: float
    gamma_zero_set_ok: bool
    gamma_spanning_ok: bool
    max_gamma_expectation: float
    gamma_sigma_min: float
    conjugate_left: bool


def nd_optimality_check(spec: MapSpec, w: Witness,
                        tol: Tolerance = DEFAULT_TOL) -> NdOptimalityReport:
    """Verify the covariance identity and that the zero set, pushed through
    (identity, V), certifies the partially transposed witness."""
    if spec.family != "new_family":
        raise ValueError("the covariance check needs the general block family")
    d = spec.d
    if w.dims.total != d * d:
        raise ValueError("witness dimensions do not match the map parameters")
    v = np.kron(np.eye(spec.n), dagger(spec.u))
    big_v = np.kron(np.eye(d), v)
    gamma = partial_transpose(w.matrix, w.dims, "A")
    residual = float(np.abs(big_v @ w.matrix @ dagger(big_v) - gamma).max())

    conj_left = detected_left_conjugation(tol)
    pairs, _, _ = _zero_pairs(spec)
    moved = [(left, v @ right) for left, right in pairs]
    values = np.array([
        _product_value(gamma, left, right, conj_left)
        for left, right in moved])
    max_exp = float(np.abs(values).max())
    sigma = _stacked_sigma_min(moved, tol)
    return NdOptimalityReport(
        covariance_residual=residual,
        gamma_zero_set_ok=max_exp <= 1e-10,
        gamma_spanning_ok=sigma > 1e-8,
        max_gamma_expectation=max_exp,
        gamma_sigma_min=sigma,
        conjugate_left=conj_left)


def antisymmetric_conjugation_identity(u: Array) -> float:
    """Max residual of (U^dag e_rs U)^T = U e_rs^T U^dag over basis units.

    Vanishes whenever U^T = -U (and, in fact, whenever U^T = +U); a generic
    unitary with neither symmetry gives an O(1) residual.
    """
    u = np.asarray(u, dtype=np.complex128)
    m = u.shape[0]
    worst = 0.0
    unit = np.zeros((m, m), dtype=np.complex128)
    for r in range(m):
        for s in range(m):
            unit[r, s] = 1.0
            lhs = (dagger(u) @ unit @ u).T
            rhs = u @ unit.T @ dagger(u)
            worst = max(worst, float(np.abs(lhs - rhs).max()))
            unit[r, s] = 0.0
    return worst
