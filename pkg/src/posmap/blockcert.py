"""Block-matrix positivity certificates.

A :class:`BlockSpec` describes an N x N block matrix with K x K blocks:
diagonal blocks (1 - alpha_i) I_K and off-diagonal blocks -z_ij M_ij (upper
triangle; lower blocks are forced by Hermiticity).  When the data satisfy

* the defining relation   M_ij M_ij^dag = alpha_j M_ii,
* the product relation    M_ij M_kj^dag = alpha_j M_ik,
* the diagonal bound      M_ii <= alpha_i I_K,

the assembled matrix is positive semidefinite.  ``inductive_certify``
re-derives that fact constructively: it eliminates the last block row and
column, rescales the remaining data, and recurses down to a single block,
verifying every inequality the elimination relies on along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    Array,
    DEFAULT_TOL,
    Tolerance,
    dagger,
    hermitian_eigenvalues,
    hermiticity_defect,
    min_eigenvalue,
)


@dataclass
class BlockSpec:
    """Data of one block-matrix instance.

    ``alphas`` are the N weights (summing to 1), ``z`` an N x N complex array
    whose strict upper triangle holds the phases, ``blocks`` maps 0-based
    pairs (i, j) with i < j to the K x K off-diagonal data, and
    ``diag_blocks`` lists the N Hermitian PSD diagonal data M_ii.
    """

    alphas: Array
    z: Array
    blocks: dict[tuple[int, int], Array]
    diag_blocks: list[Array]

    @property
    def N(self) -> int:
        return len(self.alphas)

    @property
    def K(self) -> int:
        return self.diag_blocks[0].shape[0]

    def block(self, i: int, j: int) -> Array:
        """M_ij for any pair, using M_ji = M_ij^dag below the diagonal."""
        if i == j:
            return self.diag_blocks[i]
        if i < j:
            return self.blocks[(i, j)]
        return dagger(self.blocks[(j, i)])

    def phase(self, i: int, j: int) -> complex:
        if i == j:
            return 1.0
        return complex(self.z[i, j]) if i < j else complex(np.conj(self.z[j, i]))

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> None:
        n, k = self.N, self.K
        a = np.asarray(self.alphas, dtype=float)
        if a.ndim != 1 or n < 1:
            raise ValueError("alphas must be a nonempty 1-D array")
        if abs(a.sum() - 1.0) > tol.eq_atol:
            raise ValueError(f"weights must sum to 1, got {a.sum()!r}")
        if a.min() < -tol.eq_atol or a.max() > 1.0 + tol.eq_atol:
            raise ValueError("each weight must lie in [0, 1]")
        if self.z.shape != (n, n):
            raise ValueError(f"z must be {n}x{n}, got {self.z.shape}")
        for i in range(n):
            for j in range(i + 1, n):
                if abs(self.z[i, j]) > 1.0 + tol.eq_atol:
                    raise ValueError(
                        f"|z[{i + 1},{j + 1}]| = {abs(self.z[i, j]):.6f} > 1")
        if len(self.diag_blocks) != n:
            raise ValueError("need one diagonal block per weight")
        for i, m in enumerate(self.diag_blocks):
            if m.shape != (k, k):
                raise ValueError("diagonal blocks must share one size")
            if hermiticity_defect(m) > tol.eq_atol:
                raise ValueError(f"diagonal block {i + 1} is not Hermitian")
            w = hermitian_eigenvalues(m, tol)
            if w[0] < -tol.psd_slack:
                raise ValueError(
                    f"diagonal block {i + 1} is not PSD (min eig {w[0]:.3e})")
        expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
        if set(self.blocks) != expected:
            raise ValueError("blocks must cover exactly the pairs i < j")
        for (i, j), m in self.blocks.items():
            if m.shape != (k, k):
                raise ValueError(f"block ({i + 1},{j + 1}) has wrong shape")
        # a vanishing weight forces its whole block row/column to vanish:
        # M_ij M_ij^dag = alpha_j M_ii and M_ii <= alpha_i I leave no room
        for idx in range(n):
            if a[idx] > tol.eq_atol:
                continue
            for (i, j), m in self.blocks.items():
                if idx in (i, j) and np.abs(m).max() > np.sqrt(tol.eq_atol):
                    raise ValueError(
                        f"weight {idx + 1} vanishes but block "
                        f"({i + 1},{j + 1}) does not")

    @classmethod
    def from_scalar_data(cls, alphas: Array, x: Array, z: Array) -> "BlockSpec":
        """Rank-one 1 x 1 recipe: M_ij = sqrt(a_i a_j) x_i conj(x_j) with
        unimodular x_i; always condition-satisfying."""
        a = np.asarray(alphas, dtype=float)
        x = np.asarray(x, dtype=np.complex128)
        n = len(a)
        blocks = {
            (i, j): np.array([[np.sqrt(a[i] * a[j]) * x[i] * np.conj(x[j])]])
            for i in range(n) for j in range(i + 1, n)
        }
        diag = [np.array([[a[i] * abs(x[i]) ** 2]]) for i in range(n)]
        return cls(a, np.asarray(z, dtype=np.complex128), blocks, diag)

    @classmethod
    def from_antisymmetric_data(cls, alphas: Array, psis: list[Array],
                                u: Array, z: Array) -> "BlockSpec":
        """Recipe with even block size: M_ij = sqrt(a_i a_j)
        (|psi_i><psi_j| + u |psi_i*><psi_j*| u^dag) for unit psi_i and an
        antisymmetric unitary u; always condition-satisfying."""
        a = np.asarray(alphas, dtype=float)
        u = np.asarray(u, dtype=np.complex128)
        n = len(a)

        def pair(i: int, j: int) -> Array:
            direct = np.outer(psis[i], np.conj(psis[j]))
            twisted = u @ np.outer(np.conj(psis[i]), psis[j]) @ dagger(u)
            return np.sqrt(a[i] * a[j]) * (direct + twisted)

        blocks = {(i, j): pair(i, j) for i in range(n) for j in range(i + 1, n)}
        diag = [pair(i, i) for i in range(n)]
        return cls(a, np.asarray(z, dtype=np.complex128), blocks, diag)


@dataclass
class ConditionReport:
    """Verdicts for the three condition families, with the worst violation
    and its index triple (1-based (i, k, j); the defining relation is the
    k = i case, the diagonal bound reports (i, i, i))."""

    def_ok: bool
    cond1_ok: bool
    cond2_ok: bool
    max_violation: float
    witness_triple: tuple[int, int, int] | None
    def_violation: float = 0.0
    cond1_violation: float = 0.0
    cond2_violation: float = 0.0

    @property
    def passed(self) -> bool:
        return self.def_ok and self.cond1_ok and self.cond2_ok

    def describe(self) -> str:
        names = []
        if not self.def_ok:
            names.append("defining relation")
        if not self.cond1_ok:
            names.append("cond1")
        if not self.cond2_ok:
            names.append("cond2")
        what = ", ".join(names) if names else "all conditions hold"
        return f"{what}; worst violation {self.max_violation:.3e} at {self.witness_triple}"


@dataclass
class StepCheck:
    """Facts verified while eliminating the last block row/column at one
    recursion level (or the direct/base terminal checks)."""

    level: int
    mode: str  # "recursion", "direct" or "base"
    z_bound_ok: bool = True
    max_z_prime: float = 0.0
    conditions: ConditionReport | None = None
    b_bound_ok: bool = True
    b_bound_margin: float = 0.0
    schur_dominance_ok: bool = True
    dominance_margin: float = 0.0
    reduced_psd_ok: bool = True
    reduced_min_eig: float = 0.0

    @property
    def passed(self) -> bool:
        cond = self.conditions.passed if self.conditions is not None else True
        return (self.z_bound_ok and cond and self.b_bound_ok
                and self.schur_dominance_ok and self.reduced_psd_ok)


@dataclass
class InductiveCertificate:
    """Chain of reduced specs plus the per-step verified facts.

    ``failure_step`` counts completed reductions: 0 means the hypotheses
    failed at entry, k >= 1 that the k-th elimination violated one of its
    inequalities.
    """

    chain: list[BlockSpec] = field(default_factory=list)
    steps: list[StepCheck] = field(default_factory=list)
    ok: bool = True
    failure_step: int | None = None
    failure_reason: str | None = None


def assemble(spec: BlockSpec, tol: Tolerance = DEFAULT_TOL) -> Array:
    """The (N K) x (N K) Hermitian matrix described by ``spec``."""
    spec.validate(tol)
    n, k = spec.N, spec.K
    out = np.zeros((n * k, n * k), dtype=np.complex128)
    for i in range(n):
        out[i * k:(i + 1) * k, i * k:(i + 1) * k] = \
            (1.0 - spec.alphas[i]) * np.eye(k)
        for j in range(i + 1, n):
            blk = -spec.z[i, j] * spec.blocks[(i, j)]
            out[i * k:(i + 1) * k, j * k:(j + 1) * k] = blk
            out[j * k:(j + 1) * k, i * k:(i + 1) * k] = dagger(blk)
    return out


def check_conditions(spec: BlockSpec, tol: Tolerance = DEFAULT_TOL) -> ConditionReport:
    """Evaluate the three condition families over all derivable index
    patterns (ordered triples (i, k, j) with i, k < j and i != k, plus the
    k = i defining case and the per-row diagonal bound)."""
    spec.validate(tol)
    n = spec.N
    a = spec.alphas
    worst = {"def": (0.0, None), "cond1": (0.0, None), "cond2": (0.0, None)}

    def note(family: str, value: float, triple: tuple[int, int, int]) -> None:
        if value > worst[family][0]:
            worst[family] = (value, triple)

    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            m_ij = spec.block(i, j)
            viol = float(np.abs(m_ij @ dagger(m_ij) - a[j] * spec.block(i, i)).max())
            note("def", viol, (i + 1, i + 1, j + 1))
            for k_idx in range(n):
                if k_idx in (i, j):
                    continue
                lhs = m_ij @ dagger(spec.block(k_idx, j))
                viol = float(np.abs(lhs - a[j] * spec.block(i, k_idx)).max())
                note("cond1", viol, (i + 1, k_idx + 1, j + 1))
    for i in range(n):
        w = hermitian_eigenvalues(
            spec.block(i, i) - a[i] * np.eye(spec.K), tol)
        note("cond2", max(0.0, float(w[-1])), (i + 1, i + 1, i + 1))

    overall = max(worst.values(), key=lambda pair: pair[0])
    return ConditionReport(
        def_ok=worst["def"][0] <= tol.eq_atol,
        cond1_ok=worst["cond1"][0] <= tol.eq_atol,
        cond2_ok=worst["cond2"][0] <= tol.eq_atol,
        max_violation=overall[0],
        witness_triple=overall[1],
        def_violation=worst["def"][0],
        cond1_violation=worst["cond1"][0],
        cond2_violation=worst["cond2"][0],
    )


def _reduce(spec: BlockSpec) -> tuple[BlockSpec, list[Array]]:
    """One elimination step: drop the last block row/column, renormalize.

    Returns the reduced spec and the diagonal matrices B_i of the Schur
    complement (needed for the dominance checks).
    """
    n, k = spec.N, spec.K
    a_last = float(spec.alphas[-1])
    rest = 1.0 - a_last
    a_new = np.asarray(spec.alphas[:-1], dtype=float) / rest
    z_new = np.ones((n - 1, n - 1), dtype=np.complex128)
    blocks_new: dict[tuple[int, int], Array] = {}
    # the rescale factor sqrt(a'_i a'_j / (a_i a_j)) collapses to 1/(1-a_N)
    # for every pair, including pairs whose blocks vanish with their weight
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            z_new[i, j] = (rest * spec.z[i, j]
                           + a_last * spec.z[i, n - 1] * np.conj(spec.z[j, n - 1]))
            blocks_new[(i, j)] = spec.blocks[(i, j)] / rest
    diag_new = [m / rest for m in spec.diag_blocks[:-1]]
    b_mats = []
    for i in range(n - 1):
        b_i = ((1.0 - a_new[i] * rest) * np.eye(k)
               - abs(spec.z[i, n - 1]) ** 2 * a_last * diag_new[i])
        b_mats.append(b_i)
    reduced = BlockSpec(a_new, z_new, blocks_new, diag_new)
    return reduced, b_mats


def _schur_matrix(reduced: BlockSpec, b_mats: list[Array]) -> Array:
    """Schur complement of the eliminated block, written in the rescaled
    variables: diagonal B_i, off-diagonal -z'_ij M'_ij."""
    n, k = reduced.N, reduced.K
    out = np.zeros((n * k, n * k), dtype=np.complex128)
    for i in range(n):
        out[i * k:(i + 1) * k, i * k:(i + 1) * k] = b_mats[i]
        for j in range(i + 1, n):
            blk = -reduced.z[i, j] * reduced.blocks[(i, j)]
            out[i * k:(i + 1) * k, j * k:(j + 1) * k] = blk
            out[j * k:(j + 1) * k, i * k:(i + 1) * k] = dagger(blk)
    return out


def inductive_certify(spec: BlockSpec,
                      tol: Tolerance = DEFAULT_TOL) -> InductiveCertificate:
    """Replay the elimination proof down to a single block.

    Each step verifies |z'_ij| <= 1, the rescaled conditions, the bound
    B_i >= (1 - alpha'_i) I, dominance of the Schur complement over the
    reduced assembled matrix, and positivity of the reduced matrix itself.
    The returned certificate carries the full chain; on failure it names the
    first violated inequality instead of raising.
    """
    spec.validate(tol)
    cert = InductiveCertificate(chain=[spec])

    entry = check_conditions(spec, tol)
    if not entry.passed:
        cert.ok = False
        cert.failure_step = 0
        cert.failure_reason = entry.describe()
        return cert

    current = spec
    while current.N > 1:
        a_last = float(current.alphas[-1])
        if 1.0 - a_last <= tol.eq_atol:
            # the recursion divides by 1 - alpha_N; at this corner all other
            # weights vanish and the matrix is certified directly
            ev = min_eigenvalue(assemble(current, tol), tol)
            step = StepCheck(level=current.N, mode="direct",
                            reduced_psd_ok=ev >= -tol.psd_slack,
                            reduced_min_eig=ev)
            cert.steps.append(step)
            if not step.passed:
                cert.ok = False
                cert.failure_step = len(cert.steps)
                cert.failure_reason = (
                    f"direct certification failed (min eig {ev:.3e})")
            return cert

        reduced, b_mats = _reduce(current)
        step = StepCheck(level=current.N, mode="recursion")
        n_red, k = reduced.N, reduced.K

        step.max_z_prime = max(
            (abs(reduced.z[i, j]) for i in range(n_red)
             for j in range(i + 1, n_red)), default=0.0)
        step.z_bound_ok = step.max_z_prime <= 1.0 + tol.eq_atol

        step.conditions = check_conditions(reduced, tol)

        margins = []
        for i in range(n_red):
            diff = b_mats[i] - (1.0 - reduced.alphas[i]) * np.eye(k)
            margins.append(min_eigenvalue((diff + dagger(diff)) / 2, tol))
        step.b_bound_margin = min(margins)
        step.b_bound_ok = step.b_bound_margin >= -tol.psd_slack

        dominance = _schur_matrix(reduced, b_mats) - assemble(reduced, tol)
        step.dominance_margin = min_eigenvalue(
            (dominance + dagger(dominance)) / 2, tol)
        step.schur_dominance_ok = step.dominance_margin >= -tol.psd_slack

        step.reduced_min_eig = min_eigenvalue(assemble(reduced, tol), tol)
        step.reduced_psd_ok = step.reduced_min_eig >= -tol.psd_slack

        cert.steps.append(step)
        cert.chain.append(reduced)
        if not step.passed:
            cert.ok = False
            cert.failure_step = len(cert.steps)
            reasons = []
            if not step.z_bound_ok:
                reasons.append(f"|z'| bound ({step.max_z_prime:.6f})")
            if not step.conditions.passed:
                reasons.append(step.conditions.describe())
            if not step.b_bound_ok:
                reasons.append(f"B_i bound ({step.b_bound_margin:.3e})")
            if not step.schur_dominance_ok:
                reasons.append(f"Schur dominance ({step.dominance_margin:.3e})")
            if not step.reduced_psd_ok:
                reasons.append(f"reduced matrix ({step.reduced_min_eig:.3e})")
            cert.failure_reason = "; ".join(reasons)
            return cert
        current = reduced

    ev = min_eigenvalue(assemble(current, tol), tol)
    step = StepCheck(level=1, mode="base",
                     reduced_psd_ok=ev >= -tol.psd_slack, reduced_min_eig=ev)
    cert.steps.append(step)
    if not step.passed:
        cert.ok = False
        cert.failure_step = len(cert.steps)
        cert.failure_reason = f"base case not PSD (min eig {ev:.3e})"
    return cert


def random_phase_table(n: int, rng: np.random.Generator,
                       modulus: str = "unit") -> Array:
    """Strictly-upper phase table: ``modulus`` is "one" (all entries 1),
    "unit" (random unimodular) or "disk" (random with |z| < 1)."""
    z = np.ones((n, n), dtype=np.complex128)
    if modulus == "one":
        return z
    if modulus not in ("unit", "disk"):
        raise ValueError(f"unknown modulus mode {modulus!r}")
    for i in range(n):
        for j in range(i + 1, n):
            phase = np.exp(2j * np.pi * rng.uniform())
            r = 1.0 if modulus == "unit" else rng.uniform(0.0, 1.0)
            z[i, j] = r * phase
    return z


def random_scalar_spec(n: int, rng: np.random.Generator,
                       z_modulus: str = "unit") -> BlockSpec:
    """Condition-satisfying random instance with 1 x 1 blocks."""
    alphas = rng.dirichlet(np.ones(n))
    x = np.exp(2j * np.pi * rng.uniform(size=n))
    return BlockSpec.from_scalar_data(alphas, x, random_phase_table(n, rng, z_modulus))


def random_antisymmetric_spec(n: int, side: int, rng: np.random.Generator,
                              z_modulus: str = "unit") -> BlockSpec:
    """Condition-satisfying random instance with blocks of even size ``side``."""
    if side % 2 != 0 or side < 2:
        raise ValueError("block side must be even and >= 2")
    alphas = rng.dirichlet(np.ones(n))
    u = np.kron(np.eye(side // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    psis = []
    for _ in range(n):
        v = rng.standard_normal(side) + 1j * rng.standard_normal(side)
        psis.append(v / np.linalg.norm(v))
    return BlockSpec.from_antisymmetric_data(
        alphas, psis, u.astype(np.complex128),
        random_phase_table(n, rng, z_modulus))
