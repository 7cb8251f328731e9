"""Witnesses: product expectations, the companion PPT state with its
detection constant, zero sets, and the two optimality checks."""

from collections import Counter

import numpy as np
import pytest

from posmap.linalg import BipartiteDims, dagger, kron, partial_transpose
from posmap.maps import (
    SIGMA_Y,
    MapSpec,
    build,
    default_antisymmetric_unitary,
    positivity_scan,
    zeta,
)
from posmap.witness import (
    NecessityViolation,
    Witness,
    antisymmetric_conjugation_identity,
    build_ppt_detector,
    detected_left_conjugation,
    detection_value,
    expectation_product,
    nd_optimality_check,
    optimality_zero_set,
)
from posmap.linalg import haar_unitary


GRID = [(2, 1), (3, 1), (2, 2)]


def grid_witness(n, k, z):
    spec = MapSpec.new_family(n, k, z)
    return spec, build(spec).choi()


def unit_table(n, seed):
    g = np.random.default_rng(seed)
    return np.where(np.triu(np.ones((n, n)), 1) > 0,
                    np.exp(2j * np.pi * g.uniform(size=(n, n))), 1.0)


def detection_constant(n, k):
    return -1.0 / ((2 * k + 1) * (2 * k) ** 3 * n * (n - 1))


def test_witness_requires_hermitian():
    with pytest.raises(ValueError):
        Witness(np.array([[0.0, 1.0], [0.0, 0.0]]), BipartiteDims(1, 2))


def test_witness_requires_matching_shape():
    with pytest.raises(ValueError):
        Witness(np.eye(3), BipartiteDims(2, 2))


def test_expectation_examples():
    w = build(MapSpec.reduction(2)).choi()
    e0 = np.array([1.0, 0.0])
    e1 = np.array([0.0, 1.0])
    assert abs(expectation_product(w, e0, e1) - 0.5) <= 1e-12
    assert abs(expectation_product(w, e0, e0)) <= 1e-12


def test_expectation_rejects_wrong_lengths():
    w = build(MapSpec.reduction(2)).choi()
    with pytest.raises(ValueError):
        expectation_product(w, np.ones(3), np.ones(2))


def test_expectation_bridges_to_the_map(unit_vector):
    # <x kron y| W |x kron y> = <y| map(|x*><x*|) |y> / d
    spec = MapSpec.new_family(2, 1, np.exp(0.8j))
    lm = build(spec)
    w = lm.choi()
    x, y = unit_vector(spec.d), unit_vector(spec.d)
    lhs = expectation_product(w, x, y)
    rhs = np.vdot(y, lm.apply(np.outer(x.conj(), x)) @ y).real / spec.d
    assert abs(lhs - rhs) <= 1e-12


def test_block_accessor_bounds():
    w = build(MapSpec.reduction(2)).choi()
    with pytest.raises(IndexError):
        w.block(0, 1)
    with pytest.raises(IndexError):
        w.block(1, 3)


def test_witness_is_block_positive_but_not_psd():
    spec, w = grid_witness(2, 1, 1.0)
    assert w.min_eigenvalue() < -1e-3
    scan = positivity_scan(build(spec), trials=100, seed=42)
    assert scan.min_value >= -1e-9


@pytest.mark.parametrize("n,k", GRID)
def test_detector_structure(n, k):
    spec, w = grid_witness(n, k, 1.0)
    det = build_ppt_detector(n, k, 1.0, w)
    d = 2 * k * n
    assert det.d == d
    assert abs(det.trace_raw - (2 * k + 1)) <= 1e-10
    assert abs(det.normalization * det.trace_raw - 1.0) <= 1e-12
    assert abs(np.trace(det.rho).real - 1.0) <= 1e-12
    assert det.psd_ok and det.ppt_ok
    assert det.min_eig >= -1e-9
    assert det.min_eig_gamma >= -1e-9
    counts = Counter(det.block_table.values())
    b = 2 * k
    assert counts["diagonal"] == d
    assert counts["zero"] == n * b * (b - 1)
    assert counts["stripe2Kl"] == n * (n - 1) * b
    assert counts["residual"] == n * (n - 1) * b * (b - 1)


def test_detector_block_tags_spot_checks():
    _, w = grid_witness(3, 1, 1.0)
    det = build_ppt_detector(3, 1, 1.0, w)
    assert det.block_table[(1, 1)] == "diagonal"
    assert det.block_table[(1, 2)] == "zero"       # same block row
    assert det.block_table[(1, 3)] == "stripe2Kl"  # indices 2K apart
    assert det.block_table[(1, 4)] == "residual"
    assert det.block_table[(2, 3)] == "residual"   # crosses the block edge


def test_detector_blocks_carry_witness_data():
    z = np.exp(0.77j)
    spec, w = grid_witness(2, 1, z)
    det = build_ppt_detector(2, 1, z, w)
    d = det.d
    rho4 = det.rho.reshape(d, d, d, d)
    # stripe block (1,3) is -W_13 after normalization
    np.testing.assert_allclose(rho4[0, :, 2, :],
                               -w.block(1, 3) * det.normalization, atol=1e-13)
    # residual block (1,4) has a single scaled entry at position (1,4)
    blk = rho4[0, :, 3, :]
    nz = np.argwhere(np.abs(blk) > 1e-15)
    np.testing.assert_array_equal(nz, [[0, 3]])
    expected = z / ((2 * 1) ** 2 * 2 * 1) * det.normalization
    assert abs(blk[0, 3] - expected) <= 1e-13
    # same-block off-diagonal blocks vanish
    assert np.abs(rho4[0, :, 1, :]).max() == 0.0


@pytest.mark.parametrize("n,k", GRID)
def test_detection_constant(n, k):
    spec, w = grid_witness(n, k, 1.0)
    det = build_ppt_detector(n, k, 1.0, w)
    rep = detection_value(w, det)
    assert rep.matches_constant
    assert abs(rep.value - detection_constant(n, k)) <= 1e-10
    assert abs(rep.near_diagonal_sum) <= 1e-12
    assert rep.value < 0.0
    total = rep.stripe_sum + rep.near_diagonal_sum + rep.residual_sum
    assert abs(total - rep.value) <= 1e-12


def test_detection_partial_sums_closed_form():
    # stripe and residual pieces have their own closed forms
    for n, k in GRID:
        _, w = grid_witness(n, k, 1.0)
        det = build_ppt_detector(n, k, 1.0, w)
        rep = detection_value(w, det)
        denom = (2 * k + 1) * (2 * k) ** 3 * n * (n - 1)
        assert abs(rep.stripe_sum - (2 * k - 2) / denom) <= 1e-12
        assert abs(rep.residual_sum + (2 * k - 1) / denom) <= 1e-12


@pytest.mark.parametrize("n,k", [(2, 1), (2, 2)])
def test_detection_constant_survives_twisted_phases(n, k):
    z = unit_table(n, seed=100 + n + k)
    spec, w = grid_witness(n, k, z)
    det = build_ppt_detector(n, k, z, w)
    rep = detection_value(w, det)
    assert rep.matches_constant
    assert abs(rep.value - detection_constant(n, k)) <= 1e-10


def test_detection_mismatch_is_reported_with_both_numbers():
    z = np.exp(2.0j)
    spec_t, w_t = grid_witness(2, 1, z)
    _, w_plain = grid_witness(2, 1, 1.0)
    det = build_ppt_detector(2, 1, 1.0, w_plain)
    rep = detection_value(w_t, det)
    assert not rep.matches_constant
    text = rep.describe()
    assert "DIFFERS" in text
    assert repr(rep.value) in text
    assert repr(rep.expected_constant) in text


def test_detector_provenance_guards():
    _, w = grid_witness(2, 1, 1.0)
    with pytest.raises(ValueError):
        build_ppt_detector(3, 1, 1.0, w)  # wrong shape
    with pytest.raises(ValueError):
        build_ppt_detector(2, 1, np.exp(0.4j), w)  # wrong phases
    rob = build(MapSpec.robertson()).choi()
    with pytest.raises(ValueError):
        build_ppt_detector(2, 1, 1.0, rob)  # wrong family


def test_detector_trace_guard_fires_on_scaled_witness():
    spec, w = grid_witness(2, 1, 1.0)
    scaled = Witness(w.matrix * 1.01, w.dims, provenance=spec)
    with pytest.raises(ValueError) as err:
        build_ppt_detector(2, 1, 1.0, scaled)
    assert "2.99" in str(err.value)
    assert "3" in str(err.value)


def test_detection_rejects_mismatched_dimensions():
    _, w_small = grid_witness(2, 1, 1.0)
    _, w_big = grid_witness(3, 1, 1.0)
    det = build_ppt_detector(3, 1, 1.0, w_big)
    with pytest.raises(ValueError):
        detection_value(w_small, det)


def test_zero_set_structure_plain():
    spec, w = grid_witness(2, 1, 1.0)
    zs = optimality_zero_set(spec, w)
    assert zs.cardinality == 16
    assert zs.d == 4
    assert sum(1 for t in zs.tags if t.startswith("diag")) == 4
    assert sum(1 for t in zs.tags if t.startswith("phi ")) == 6
    assert sum(1 for t in zs.tags if t.startswith("phi-tilde")) == 6
    assert zs.max_abs_expectation <= 1e-10
    assert zs.sigma_min > 1e-8
    assert zs.conjugate_left is False


@pytest.mark.parametrize("n,k", GRID)
def test_zero_set_with_twisted_phases(n, k):
    z = unit_table(n, seed=7 * n + k)
    spec, w = grid_witness(n, k, z)
    zs = optimality_zero_set(spec, w)
    d = 2 * k * n
    assert zs.cardinality == d * d
    assert zs.max_abs_expectation <= 1e-10
    assert zs.sigma_min > 1e-8


def test_zero_set_records_phase_angles():
    theta = np.pi / 3
    spec, w = grid_witness(2, 1, np.exp(1j * theta))
    zs = optimality_zero_set(spec, w)
    # (1,3) straddles the two blocks, (1,2) stays inside the first
    assert abs(zs.alphas[(1, 3)] - theta) <= 1e-12
    assert zs.alphas[(1, 2)] == 0.0


def test_zero_set_sigma_min_matches_svd_oracle():
    spec, w = grid_witness(2, 2, 1.0)
    zs = optimality_zero_set(spec, w)
    columns = np.stack([np.kron(a, b) for a, b in zs.pairs], axis=1)
    columns = columns / np.linalg.norm(columns, axis=0, keepdims=True)
    oracle = np.linalg.svd(columns, compute_uv=False).min()
    assert abs(zs.sigma_min - oracle) <= 1e-8


def test_zero_set_global_phase_invariance():
    base = unit_table(3, seed=41)
    for theta in (0.0, 0.9, 2.2):
        z = np.where(np.triu(np.ones((3, 3)), 1) > 0,
                     base * np.exp(1j * theta), 1.0)
        spec, w = grid_witness(3, 1, z)
        zs = optimality_zero_set(spec, w)
        assert zs.max_abs_expectation <= 1e-10


def test_zero_set_requires_unimodular_phases():
    spec, w = grid_witness(2, 1, 0.9)
    with pytest.raises(NecessityViolation) as err:
        optimality_zero_set(spec, w)
    assert err.value.pairs == [(1, 2)]
    assert abs(err.value.moduli[0] - 0.9) <= 1e-12
    assert "0.9" in str(err.value)


def test_zero_set_rejects_other_families():
    w = build(MapSpec.reduction(3)).choi()
    with pytest.raises(ValueError):
        optimality_zero_set(MapSpec.reduction(3), w)


def test_left_conjugation_convention_is_stable():
    assert detected_left_conjugation() is False
    assert detected_left_conjugation() is False  # cached second call


@pytest.mark.parametrize("n,k", GRID)
def test_nd_optimality_grid(n, k):
    z = unit_table(n, seed=13 * n + k)
    spec, w = grid_witness(n, k, z)
    rep = nd_optimality_check(spec, w)
    assert rep.covariance_residual <= 1e-12
    assert rep.gamma_zero_set_ok
    assert rep.gamma_spanning_ok
    assert rep.max_gamma_expectation <= 1e-10
    assert rep.gamma_sigma_min > 1e-8


def test_nd_covariance_identity_direct():
    spec, w = grid_witness(2, 2, 1.0)
    d = spec.d
    v = kron(np.eye(spec.n), dagger(spec.u))
    lhs = kron(np.eye(d), v) @ w.matrix @ kron(np.eye(d), dagger(v))
    gamma = partial_transpose(w.matrix, BipartiteDims(d, d), "A")
    assert np.abs(lhs - gamma).max() <= 1e-12


def test_conjugation_identity_controls():
    assert antisymmetric_conjugation_identity(SIGMA_Y) <= 1e-15
    assert antisymmetric_conjugation_identity(
        default_antisymmetric_unitary(4)) <= 1e-15
    # a symmetric unitary also satisfies the identity ...
    wu = haar_unitary(4, seed=9)
    theta = np.random.default_rng(4).uniform(0.0, 2 * np.pi, 4)
    symmetric = wu @ np.diag(np.exp(1j * theta)) @ wu.T
    assert antisymmetric_conjugation_identity(symmetric) <= 1e-12
    # ... so the honest negative control is a generic unitary
    assert antisymmetric_conjugation_identity(haar_unitary(4, seed=2)) > 0.1


def test_zeta_matches_block_phase_lookup():
    z = unit_table(4, seed=77)
    spec = MapSpec.new_family(4, 1, z)
    for p in range(4):
        for q in range(4):
            expected = 1.0 if p == q else (
                z[p, q] if p < q else np.conj(z[q, p]))
            assert abs(zeta(spec.z, p, q) - expected) <= 1e-15
