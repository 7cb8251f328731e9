"""Block-matrix specs, the three condition families and the elimination
certificate, cross-checked against numpy pseudo-inverse Schur complements."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from posmap.blockcert import (
    BlockSpec,
    _reduce,
    _schur_matrix,
    assemble,
    check_conditions,
    inductive_certify,
    random_antisymmetric_spec,
    random_phase_table,
    random_scalar_spec,
)
from posmap.linalg import Tolerance, dagger, is_psd


def scalar_half_half():
    return BlockSpec.from_scalar_data(
        np.array([0.5, 0.5]), np.array([1.0 + 0j, 1.0]),
        np.ones((2, 2), dtype=complex))


def cond2_only_spec():
    """Defining relation holds exactly, only the diagonal bound fails.

    With equal weights 1/2 the relation needs |M_12|^2 = M_11 / 2, so
    M_11 = 0.75 forces M_12 = sqrt(0.375) while the bound wants
    M_11 <= 0.5.
    """
    z = np.ones((2, 2), dtype=complex)
    m = 0.75
    return BlockSpec(
        alphas=np.array([0.5, 0.5]),
        z=z,
        blocks={(0, 1): np.array([[np.sqrt(m / 2.0)]], dtype=complex)},
        diag_blocks=[np.array([[m]], dtype=complex),
                     np.array([[m]], dtype=complex)],
    )


def test_two_scalar_blocks_closed_form():
    m = assemble(scalar_half_half())
    np.testing.assert_allclose(m, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(m), [0.0, 1.0], atol=1e-12)


def test_block_and_phase_closure(rng):
    spec = random_antisymmetric_spec(3, 2, rng)
    np.testing.assert_allclose(spec.block(2, 0), dagger(spec.block(0, 2)),
                               atol=0.0)
    assert spec.phase(1, 0) == np.conj(spec.phase(0, 1))
    assert spec.phase(2, 2) == 1.0
    assert spec.N == 3
    assert spec.K == 2


def test_recipes_satisfy_conditions(rng):
    for n in (2, 3, 4):
        for mode in ("one", "unit", "disk"):
            for spec in (random_scalar_spec(n, rng, mode),
                         random_antisymmetric_spec(n, 2, rng, mode)):
                report = check_conditions(spec)
                assert report.passed, report.describe()
                assert report.max_violation <= 1e-10


def test_antisymmetric_diagonal_bound_is_tight(rng):
    # M_ii is alpha_i times a rank-2 projector, so the bound holds with equality
    spec = random_antisymmetric_spec(3, 4, rng)
    for i in range(3):
        top = np.linalg.eigvalsh(spec.diag_blocks[i]).max()
        assert abs(top - spec.alphas[i]) <= 1e-12


def test_certify_random_recipes(rng):
    for n in (2, 3, 4):
        spec = random_scalar_spec(n, rng)
        cert = inductive_certify(spec)
        assert cert.ok
        assert cert.failure_step is None
        assert len(cert.chain) == n
        assert is_psd(assemble(spec))


def test_chain_modes_and_levels():
    spec = BlockSpec.from_scalar_data(
        np.array([0.5, 0.25, 0.25]),
        np.exp(2j * np.pi * np.array([0.1, 0.4, 0.7])),
        np.ones((3, 3), dtype=complex))
    cert = inductive_certify(spec)
    assert cert.ok
    assert [s.mode for s in cert.steps] == ["recursion", "recursion", "base"]
    assert [s.level for s in cert.steps] == [3, 2, 1]
    for step in cert.steps:
        assert step.passed
        assert step.max_z_prime <= 1.0 + 1e-12


def test_step_margins_are_reported(rng):
    cert = inductive_certify(random_antisymmetric_spec(4, 2, rng))
    assert cert.ok
    recursion_steps = [s for s in cert.steps if s.mode == "recursion"]
    assert recursion_steps
    for step in recursion_steps:
        assert step.b_bound_ok
        assert step.b_bound_margin >= -1e-9
        assert step.schur_dominance_ok
        assert step.reduced_psd_ok
        assert step.reduced_min_eig >= -1e-9


def test_degenerate_last_weight_uses_direct_mode():
    spec = BlockSpec.from_scalar_data(
        np.array([0.0, 1.0]), np.array([1.0 + 0j, 1.0]),
        np.ones((2, 2), dtype=complex))
    cert = inductive_certify(spec)
    assert cert.ok
    assert [s.mode for s in cert.steps] == ["direct"]


def test_schur_matrix_matches_pinv_oracle(rng):
    for spec in (random_scalar_spec(4, rng),
                 random_antisymmetric_spec(3, 2, rng, "disk")):
        m = assemble(spec)
        cut = spec.K * (spec.N - 1)
        a, x, b = m[:cut, :cut], m[:cut, cut:], m[cut:, cut:]
        reduced, b_mats = _reduce(spec)
        lib = _schur_matrix(reduced, b_mats)
        oracle = a - x @ np.linalg.pinv(b) @ dagger(x)
        np.testing.assert_allclose(lib, oracle, atol=1e-12)


def test_schur_matrix_dominates_reduced_assembly(rng):
    spec = random_scalar_spec(3, rng)
    reduced, b_mats = _reduce(spec)
    gap = _schur_matrix(reduced, b_mats) - assemble(reduced)
    assert np.linalg.eigvalsh(gap).min() >= -1e-10


def test_perturbed_offdiagonal_breaks_defining_relation(rng):
    spec = random_scalar_spec(3, rng)
    spec.blocks[(0, 1)] = 1.05 * spec.blocks[(0, 1)]
    report = check_conditions(spec)
    assert not report.def_ok
    assert report.max_violation > 1e-10
    i, k, j = report.witness_triple
    assert k == i  # defining relation is the k = i slice
    cert = inductive_certify(spec)
    assert not cert.ok
    assert cert.failure_step == 0
    assert "def" in cert.failure_reason


def test_pure_diagonal_bound_failure():
    spec = cond2_only_spec()
    report = check_conditions(spec)
    assert report.def_ok
    assert report.cond1_ok
    assert not report.cond2_ok
    assert report.witness_triple == (1, 1, 1)
    assert abs(report.cond2_violation - 0.25) <= 1e-12
    cert = inductive_certify(spec)
    assert not cert.ok
    assert cert.failure_step == 0
    assert "cond2" in cert.failure_reason
    # and the assembled matrix really is indefinite
    assert np.linalg.eigvalsh(assemble(spec)).min() < -0.05


def test_failure_describe_names_the_family():
    report = check_conditions(cond2_only_spec())
    assert "cond2" in report.describe()


def test_validate_rejects_bad_weights():
    spec = scalar_half_half()
    spec.alphas = np.array([0.6, 0.5])
    with pytest.raises(ValueError):
        spec.validate()


def test_validate_rejects_large_phase():
    spec = scalar_half_half()
    spec.z = np.array([[1.0, 1.2], [1.0, 1.0]], dtype=complex)
    with pytest.raises(ValueError):
        spec.validate()


def test_validate_rejects_nonhermitian_diagonal():
    spec = random_antisymmetric_spec(2, 2, np.random.default_rng(0))
    spec.diag_blocks[0] = spec.diag_blocks[0] + np.array([[0.0, 0.1],
                                                          [0.0, 0.0]])
    with pytest.raises(ValueError):
        spec.validate()


def test_validate_rejects_missing_pair():
    spec = random_scalar_spec(3, np.random.default_rng(1))
    del spec.blocks[(0, 2)]
    with pytest.raises(ValueError):
        spec.validate()


def test_validate_rejects_mass_on_vanishing_weight():
    spec = BlockSpec(
        alphas=np.array([0.0, 1.0]),
        z=np.ones((2, 2), dtype=complex),
        blocks={(0, 1): np.array([[0.3]], dtype=complex)},
        diag_blocks=[np.zeros((1, 1), dtype=complex),
                     np.array([[1.0]], dtype=complex)],
    )
    with pytest.raises(ValueError):
        spec.validate()


def test_random_phase_table_modes(rng):
    ones = random_phase_table(4, rng, "one")
    np.testing.assert_array_equal(ones, np.ones((4, 4)))
    unit = random_phase_table(4, rng, "unit")
    disk = random_phase_table(4, rng, "disk")
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(abs(unit[i, j]) - 1.0) <= 1e-12
            assert abs(disk[i, j]) <= 1.0
    with pytest.raises(ValueError):
        random_phase_table(4, rng, "square")


def test_antisymmetric_recipe_needs_even_side(rng):
    with pytest.raises(ValueError):
        random_antisymmetric_spec(2, 3, rng)


def test_tight_tolerance_still_accepts_recipes(rng):
    tol = Tolerance(psd_slack=1e-11, eq_atol=1e-12)
    spec = random_scalar_spec(3, rng)
    assert inductive_certify(spec, tol).ok


@given(seed=st.integers(min_value=0, max_value=2**32 - 1),
       n=st.integers(min_value=2, max_value=3))
def test_random_recipes_always_certify(seed, n):
    g = np.random.default_rng(seed)
    spec = random_scalar_spec(n, g, "disk")
    cert = inductive_certify(spec)
    assert cert.ok
    assert is_psd(assemble(spec))
