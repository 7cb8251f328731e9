"""Acceptance gate: eight criteria, one test each.

Every test prints a single ``PASS criterion N`` line carrying the measured
numbers, so ``pytest -v`` (or ``-s``) reads as a checklist.  Tolerances are
pinned inline on purpose; they must not drift with library defaults.
"""

import json
import time

import numpy as np

from posmap.blockcert import (
    assemble,
    check_conditions,
    inductive_certify,
    random_antisymmetric_spec,
    random_scalar_spec,
)
from posmap.cli import main
from posmap.linalg import (
    assemble_block2,
    dagger,
    haar_unitary,
    is_psd,
    schur_positivity,
)
from posmap.maps import MapSpec, build, positivity_scan
from posmap.witness import (
    build_ppt_detector,
    detection_value,
    nd_optimality_check,
    optimality_zero_set,
)

DETECTION_GRID = [(2, 1), (3, 1), (2, 2)]
NEW_FAMILY_GRID = [(2, 1), (3, 1), (2, 2), (3, 2)]


def _pass(num, text):
    print(f"PASS criterion {num}: {text}")


def _unit_table(n, seed):
    g = np.random.default_rng(seed)
    return np.where(np.triu(np.ones((n, n)), 1) > 0,
                    np.exp(2j * np.pi * g.uniform(size=(n, n))), 1.0)


def test_criterion_1_block_soundness():
    """>= 1000 random condition-satisfying specs, (N, K) up to (4, 2):
    all PSD within 1e-9 and fully certified, in under 60 s."""
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    count = 0
    for n in (2, 3, 4):
        for recipe in ("scalar", "antisymmetric"):
            for mode in ("unit", "disk"):
                for _ in range(84):
                    if recipe == "scalar":
                        spec = random_scalar_spec(n, rng, mode)
                    else:
                        spec = random_antisymmetric_spec(n, 2, rng, mode)
                    assert check_conditions(spec).passed
                    assert is_psd(assemble(spec))  # psd_slack 1e-9
                    cert = inductive_certify(spec)
                    assert cert.ok
                    assert all(step.passed for step in cert.steps)
                    count += 1
    elapsed = time.perf_counter() - start
    assert count >= 1000
    assert elapsed < 60.0
    _pass(1, f"{count} specs certified, 100% PSD, {elapsed:.1f}s")


def test_criterion_2_six_family_positivity():
    """500-trial see-saw scans stay above -1e-9 for every family
    instance on the full grid."""
    instances = []
    for n in range(2, 7):
        instances.append(MapSpec.reduction(n))
        instances.append(MapSpec.generalized_reduction(n, _unit_table(n, 20 + n)))
        g = np.random.default_rng(40 + n)
        sub = _unit_table(n, 30 + n) * np.where(
            np.triu(np.ones((n, n)), 1) > 0, g.uniform(0.2, 1.0, (n, n)), 1.0)
        instances.append(MapSpec.generalized_reduction(n, sub))
    instances.append(MapSpec.robertson())
    instances.append(MapSpec.generalized_robertson(1))
    instances.append(MapSpec.generalized_robertson(2))
    instances.append(MapSpec.complex_robertson_extension(2, _unit_table(2, 51)))
    instances.append(MapSpec.complex_robertson_extension(3, _unit_table(3, 52)))
    for n, k in NEW_FAMILY_GRID:
        instances.append(MapSpec.new_family(n, k, 1.0))
        instances.append(MapSpec.new_family(n, k, _unit_table(n, 60 + 2 * n + k)))

    worst = 0.0
    for spec in instances:
        res = positivity_scan(build(spec), trials=500, seed=42)
        assert res.min_value >= -1e-9, (spec.family, spec.n, spec.k,
                                        res.min_value)
        worst = min(worst, res.min_value)
    _pass(2, f"{len(instances)} instances scanned, worst minimum {worst:.2e}")


def test_criterion_3_witness_negativity():
    """Choi matrices: -1/N for the plain reduction family, strictly
    negative for the general block family."""
    for n in range(2, 7):
        w = build(MapSpec.reduction(n)).choi()
        assert abs(w.min_eigenvalue() + 1.0 / n) <= 1e-9, n
    floors = []
    for n, k in NEW_FAMILY_GRID:
        w = build(MapSpec.new_family(n, k, 1.0)).choi()
        ev = w.min_eigenvalue()
        assert ev < -1e-3, (n, k, ev)
        floors.append(ev)
    _pass(3, "reduction Choi at -1/N for N=2..6; block-family minima "
             f"{[f'{v:.3f}' for v in floors]}")


def test_criterion_4_ppt_detection_constants():
    """Companion states are PPT with unit trace and reproduce the
    closed-form detection constant."""
    values = []
    for n, k in DETECTION_GRID:
        spec = MapSpec.new_family(n, k, 1.0)
        w = build(spec).choi()
        det = build_ppt_detector(n, k, 1.0, w)
        assert abs(np.trace(det.rho).real - 1.0) <= 1e-10
        assert det.min_eig >= -1e-9
        assert det.min_eig_gamma >= -1e-9
        rep = detection_value(w, det)
        assert abs(rep.near_diagonal_sum) <= 1e-12
        assert rep.value < 0.0
        expected = -1.0 / ((2 * k + 1) * (2 * k) ** 3 * n * (n - 1))
        if abs(rep.value - expected) > 1e-10:
            # negativity and PPT hold, so report both numbers and fail
            raise AssertionError(
                f"detection constant mismatch at (N, K) = ({n}, {k}): "
                f"measured {rep.value!r}, closed form {expected!r}")
        values.append(rep.value)
    _pass(4, f"detection values {values} match the closed form within 1e-10")


def test_criterion_5_optimality_zero_sets():
    """Random unimodular phases: d^2 zero-expectation product vectors
    spanning the full product space."""
    stats = []
    for n, k in DETECTION_GRID:
        z = _unit_table(n, seed=500 + 10 * n + k)
        spec = MapSpec.new_family(n, k, z)
        w = build(spec).choi()
        zs = optimality_zero_set(spec, w)
        d = 2 * k * n
        assert zs.cardinality == d * d
        assert zs.max_abs_expectation <= 1e-10
        assert zs.sigma_min > 1e-8
        stats.append((zs.cardinality, float(zs.sigma_min)))
    _pass(5, f"(cardinality, sigma_min) per grid point: {stats}")


def test_criterion_6_nd_optimality():
    """Partial transpose covariance plus optimality of the transposed
    witness via the transformed zero set."""
    residuals = []
    for n, k in DETECTION_GRID:
        z = _unit_table(n, seed=600 + 10 * n + k)
        spec = MapSpec.new_family(n, k, z)
        w = build(spec).choi()
        rep = nd_optimality_check(spec, w)
        assert rep.covariance_residual <= 1e-12
        assert rep.gamma_zero_set_ok
        assert rep.max_gamma_expectation <= 1e-10
        assert rep.gamma_spanning_ok
        assert rep.gamma_sigma_min > 1e-8
        residuals.append(rep.covariance_residual)
    _pass(6, f"covariance residuals {residuals}, transformed sets span")


def test_criterion_7_schur_oracle_equivalence():
    """schur_positivity and the plain eigenvalue bound must agree on
    10,000 random block instances with sizes up to 4, including singular
    lower-right blocks on and off their range condition."""
    rng = np.random.default_rng(7007)
    disagreements = 0
    checked = 0
    for trial in range(10_000):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(1, 5))
        kind = trial % 4
        if kind == 0:
            low = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            b = low @ low.conj().T
            x = rng.uniform(0.2, 1.5) * (
                rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
        elif kind == 1:
            g = rng.standard_normal((m + n, m + n)) \
                + 1j * rng.standard_normal((m + n, m + n))
            full = g @ g.conj().T
            a, x, b = full[:m, :m], full[:m, m:], full[m:, m:]
        else:
            rank = int(rng.integers(0, n))
            q = haar_unitary(n, seed=rng)
            diag = np.zeros(n)
            diag[:rank] = rng.uniform(0.5, 2.0, rank)
            b = q @ np.diag(diag) @ dagger(q)
            b = (b + dagger(b)) / 2.0
            c = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
            x = dagger(b @ c)
            if kind == 3:
                null = q[:, n - 1] if rank < n else None
                if null is not None:
                    wvec = rng.standard_normal(m) + 1j * rng.standard_normal(m)
                    x = x + np.outer(wvec, null.conj())
        if kind != 1:
            ah = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            a = (ah + dagger(ah)) / 2.0 + rng.uniform(-1.0, 3.0) * np.eye(m)
        via_schur = schur_positivity(a, x, b)
        via_eigen = is_psd(assemble_block2(a, x, b))
        if via_schur != via_eigen:
            disagreements += 1
        checked += 1
    assert checked == 10_000
    assert disagreements == 0
    _pass(7, f"{checked} instances, {disagreements} disagreements")


def test_criterion_8_report_determinism(tmp_path, capsys):
    """Two identically configured full-report runs emit byte-identical
    files in --no-timestamp mode."""
    argv = ["full-report", "--family", "new", "--N", "2", "--K", "1",
            "--z", "1", "--trials", "40", "--seed", "42", "--no-timestamp"]
    path_a = tmp_path / "run_a.json"
    path_b = tmp_path / "run_b.json"
    assert main(argv + ["--output", str(path_a)]) == 0
    assert main(argv + ["--output", str(path_b)]) == 0
    capsys.readouterr()
    bytes_a = path_a.read_bytes()
    bytes_b = path_b.read_bytes()
    assert bytes_a == bytes_b
    report = json.loads(bytes_a)
    assert report["status"] == "pass"
    assert "timestamp" not in report
    _pass(8, f"two runs, {len(bytes_a)} identical bytes")
