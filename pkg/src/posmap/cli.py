"""Command-line front end.

Subcommands build map or block specs from flags or config files, run the
certification pipelines, and emit reports.  Exit codes: 0 all checks
passed, 1 a mathematical check failed (the report names the invariant),
2 usage or IO error.  Reports embed the seed, tolerances and resolved
conventions so a run can be audited from its output alone.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .blockcert import (
    BlockSpec,
    assemble,
    check_conditions,
    inductive_certify,
    random_antisymmetric_spec,
    random_scalar_spec,
)
from .eigen import BACKEND
from .linalg import DEFAULT_TOL, Tolerance, hermiticity_defect, min_eigenvalue
from .maps import MapSpec, build, positivity_scan
from .witness import (
    NecessityViolation,
    build_ppt_detector,
    detection_value,
    nd_optimality_check,
    optimality_zero_set,
)
from . import serialize


class UsageError(Exception):
    """Bad flags, unreadable files, malformed specs: exit code 2."""


FAMILY_ALIASES = {
    "reduction": "reduction",
    "generalized-reduction": "generalized_reduction",
    "gen-reduction": "generalized_reduction",
    "robertson": "robertson",
    "generalized-robertson": "generalized_robertson",
    "gen-robertson": "generalized_robertson",
    "complex-robertson-extension": "complex_robertson_extension",
    "cre": "complex_robertson_extension",
    "new": "new_family",
    "new-family": "new_family",
}

MAP_COMMANDS = ("build", "check-positive", "witness", "detect", "optimality",
                "nd-optimality", "full-report")
BLOCK_FAMILY_COMMANDS = ("detect", "optimality", "nd-optimality", "full-report")

CONFIG_KEYS = {
    "seed", "trials", "psd_slack", "eq_atol", "format",
    "family", "n", "k", "z", "map_spec", "block_spec",
    "kind", "recipe", "side", "z_modulus",
}

DIMENSION_LIMIT = 4096  # refuse d^2 beyond this without --allow-large


@dataclass
class RunConfig:
    command: str
    seed: int = 42
    trials: int = 500
    tol: Tolerance = DEFAULT_TOL
    output: str | None = None
    format: str = "json"
    no_timestamp: bool = False
    allow_large: bool = False
    include_matrix: bool = False
    map_spec: MapSpec | None = None
    block_spec: BlockSpec | None = None
    kind: str = "map"
    recipe: str = "scalar"
    n: int | None = None
    side: int | None = None
    z_modulus: str = "unit"


def _load_json_file(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path!r} is not valid JSON: {exc}") from exc


def _parse_complex(text: str, what: str) -> complex:
    try:
        return complex(text)
    except ValueError as exc:
        raise UsageError(
            f"{what} must be a complex literal like '1' or '0.5+0.5j', "
            f"got {text!r}") from exc


def _config_value(args, config: dict, key: str, default):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _coerce(value, kind, what):
    # config files arrive as arbitrary JSON; turn bad types into exit-2 errors
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(
            f"{what} must be {kind.__name__}-like, got {value!r}") from exc


def _resolve_seed(args, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    if "seed" in config:
        return _coerce(config["seed"], int, "config seed")
    env = os.environ.get("POSMAP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(
                f"POSMAP_SEED must be an integer, got {env!r}") from exc
    return 42


def _map_spec_from_inputs(args, config: dict) -> MapSpec:
    spec_obj = None
    if getattr(args, "spec", None):
        spec_obj = _load_json_file(args.spec, "map spec")
    elif config.get("map_spec") is not None:
        spec_obj = config["map_spec"]
    if spec_obj is not None:
        try:
            return serialize.map_spec_from_json(spec_obj)
        except ValueError as exc:
            raise UsageError(f"malformed map spec: {exc}") from exc

    family_raw = _config_value(args, config, "family", None)
    if family_raw is None:
        raise UsageError("need --family (or --spec / config map_spec)")
    family = FAMILY_ALIASES.get(str(family_raw))
    if family is None:
        raise UsageError(
            f"unknown family {family_raw!r}; choose from "
            f"{sorted(FAMILY_ALIASES)}")

    n = _config_value(args, config, "n", None)
    k = _config_value(args, config, "k", None)
    z = None
    if getattr(args, "z", None) is not None:
        z = _parse_complex(args.z, "--z")
    elif getattr(args, "z_file", None):
        entries = _load_json_file(args.z_file, "phase table")
        if n is None:
            raise UsageError("--z-file needs --N to size the table")
        try:
            z = serialize.phase_entries_from_json(entries, int(n), "phase table")
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    elif "z" in config and config["z"] is not None:
        raw = config["z"]
        if isinstance(raw, dict):
            z = complex(_coerce(raw.get("re", 0.0), float, "config z re"),
                        _coerce(raw.get("im", 0.0), float, "config z im"))
        else:
            z = _coerce(raw, complex, "config z")
    u = None
    if getattr(args, "u_file", None):
        u = serialize.matrix_from_json(
            _load_json_file(args.u_file, "twist matrix"), "twist matrix")

    try:
        if family == "reduction":
            if n is None:
                raise UsageError("reduction needs --N")
            return MapSpec.reduction(int(n))
        if family == "generalized_reduction":
            if n is None:
                raise UsageError("generalized reduction needs --N")
            return MapSpec.generalized_reduction(int(n), z)
        if family == "robertson":
            return MapSpec.robertson()
        if family == "generalized_robertson":
            return MapSpec.generalized_robertson(int(k) if k else 1, u)
        if family == "complex_robertson_extension":
            if n is None:
                raise UsageError("phase extension needs --N")
            return MapSpec.complex_robertson_extension(int(n), z)
        if n is None:
            raise UsageError("the general block family needs --N")
        return MapSpec.new_family(int(n), int(k) if k else 1, z, u)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid map spec: {exc}") from exc


def _block_spec_from_inputs(args, config: dict) -> BlockSpec:
    spec_obj = None
    if getattr(args, "spec", None):
        spec_obj = _load_json_file(args.spec, "block spec")
    elif config.get("block_spec") is not None:
        spec_obj = config["block_spec"]
    if spec_obj is None:
        raise UsageError("need --spec FILE (or config block_spec)")
    try:
        spec = serialize.block_spec_from_json(spec_obj)
        spec.validate()
    except ValueError as exc:
        raise UsageError(f"malformed block spec: {exc}") from exc
    return spec


def build_config(args) -> RunConfig:
    config: dict = {}
    if getattr(args, "config", None):
        config = _load_json_file(args.config, "config file")
        unknown = set(config) - CONFIG_KEYS
        if unknown:
            raise UsageError(
                f"config file has unknown keys {sorted(unknown)}; "
                f"allowed: {sorted(CONFIG_KEYS)}")

    tol = Tolerance(
        psd_slack=_coerce(_config_value(args, config, "psd_slack", 1e-9),
                          float, "psd_slack"),
        eq_atol=_coerce(_config_value(args, config, "eq_atol", 1e-10),
                        float, "eq_atol"),
    )
    cfg = RunConfig(
        command=args.command,
        seed=_resolve_seed(args, config),
        trials=_coerce(_config_value(args, config, "trials", 500),
                       int, "trials"),
        tol=tol,
        output=getattr(args, "output", None),
        format=str(_config_value(args, config, "format", "json")),
        no_timestamp=bool(getattr(args, "no_timestamp", False)),
        allow_large=bool(getattr(args, "allow_large", False)),
        include_matrix=bool(getattr(args, "include_matrix", False)),
        kind=str(_config_value(args, config, "kind", "map")),
        recipe=str(_config_value(args, config, "recipe", "scalar")),
        z_modulus=str(_config_value(args, config, "z_modulus", "unit")),
    )
    if cfg.format not in ("json", "csv", "text"):
        raise UsageError(f"unknown format {cfg.format!r}")
    if cfg.trials < 1:
        raise UsageError("--trials must be at least 1")

    if args.command == "certify-block":
        cfg.block_spec = _block_spec_from_inputs(args, config)
    elif args.command == "build" and cfg.kind == "block":
        n = _config_value(args, config, "n", None)
        if n is None:
            raise UsageError("build --kind block needs --N")
        cfg.n = _coerce(n, int, "--N")
        side = _config_value(args, config, "side", None)
        cfg.side = _coerce(side, int, "--side") if side is not None else None
        if cfg.recipe not in ("scalar", "antisymmetric"):
            raise UsageError(f"unknown recipe {cfg.recipe!r}")
        if cfg.z_modulus not in ("one", "unit", "disk"):
            raise UsageError(f"unknown z modulus mode {cfg.z_modulus!r}")
    elif args.command in MAP_COMMANDS:
        cfg.map_spec = _map_spec_from_inputs(args, config)
        if args.command in BLOCK_FAMILY_COMMANDS \
                and cfg.map_spec.family != "new_family":
            raise UsageError(
                f"{args.command} needs the general block family "
                "(--family new)")
    return cfg


def _guard_dimension(d: int, cfg: RunConfig) -> None:
    if d * d > DIMENSION_LIMIT and not cfg.allow_large:
        raise UsageError(
            f"total dimension d^2 = {d * d} exceeds {DIMENSION_LIMIT}; "
            "pass --allow-large to proceed")


def _unit_moduli(spec: MapSpec, tol: Tolerance) -> bool:
    if spec.z is None:
        return True
    return all(
        abs(abs(spec.z[i, j]) - 1.0) <= tol.eq_atol
        for i in range(spec.n) for j in range(i + 1, spec.n))


def _cmd_build(cfg: RunConfig):
    failures: list[dict] = []
    if cfg.kind == "block":
        rng = np.random.default_rng(cfg.seed)
        if cfg.recipe == "scalar":
            spec = random_scalar_spec(cfg.n, rng, cfg.z_modulus)
        else:
            side = cfg.side if cfg.side is not None else 2
            spec = random_antisymmetric_spec(cfg.n, side, rng, cfg.z_modulus)
        report = check_conditions(spec, cfg.tol)
        result = {
            "block_spec": serialize.block_spec_to_json(spec),
            "n": spec.N,
            "block_side": spec.K,
            "dimension": spec.N * spec.K,
            "conditions_pass": report.passed,
            "max_condition_violation": report.max_violation,
        }
        if not report.passed:
            failures.append({"invariant": "recipe_conditions",
                             "detail": report.describe()})
    else:
        spec = cfg.map_spec
        result = {
            "map_spec": serialize.map_spec_to_json(spec),
            "d": spec.d,
            "block_side": spec.block_side,
        }
    return result, failures


def _certificate_payload(cert) -> dict:
    steps = []
    for step in cert.steps:
        entry = {
            "level": step.level,
            "mode": step.mode,
            "passed": step.passed,
            "max_z_prime": step.max_z_prime,
            "b_bound_margin": step.b_bound_margin,
            "dominance_margin": step.dominance_margin,
            "reduced_min_eig": step.reduced_min_eig,
        }
        if step.conditions is not None:
            entry["conditions_pass"] = step.conditions.passed
            entry["max_condition_violation"] = step.conditions.max_violation
        steps.append(entry)
    return {
        "ok": cert.ok,
        "chain_length": len(cert.chain),
        "failure_step": cert.failure_step,
        "failure_reason": cert.failure_reason,
        "steps": steps,
    }


def _cmd_certify_block(cfg: RunConfig):
    spec = cfg.block_spec
    failures: list[dict] = []
    report = check_conditions(spec, cfg.tol)
    matrix = assemble(spec, cfg.tol)
    ev = min_eigenvalue(matrix, cfg.tol)
    cert = inductive_certify(spec, cfg.tol)
    result = {
        "n": spec.N,
        "block_side": spec.K,
        "conditions": {
            "def_ok": report.def_ok,
            "cond1_ok": report.cond1_ok,
            "cond2_ok": report.cond2_ok,
            "max_violation": report.max_violation,
            "witness_triple": report.witness_triple,
            "def_violation": report.def_violation,
            "cond1_violation": report.cond1_violation,
            "cond2_violation": report.cond2_violation,
        },
        "min_eigenvalue": ev,
        "psd_ok": ev >= -cfg.tol.psd_slack,
        "certificate": _certificate_payload(cert),
    }
    for name, ok in (("def", report.def_ok), ("cond1", report.cond1_ok),
                     ("cond2", report.cond2_ok)):
        if not ok:
            failures.append({
                "invariant": name,
                "detail": report.describe(),
                "witness_triple": report.witness_triple,
            })
    if report.passed and not cert.ok:
        failures.append({
            "invariant": "induction_step",
            "detail": cert.failure_reason,
            "failure_step": cert.failure_step,
        })
    if report.passed and cert.ok and ev < -cfg.tol.psd_slack:
        failures.append({
            "invariant": "assembled_psd",
            "detail": f"min eigenvalue {ev!r} below -psd_slack",
        })
    return result, failures


def _cmd_check_positive(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    scan = positivity_scan(build(spec), trials=cfg.trials, seed=cfg.seed)
    result = {
        "map_spec": serialize.map_spec_to_json(spec),
        "min_value": scan.min_value,
        "trial_index": scan.trial_index,
        "trials": scan.trials,
        "argmin_vector": serialize.vector_to_json(scan.argmin_vector),
    }
    failures = []
    if scan.min_value < -cfg.tol.psd_slack:
        failures.append({
            "invariant": "positivity_scan",
            "detail": f"see-saw found min value {scan.min_value!r} below "
                      f"-psd_slack = {-cfg.tol.psd_slack!r}",
        })
    return result, failures


def _cmd_witness(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    w = build(spec).choi(cfg.tol)
    ev = w.min_eigenvalue(cfg.tol)
    result = {
        "map_spec": serialize.map_spec_to_json(spec),
        "d": spec.d,
        "min_eigenvalue": ev,
        "hermiticity_defect": hermiticity_defect(w.matrix),
        "is_entanglement_witness": ev < -1e-3,
    }
    if cfg.include_matrix:
        result["matrix"] = serialize.matrix_to_json(w.matrix)
    return result, []


def _detect_sections(spec: MapSpec, cfg: RunConfig):
    """Detector + pairing sections shared by detect and full-report."""
    w = build(spec).choi(cfg.tol)
    failures: list[dict] = []
    try:
        detector = build_ppt_detector(spec.n, spec.k, spec.z, w, cfg.tol)
    except ValueError as exc:
        failures.append({"invariant": "detector_trace", "detail": str(exc)})
        return {"error": str(exc)}, failures
    report = detection_value(w, detector, cfg.tol)
    unit_z = _unit_moduli(spec, cfg.tol)
    result = {
        "detector": {
            "psd_ok": detector.psd_ok,
            "ppt_ok": detector.ppt_ok,
            "min_eig": detector.min_eig,
            "min_eig_gamma": detector.min_eig_gamma,
            "trace_raw": detector.trace_raw,
            "normalization": detector.normalization,
        },
        "detection": {
            "value": report.value,
            "stripe_sum": report.stripe_sum,
            "near_diagonal_sum": report.near_diagonal_sum,
            "residual_sum": report.residual_sum,
            "expected_constant": report.expected_constant,
            "matches_constant": report.matches_constant,
            "constant_applies": unit_z,
        },
    }
    if not detector.psd_ok:
        failures.append({"invariant": "detector_psd",
                         "detail": f"min eigenvalue {detector.min_eig!r}"})
    if not detector.ppt_ok:
        failures.append({
            "invariant": "detector_ppt",
            "detail": f"partial transpose min eigenvalue "
                      f"{detector.min_eig_gamma!r}"})
    if unit_z:
        if not report.matches_constant:
            failures.append({
                "invariant": "detection_constant",
                "detail": f"detection value {report.value!r} does not match "
                          f"the closed form {report.expected_constant!r}",
            })
        if report.value >= 0.0:
            failures.append({
                "invariant": "detection_negative",
                "detail": f"detection value {report.value!r} is not negative",
            })
    return result, failures


def _cmd_detect(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    result, failures = _detect_sections(spec, cfg)
    result = {"map_spec": serialize.map_spec_to_json(spec), **result}
    return result, failures


def _optimality_sections(spec: MapSpec, w, cfg: RunConfig):
    failures: list[dict] = []
    try:
        zero_set = optimality_zero_set(spec, w, cfg.tol)
    except NecessityViolation as exc:
        failures.append({
            "invariant": "phase_modulus",
            "detail": str(exc),
            "pairs": [list(p) for p in exc.pairs],
        })
        return {"necessity_failed": True, "pairs": [list(p) for p in exc.pairs]}, failures
    result = {
        "cardinality": zero_set.cardinality,
        "expected_cardinality": spec.d * spec.d,
        "max_abs_expectation": zero_set.max_abs_expectation,
        "sigma_min": zero_set.sigma_min,
        "conjugate_left": zero_set.conjugate_left,
    }
    if zero_set.cardinality != spec.d * spec.d:
        failures.append({
            "invariant": "zero_set_cardinality",
            "detail": f"{zero_set.cardinality} vectors, expected {spec.d**2}"})
    if zero_set.max_abs_expectation > 1e-10:
        failures.append({
            "invariant": "zero_expectations",
            "detail": f"largest |expectation| {zero_set.max_abs_expectation!r} "
                      "exceeds 1e-10"})
    if zero_set.sigma_min <= 1e-8:
        failures.append({
            "invariant": "zero_set_rank",
            "detail": f"smallest singular value {zero_set.sigma_min!r} "
                      "not above 1e-8"})
    return result, failures


def _cmd_optimality(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    w = build(spec).choi(cfg.tol)
    result, failures = _optimality_sections(spec, w, cfg)
    result = {"map_spec": serialize.map_spec_to_json(spec), **result}
    return result, failures


def _nd_sections(spec: MapSpec, w, cfg: RunConfig):
    failures: list[dict] = []
    try:
        report = nd_optimality_check(spec, w, cfg.tol)
    except NecessityViolation as exc:
        failures.append({"invariant": "phase_modulus", "detail": str(exc)})
        return {"necessity_failed": True}, failures
    result = {
        "covariance_residual": report.covariance_residual,
        "gamma_zero_set_ok": report.gamma_zero_set_ok,
        "gamma_spanning_ok": report.gamma_spanning_ok,
        "max_gamma_expectation": report.max_gamma_expectation,
        "gamma_sigma_min": report.gamma_sigma_min,
        "conjugate_left": report.conjugate_left,
    }
    if report.covariance_residual > 1e-12:
        failures.append({
            "invariant": "covariance_residual",
            "detail": f"residual {report.covariance_residual!r} exceeds 1e-12"})
    if not report.gamma_zero_set_ok:
        failures.append({
            "invariant": "gamma_zero_expectations",
            "detail": f"largest |expectation| on the transposed witness "
                      f"{report.max_gamma_expectation!r} exceeds 1e-10"})
    if not report.gamma_spanning_ok:
        failures.append({
            "invariant": "gamma_zero_set_rank",
            "detail": f"smallest singular value {report.gamma_sigma_min!r} "
                      "not above 1e-8"})
    return result, failures


def _cmd_nd_optimality(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    w = build(spec).choi(cfg.tol)
    result, failures = _nd_sections(spec, w, cfg)
    result = {"map_spec": serialize.map_spec_to_json(spec), **result}
    return result, failures


def _cmd_full_report(cfg: RunConfig):
    spec = cfg.map_spec
    _guard_dimension(spec.d, cfg)
    linear_map = build(spec)
    w = linear_map.choi(cfg.tol)
    failures: list[dict] = []

    scan = positivity_scan(linear_map, trials=cfg.trials, seed=cfg.seed)
    if scan.min_value < -cfg.tol.psd_slack:
        failures.append({
            "invariant": "positivity_scan",
            "detail": f"see-saw min value {scan.min_value!r}"})
    choi_min = w.min_eigenvalue(cfg.tol)

    detect_result, detect_failures = _detect_sections(spec, cfg)
    failures.extend(detect_failures)
    optimality_result, optimality_failures = _optimality_sections(spec, w, cfg)
    failures.extend(optimality_failures)
    nd_result, nd_failures = _nd_sections(spec, w, cfg)
    failures.extend(nd_failures)

    result = {
        "map_spec": serialize.map_spec_to_json(spec),
        "d": spec.d,
        "positivity_scan": {
            "min_value": scan.min_value,
            "trials": scan.trials,
            "trial_index": scan.trial_index,
        },
        "choi": {
            "min_eigenvalue": choi_min,
            "hermiticity_defect": hermiticity_defect(w.matrix),
            "is_entanglement_witness": choi_min < -1e-3,
        },
        **detect_result,
        "optimality": optimality_result,
        "nd_optimality": nd_result,
    }
    return result, failures


_COMMANDS = {
    "build": _cmd_build,
    "certify-block": _cmd_certify_block,
    "check-positive": _cmd_check_positive,
    "witness": _cmd_witness,
    "detect": _cmd_detect,
    "optimality": _cmd_optimality,
    "nd-optimality": _cmd_nd_optimality,
    "full-report": _cmd_full_report,
}


def _json_safe(x):
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report dict)."""
    result, failures = _COMMANDS[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "tool": {
            "name": "posmap",
            "version": __version__,
            "eigensolver_backend": BACKEND,
        },
        "seed": cfg.seed,
        "trials": cfg.trials,
        "tolerances": {
            "psd_slack": cfg.tol.psd_slack,
            "eq_atol": cfg.tol.eq_atol,
        },
        "conventions": {
            "indexing": "1-based",
            "choi_normalization": "1/d included in witness blocks",
            "partial_transpose_factor": "first",
            "detector_normalization": "measured trace, cross-checked "
                                      "against 2K+1",
        },
        "result": result,
        "failures": failures,
        "status": "pass" if not failures else "fail",
    }
    if not cfg.no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    return (0 if not failures else 1), _json_safe(report)


def _flatten_scalars(obj, prefix: str = "") -> list[tuple[str, object]]:
    # lists (matrices, vectors, step tables) stay JSON-only
    out: list[tuple[str, object]] = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            out.extend(_flatten_scalars(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (str, int, float, bool)) or obj is None:
        out.append((prefix[:-1], obj))
    return out


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return serialize.dumps_canonical(report)
    rows = _flatten_scalars(report)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in rows:
            writer.writerow([key, repr(value) if isinstance(value, float)
                             else value])
        return buffer.getvalue()
    lines = [f"posmap {report['command']}: {report['status'].upper()}"]
    for failure in report.get("failures", []):
        lines.append(f"  FAILED {failure.get('invariant')}: "
                     f"{failure.get('detail')}")
    for key, value in rows:
        lines.append(f"{key} = {value!r}" if isinstance(value, float)
                     else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            with open(output, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {output!r}: {exc}") from exc
    else:
        sys.stdout.write(text)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posmap",
        description="Positive maps on matrix algebras: block-matrix "
                    "certificates, witnesses, PPT detectors, optimality.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default 42; env POSMAP_SEED)")
        p.add_argument("--trials", type=int, default=None,
                       help="see-saw trials (default 500)")
        p.add_argument("--psd-slack", type=float, default=None, dest="psd_slack")
        p.add_argument("--eq-atol", type=float, default=None, dest="eq_atol")
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file (strict keys)")
        p.add_argument("--output", type=str, default=None,
                       help="write the report here instead of stdout")
        p.add_argument("--format", type=str, default=None,
                       choices=["json", "csv", "text"])
        p.add_argument("--no-timestamp", action="store_true",
                       dest="no_timestamp",
                       help="omit the timestamp for reproducible bytes")
        p.add_argument("--allow-large", action="store_true",
                       dest="allow_large",
                       help="lift the d^2 <= 4096 guard")

    def map_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--family", type=str, default=None,
                       help=f"one of {sorted(FAMILY_ALIASES)}")
        p.add_argument("--N", type=int, default=None, dest="n",
                       help="number of blocks / matrix size")
        p.add_argument("--K", type=int, default=None, dest="k",
                       help="half block side")
        p.add_argument("--z", type=str, default=None,
                       help="uniform phase as a complex literal")
        p.add_argument("--z-file", type=str, default=None, dest="z_file",
                       help="JSON list of {i, j, re, im} phase entries")
        p.add_argument("--u-file", type=str, default=None, dest="u_file",
                       help="JSON matrix for the antisymmetric twist")
        p.add_argument("--spec", type=str, default=None,
                       help="full map spec as a JSON file")

    p = sub.add_parser("build", help="materialize and emit a spec")
    common(p)
    map_flags(p)
    p.add_argument("--kind", type=str, default=None,
                   choices=["map", "block"])
    p.add_argument("--recipe", type=str, default=None,
                   choices=["scalar", "antisymmetric"])
    p.add_argument("--side", type=int, default=None,
                   help="block side for the antisymmetric recipe")
    p.add_argument("--z-modulus", type=str, default=None, dest="z_modulus",
                   choices=["one", "unit", "disk"])

    p = sub.add_parser("certify-block",
                       help="check conditions and replay the induction")
    common(p)
    p.add_argument("--spec", type=str, default=None,
                   help="block spec as a JSON file")

    for name, help_text in (
            ("check-positive", "see-saw falsifier for map positivity"),
            ("witness", "Choi matrix summary"),
            ("detect", "PPT detector state and pairing value"),
            ("optimality", "zero-product spanning set"),
            ("nd-optimality", "partial-transpose covariance checks"),
            ("full-report", "all certifications for one spec")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        map_flags(p)
        if name == "witness":
            p.add_argument("--include-matrix", action="store_true",
                           dest="include_matrix")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        code, report = run(cfg)
        _emit(_render(report, cfg.format), cfg.output)
        return code
    except UsageError as exc:
        print(f"posmap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
