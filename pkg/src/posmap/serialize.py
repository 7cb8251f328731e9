"""JSON exchange formats.

Matrices travel as {"rows", "cols", "re", "im"} with row-major coefficient
lists; complex numbers are never encoded as strings.  Spec payloads use
1-based indices.  Parsing is strict: unknown keys are rejected so a typo in
a config cannot silently change a run.
"""

from __future__ import annotations

import json

import numpy as np

from .blockcert import BlockSpec
from .linalg import Array
from .maps import FAMILIES, MapSpec


def _require_keys(obj: dict, where: str, required: tuple[str, ...],
                  optional: tuple[str, ...] = ()) -> None:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object, got {type(obj).__name__}")
    keys = set(obj)
    missing = set(required) - keys
    unknown = keys - set(required) - set(optional)
    if missing:
        raise ValueError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise ValueError(f"{where}: unknown keys {sorted(unknown)}")


def matrix_to_json(m: Array) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("only 2-D arrays serialize as matrices")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(obj: dict, where: str = "matrix") -> Array:
    _require_keys(obj, where, ("rows", "cols", "re", "im"))
    rows, cols = int(obj["rows"]), int(obj["cols"])
    if rows < 1 or cols < 1:
        raise ValueError(f"{where}: dimensions must be positive")
    re, im = obj["re"], obj["im"]
    if len(re) != rows * cols or len(im) != rows * cols:
        raise ValueError(
            f"{where}: coefficient lists must have length {rows * cols}")
    data = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    return data.reshape(rows, cols)


def vector_to_json(v: Array) -> dict:
    return matrix_to_json(np.asarray(v).reshape(-1, 1))


def vector_from_json(obj: dict, where: str = "vector") -> Array:
    m = matrix_from_json(obj, where)
    if m.shape[1] != 1:
        raise ValueError(f"{where}: expected a single column")
    return m.ravel()


def phase_entries_to_json(z: Array, n: int) -> list[dict]:
    return [
        {"i": i + 1, "j": j + 1,
         "re": float(z[i, j].real), "im": float(z[i, j].imag)}
        for i in range(n) for j in range(i + 1, n)
    ]


def phase_entries_from_json(entries, n: int, where: str) -> Array:
    z = np.ones((n, n), dtype=np.complex128)
    if not isinstance(entries, list):
        raise ValueError(f"{where}: phase entries must form a list")
    for entry in entries:
        _require_keys(entry, f"{where} entry", ("i", "j", "re", "im"))
        i, j = int(entry["i"]), int(entry["j"])
        if not (1 <= i < j <= n):
            raise ValueError(
                f"{where}: phase index ({i}, {j}) outside the strict upper "
                f"triangle of size {n}")
        z[i - 1, j - 1] = float(entry["re"]) + 1j * float(entry["im"])
    return z


def map_spec_to_json(spec: MapSpec) -> dict:
    return {
        "family": spec.family,
        "n": spec.n,
        "k": spec.k,
        "z": None if spec.z is None else phase_entries_to_json(spec.z, spec.n),
        "u": None if spec.u is None else matrix_to_json(spec.u),
    }


def map_spec_from_json(obj: dict) -> MapSpec:
    _require_keys(obj, "map spec", ("family", "n"), ("k", "z", "u"))
    family = obj["family"]
    if family not in FAMILIES:
        raise ValueError(f"map spec: unknown family {family!r}")
    n = int(obj["n"])
    k = int(obj.get("k") or 0)
    z = obj.get("z")
    if z is not None:
        z = phase_entries_from_json(z, n, "map spec")
    u = obj.get("u")
    if u is not None:
        u = matrix_from_json(u, "map spec twist")
    return MapSpec(family, n, k, z=z, u=u)


def block_spec_to_json(spec: BlockSpec) -> dict:
    n = spec.N
    return {
        "alphas": [float(a) for a in spec.alphas],
        "z": phase_entries_to_json(spec.z, n),
        "blocks": [
            {"i": i + 1, "j": j + 1, "matrix": matrix_to_json(spec.blocks[(i, j)])}
            for i in range(n) for j in range(i + 1, n)
        ],
        "diag_blocks": [matrix_to_json(m) for m in spec.diag_blocks],
    }


def block_spec_from_json(obj: dict) -> BlockSpec:
    _require_keys(obj, "block spec", ("alphas", "z", "blocks", "diag_blocks"))
    alphas = np.array([float(a) for a in obj["alphas"]], dtype=float)
    n = len(alphas)
    z = phase_entries_from_json(obj["z"], n, "block spec")
    blocks: dict[tuple[int, int], Array] = {}
    for entry in obj["blocks"]:
        _require_keys(entry, "block entry", ("i", "j", "matrix"))
        i, j = int(entry["i"]), int(entry["j"])
        if not (1 <= i < j <= n):
            raise ValueError(f"block entry ({i}, {j}) outside the upper triangle")
        blocks[(i - 1, j - 1)] = matrix_from_json(entry["matrix"], "block")
    diag = [matrix_from_json(m, "diagonal block") for m in obj["diag_blocks"]]
    return BlockSpec(alphas, z, blocks, diag)


def dumps_canonical(payload) -> str:
    """Deterministic serialization: sorted keys, fixed separators, trailing
    newline.  Used for byte-identical report comparisons."""
    return json.dumps(payload, sort_keys=True, indent=2,
                      allow_nan=False) + "\n"
