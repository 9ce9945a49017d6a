"""JSON serialization of the exported objects (schema v1).

Complex numbers are [re, im] pairs; matrices are nested arrays with a shape
header; operator matrices additionally declare the block dimension d.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaViolation

SCHEMA = "v1"


def _cx(z) -> list:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SchemaViolation("/", "non-finite complex value")
    return [z.real, z.imag]


def _un_cx(v, pointer):
    if (not isinstance(v, (list, tuple))) or len(v) != 2:
        raise SchemaViolation(pointer, "expected [re, im] pair")
    z = complex(float(v[0]), float(v[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SchemaViolation(pointer, "non-finite complex value")
    return z


def matrix_to_json(m, d: int = 1) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        raise SchemaViolation("/entries", "empty matrix")
    if not np.all(np.isfinite(m.view(float))):
        raise SchemaViolation("/entries", "non-finite entry")
    return {"schema": SCHEMA, "shape": list(m.shape), "block": d,
            "entries": [[_cx(x) for x in row] for row in m]}


def matrix_from_json(obj) -> np.ndarray:
    for key in ("shape", "entries"):
        if key not in obj:
            raise SchemaViolation(f"/{key}", "missing field")
    shape = tuple(obj["shape"])
    if len(shape) != 2 or shape[0] < 1 or shape[1] < 1:
        raise SchemaViolation("/shape", "bad shape")
    rows = obj["entries"]
    if len(rows) != shape[0]:
        raise SchemaViolation("/entries", "row count mismatch")
    out = np.zeros(shape, dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise SchemaViolation(f"/entries/{i}", "column count mismatch")
        for j, v in enumerate(row):
            out[i, j] = _un_cx(v, f"/entries/{i}/{j}")
    return out


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"schema": SCHEMA, "length": int(v.size),
            "entries": [_cx(x) for x in v]}


def vector_from_json(obj) -> np.ndarray:
    ent = obj.get("entries")
    if ent is None:
        raise SchemaViolation("/entries", "missing field")
    return np.array([_un_cx(v, f"/entries/{i}") for i, v in enumerate(ent)])


def stokes_data_to_json(sd) -> dict:
    return {"schema": SCHEMA, "kind": "stokes_data",
            "Splus": matrix_to_json(sd.Splus),
            "Sminus": matrix_to_json(sd.Sminus),
            "C": matrix_to_json(sd.C),
            "deltaA": matrix_to_json(sd.deltaA),
            "residuals": {k: float(v) for k, v in sd.residuals.items()}}


def tower_to_json(tw) -> dict:
    return {"schema": SCHEMA, "kind": "spectral_tower",
            "n": tw.n,
            "lam": {str(k): vector_to_json(v) for k, v in tw.lam.items()},
            "a": {str(k): vector_to_json(v) for k, v in tw.a.items()},
            "b": {str(k): vector_to_json(v) for k, v in tw.b.items()},
            "lam_next": {str(k): _cx(v) for k, v in tw.lam_next.items()},
            "diagnostics": {k: float(v) for k, v in tw.diagnostics.items()}}


def caterpillar_to_json(cs) -> dict:
    return {"schema": SCHEMA, "kind": "caterpillar_stokes",
            "Splus": matrix_to_json(cs.Splus),
            "Sminus": matrix_to_json(cs.Sminus),
            "Ctilde": matrix_to_json(cs.CtildeProduct),
            "diagnostics": {k: float(v) for k, v in cs.diagnostics.items()}}


def rep_to_json(rep) -> dict:
    return {"schema": SCHEMA, "kind": "representation", "n": rep.n,
            "d": rep.d, "name": rep.name,
            "generators": {f"{i},{j}": matrix_to_json(rep.gen(i, j))
                           for i in range(rep.n) for j in range(rep.n)}}


def gz_to_json(sp) -> dict:
    return {"schema": SCHEMA, "kind": "gz_spectrum", "h": sp.h,
            "zeta": {str(k): matrix_to_json(v) for k, v in sp.zeta.items()},
            "zeta_next": {str(k): vector_to_json(v)
                          for k, v in sp.zeta_next.items()}}


def quantum_to_json(qs, d: int) -> dict:
    return {"schema": SCHEMA, "kind": "quantum_stokes", "h": qs.h,
            "Splus": matrix_to_json(qs.Splus, d),
            "Sminus": matrix_to_json(qs.Sminus, d),
            "diagnostics": {k: float(v) for k, v in qs.diagnostics.items()}}


def report_to_json(rows) -> dict:
    return {"schema": SCHEMA, "kind": "residual_report",
            "checks": [{"name": n, "residual": float(r), "tol": float(t),
                        "status": "PASS" if r < t else "FAIL"}
                       for (n, r, t) in rows]}


def report_to_markdown(rows, title="verification report") -> str:
    lines = [f"# {title}", "", "| check | residual | tol | status |",
             "|---|---|---|---|"]
    for (n, r, t) in rows:
        status = "PASS" if r < t else "FAIL"
        lines.append(f"| {n} | {r:.3e} | {t:.1e} | {status} |")
    return "\n".join(lines) + "\n"


def dump(obj, path):
    with open(path, "w") as f:
        json.dump(obj, f, indent=1, sort_keys=True)


def load(path):
    with open(path) as f:
        return json.load(f)
