"""JSON and CSV encodings for matrices, channels, block forms, certificates and reports.

Floats are written with 17 significant digits so values survive a round trip
bit for bit. Matrix entries are stored as flat row-major lists; nested lists
are accepted on input. Indices inside reports are 0-based.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .choi import BlockForm, ChoiMatrix, choi_from_kraus, from_block_form
from .classify import ClassificationReport
from .cpfact import CpCertificate, FactorOutcome
from .errors import ParseError
from .matcore import DEFAULT_TOL, SymMatrix, ToleranceConfig, sym_from_entries


def dumps(obj, indent: int | None = 2) -> str:
    """``json.dumps`` with floats printed as ``%.17g``."""
    return _encode(obj, indent, 0)


def _encode(obj, indent, level):
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot encode non-finite float {x!r}")
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        items = [(json.dumps(str(k)), v) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {_encode(v, None, 0)}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(f"{pad}{k}: {_encode(v, indent, level + 1)}" for k, v in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj)
        if indent is None or flat:
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(pad + _encode(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + " " * (indent * level) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _require(obj, *keys):
    if not isinstance(obj, dict):
        raise ParseError(f"expected a JSON object, got {type(obj).__name__}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ParseError(f"missing key(s) {', '.join(missing)}")


def _square(values, r, what="entries"):
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1 and arr.size == r * r:
        return arr.reshape(r, r)
    if arr.shape == (r, r):
        return arr
    raise ParseError(f"{what} has shape {arr.shape}, expected {r * r} values")


# -- matrices -----------------------------------------------------------------


def matrix_to_json(S) -> dict:
    a = S.entries if isinstance(S, SymMatrix) else np.asarray(S, dtype=float)
    return {"r": int(a.shape[0]), "entries": a.reshape(-1).tolist()}


def matrix_from_json(obj, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    _require(obj, "r", "entries")
    try:
        entries = _square(obj["entries"], int(obj["r"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad matrix object: {exc}") from exc
    return sym_from_entries(entries, tol)


def matrix_from_csv(text: str, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    rows = [row for row in csv.reader(io.StringIO(text)) if any(c.strip() for c in row)]
    try:
        values = [[float(c) for c in row] for row in rows]
    except ValueError as exc:
        raise ParseError(f"bad CSV entry: {exc}") from exc
    if not values or any(len(row) != len(values) for row in values):
        raise ParseError("CSV must contain r rows of r comma-separated reals")
    return sym_from_entries(values, tol)


def matrix_to_csv(S) -> str:
    a = S.entries if isinstance(S, SymMatrix) else np.asarray(S)
    return "".join(",".join(format(float(x), ".17g") for x in row) + "\n" for row in a)


# -- channels and block forms -----------------------------------------------------


def blockform_to_json(bf: BlockForm) -> dict:
    return {"n": bf.n, "d0": bf.d0.tolist(), "d1": bf.d1.tolist(), "b": bf.b.reshape(-1).tolist()}


def blockform_from_json(obj) -> BlockForm:
    _require(obj, "n", "d0", "d1", "b")
    n = int(obj["n"])
    return BlockForm(obj["d0"], _square(obj["b"], n, "b"), obj["d1"])


def _complex_array(values):
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def kraus_to_json(n: int, m: int, kraus) -> dict:
    ops = []
    for K in kraus:
        K = np.asarray(K, dtype=complex)
        ops.append([[[float(z.real), float(z.imag)] for z in row] for row in K])
    return {"n": n, "m": m, "kraus": ops}


def channel_to_json(J: ChoiMatrix) -> dict:
    return {"n": J.n, "m": J.m, "choi": matrix_to_json(J.S)}


def channel_from_json(obj, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    """Accepts ``{"n", "m", "choi"}``, ``{"n", "m", "kraus"}`` or a block form object."""
    if isinstance(obj, dict) and "d0" in obj:
        return from_block_form(blockform_from_json(obj), tol)
    _require(obj, "n", "m")
    n, m = int(obj["n"]), int(obj["m"])
    if "choi" in obj:
        return ChoiMatrix(n, m, matrix_from_json(obj["choi"], tol))
    if "kraus" in obj:
        try:
            kraus = [_complex_array(K) for K in obj["kraus"]]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad Kraus operator: {exc}") from exc
        return choi_from_kraus(n, m, kraus, tol)
    raise ParseError("channel object needs a 'choi' or 'kraus' entry")


# -- certificates and reports -----------------------------------------------------


def certificate_to_json(C: CpCertificate) -> dict:
    return {
        "r": C.r,
        "vectors": C.vectors.tolist(),
        "residual": C.residual,
        "strategy": C.strategy,
    }


def certificate_from_json(obj) -> CpCertificate:
    _require(obj, "r", "vectors")
    r = int(obj["r"])
    vectors = np.asarray(obj["vectors"], dtype=float)
    if vectors.size and (vectors.ndim != 2 or vectors.shape[1] != r):
        raise ParseError(f"certificate vectors have shape {vectors.shape}, expected (s, {r})")
    return CpCertificate(r, vectors.reshape(-1, r), obj.get("residual"), obj.get("strategy", ""))


def outcome_to_json(out: FactorOutcome) -> dict:
    return {
        "status": out.status.value,
        "strategy": out.strategy,
        "certificate": certificate_to_json(out.certificate) if out.certificate else None,
        "iterations": out.iterations,
        "infeasibility": None if math.isnan(out.infeasibility) else out.infeasibility,
        "reason": out.reason,
        "attempts": [
            {"strategy": s, "infeasibility": None if math.isnan(x) else x}
            for s, x in out.attempts
        ],
    }


def report_to_json(rep: ClassificationReport, timings: bool = True) -> dict:
    refutation = None
    if rep.refutation is not None:
        if rep.refutation.reason == "NotPsd":
            witness = {"vector": np.asarray(rep.refutation.witness).tolist()}
        else:
            (i, j), value = rep.refutation.witness
            witness = {"index": [i, j], "value": value}
        refutation = {"reason": rep.refutation.reason, "witness": witness}
    i, j, dev = rep.trace_worst
    out = {
        "n": rep.n,
        "m": rep.m,
        "is_trace_preserving": rep.is_trace_preserving,
        "trace_worst": {"i": i, "j": j, "deviation": dev},
        "is_dnn": rep.is_dnn,
        "min_eigenvalue": rep.min_eigenvalue,
        "near_boundary": rep.near_boundary,
        "cp_status": rep.cp_status.value,
        "strategy": rep.strategy,
        "certificate": certificate_to_json(rep.certificate) if rep.certificate else None,
        "refutation": refutation,
    }
    if timings:
        out["timings"] = dict(rep.timings)
    return out
