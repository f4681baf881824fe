"""JSON documents for operators, ensembles, key ensembles and distributions.

Operator::

    {"dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}

Each entry is a ``[re, im]`` pair, rows in order. An optional ``"dims": [dA, dB]``
marks a bipartite operator.

Ensemble::

    {"probs": [0.5, 0.5], "states": [<operator>, <operator>]}

A key ensemble is an ensemble that may carry ``"key_bits"``; its ``"probs"`` may
be the string ``"uniform"`` or be omitted.

Distribution: ``{"probs": [...]}``, joint distribution: ``{"joint": [[...], ...]}``.
NaN and Infinity are rejected everywhere.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import QInfoError
from .qkd import KeyEnsemble, build_key_ensemble
from .states import DensityOperator, Ensemble, JointDist, ProbDist, validate_density


class DocumentError(QInfoError):
    pass


def _reject_constant(name):
    raise DocumentError(f"non-finite number {name} not allowed")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed document: {exc}") from exc


def _finite(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(f"expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise DocumentError("non-finite number not allowed")
    return x


def operator_to_doc(m, dims=None) -> dict:
    a = np.asarray(getattr(m, "matrix", m), dtype=complex)
    doc = {"dim": int(a.shape[0]),
           "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in a]}
    if dims is not None:
        doc["dims"] = [int(d) for d in dims]
    return doc


def doc_to_array(doc: dict) -> np.ndarray:
    if not isinstance(doc, dict) or "matrix" not in doc or "dim" not in doc:
        raise DocumentError("operator document needs 'dim' and 'matrix'")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError(f"'dim' must be a positive integer, got {dim!r}")
    rows = doc["matrix"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise DocumentError(f"'matrix' must have {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise DocumentError(f"row {i} must have {dim} entries")
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise DocumentError(f"entry ({i}, {j}) must be a [re, im] pair")
            out[i, j] = complex(_finite(entry[0]), _finite(entry[1]))
    return out


def doc_to_density(doc: dict) -> DensityOperator:
    return validate_density(doc_to_array(doc))


def _probs(values) -> np.ndarray:
    if not isinstance(values, list):
        raise DocumentError("'probs' must be an array of numbers")
    return np.array([_finite(v) for v in values])


def ensemble_to_doc(e: Ensemble) -> dict:
    return {"probs": [float(x) for x in e.p], "states": [operator_to_doc(s) for s in e.states]}


def doc_to_ensemble(doc: dict) -> Ensemble:
    if "states" not in doc:
        raise DocumentError("ensemble document needs 'states'")
    states = [doc_to_density(s) for s in doc["states"]]
    probs = doc.get("probs", "uniform")
    if probs == "uniform":
        return Ensemble.uniform(states)
    return Ensemble(ProbDist(_probs(probs)), tuple(states))


def key_ensemble_to_doc(k: KeyEnsemble) -> dict:
    doc = ensemble_to_doc(k.ensemble)
    if k.key_bits is not None:
        doc["key_bits"] = k.key_bits
    return doc


def doc_to_key_ensemble(doc: dict) -> KeyEnsemble:
    if "states" not in doc:
        raise DocumentError("key ensemble document needs 'states'")
    states = [doc_to_density(s) for s in doc["states"]]
    probs = doc.get("probs", "uniform")
    priors = "uniform" if probs == "uniform" else _probs(probs)
    bits = doc.get("key_bits")
    if bits is not None and (not isinstance(bits, int) or isinstance(bits, bool) or bits < 0):
        raise DocumentError(f"'key_bits' must be a non-negative integer, got {bits!r}")
    return build_key_ensemble(states, priors, bits)


def dist_to_doc(p) -> dict:
    a = np.asarray(getattr(p, "probs", p), dtype=float)
    if a.ndim == 2:
        return {"joint": a.tolist()}
    return {"probs": a.tolist()}


@dataclass(frozen=True)
class Loaded:
    """A parsed document; ``kind`` is one of operator, ensemble, probs, joint."""

    kind: str
    value: Any
    raw: dict
    dims: tuple[int, int] | None = None


def parse_document(doc: dict) -> Loaded:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if "matrix" in doc:
        dims = doc.get("dims")
        if dims is not None:
            if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) for d in dims)):
                raise DocumentError("'dims' must be a pair of integers")
            dims = (dims[0], dims[1])
        return Loaded("operator", doc_to_density(doc), doc, dims)
    if "states" in doc:
        return Loaded("ensemble", doc_to_ensemble(doc), doc)
    if "joint" in doc:
        rows = doc["joint"]
        if not isinstance(rows, list) or not rows:
            raise DocumentError("'joint' must be a non-empty matrix")
        table = np.array([_probs(r) for r in rows])
        return Loaded("joint", JointDist(table), doc)
    if "probs" in doc:
        return Loaded("probs", ProbDist(_probs(doc["probs"])), doc)
    raise DocumentError("unrecognized document: expected 'matrix', 'states', 'joint' or 'probs'")


def load(path) -> Loaded:
    text = Path(path).read_text()
    return parse_document(loads(text))


def dump(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
