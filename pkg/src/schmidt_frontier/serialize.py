"""JSON exchange formats for matrices, vectors and product decompositions.

Matrices: {"m": int, "n": int, "entries": [[re, im], ...]} in row-major order.
Vectors: [[re, im], ...].
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .decompositions import ProductDecomposition
from .oracles import vector_from_json, vector_to_json
from .tensor import BipartiteOperator, Dims


def operator_to_json(X: BipartiteOperator) -> dict:
    return {"m": X.dims.m, "n": X.dims.n, "entries": vector_to_json(X.entries)}


def operator_from_json(data: dict) -> BipartiteOperator:
    dims = Dims(int(data["m"]), int(data["n"]))
    flat = vector_from_json(data["entries"])
    if flat.size != dims.total**2:
        raise ValueError(f"expected {dims.total ** 2} entries, got {flat.size}")
    return BipartiteOperator(dims, flat.reshape(dims.total, dims.total))


def decomposition_to_json(d: ProductDecomposition) -> dict:
    return {
        "target": operator_to_json(d.target),
        "terms": [{"weight": float(w), "vector": vector_to_json(v)} for w, v in zip(d.weights, d.vectors)],
        "remainder": [float(x) for x in d.remainder],
    }


def decomposition_from_json(data: dict) -> ProductDecomposition:
    target = operator_from_json(data["target"])
    terms = data["terms"]
    vectors = np.array([vector_from_json(t["vector"]) for t in terms], dtype=complex).reshape(len(terms), target.dims.total)
    weights = np.array([t["weight"] for t in terms], dtype=float)
    return ProductDecomposition(target.dims, weights, vectors, np.array(data["remainder"], dtype=float), target)


def dump(obj: dict, path: str | Path | None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
