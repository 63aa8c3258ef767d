"""Chain documents: ``{"k": int, "kind": "transition" | "graph" | "theta", "data": [...]}``.

``data`` is row-major: k*k numbers for a transition or weight matrix, and
k(k-1)/2 numbers in (1,2), (1,3), ..., (k-1,k) order for theta.
"""
import json

import numpy as np

from .chains import ThetaVector, WeightedGraph, chain_from_graph, chain_from_theta, stationary
from .errors import ChainError

KINDS = ("transition", "graph", "theta")


def parse_chain(doc):
    """(K, pi) from a decoded chain document."""
    if not isinstance(doc, dict) or not {"k", "kind", "data"} <= doc.keys():
        raise ChainError('chain document needs "k", "kind" and "data"')
    k, kind = doc["k"], doc["kind"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ChainError(f"k must be a positive integer, got {k!r}")
    if kind not in KINDS:
        raise ChainError(f"kind must be one of {KINDS}, got {kind!r}")
    data = np.asarray(doc["data"], dtype=float).ravel()
    if kind == "theta":
        return chain_from_theta(ThetaVector(k, data))
    if data.size != k * k:
        raise ChainError(f"{kind} data for k={k} needs {k * k} entries, got {data.size}")
    mat = data.reshape(k, k)
    if kind == "graph":
        return chain_from_graph(WeightedGraph.from_weights(mat))
    return mat, stationary(mat)


def load_chain(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChainError(f"{path}: not valid JSON ({exc})") from None
    return parse_chain(doc)


def chain_document(kind, data):
    if kind not in KINDS:
        raise ChainError(f"kind must be one of {KINDS}, got {kind!r}")
    if kind == "theta":
        t = data if isinstance(data, ThetaVector) else None
        if t is None:
            raise ChainError("theta documents are built from a ThetaVector")
        return {"k": t.k, "kind": kind, "data": t.theta.tolist()}
    if isinstance(data, WeightedGraph):
        data = data.w
    mat = np.asarray(data, dtype=float)
    return {"k": int(mat.shape[0]), "kind": kind, "data": mat.ravel().tolist()}


def save_chain(path, kind, data):
    with open(path, "w") as fh:
        json.dump(chain_document(kind, data), fh)
        fh.write("\n")
