"""JSON round-tripping for operators, ensembles and measurements.

Schemas (all matrices split into real/imaginary parts as nested lists):

* operator: ``{"dims": {"dA": int, "dB": int}, "re": [[...]], "im": [[...]]}``
* ensemble: ``{"dims": ..., "items": [{"eta": float, "rho": {"re", "im"}}]}``
* povm:     ``{"dims": ..., "elements": [{"re", "im"}]}``
"""

from __future__ import annotations

import json

import numpy as np

from .discrimination import Povm
from .ensembles import StateEnsemble
from .operators import BipartiteDims, HermitianOperator


def _dims_to_dict(dims: BipartiteDims) -> dict:
    return {"dA": dims.dA, "dB": dims.dB}


def _dims_from_dict(obj) -> BipartiteDims:
    return BipartiteDims(int(obj["dA"]), int(obj["dB"]))


def _matrix_to_dict(entries: np.ndarray) -> dict:
    arr = np.asarray(entries)
    return {
        "re": np.real(arr).tolist(),
        "im": np.imag(arr).tolist(),
    }


def _matrix_from_dict(obj) -> np.ndarray:
    re = np.array(obj["re"], dtype=float)
    im = np.array(obj["im"], dtype=float)
    if np.any(im):
        return re + 1j * im
    return re


def operator_to_dict(op: HermitianOperator) -> dict:
    return {"dims": _dims_to_dict(op.dims), **_matrix_to_dict(op.entries)}


def operator_from_dict(obj) -> HermitianOperator:
    return HermitianOperator(_dims_from_dict(obj["dims"]), _matrix_from_dict(obj))


def ensemble_to_dict(ensemble: StateEnsemble) -> dict:
    return {
        "dims": _dims_to_dict(ensemble.dims),
        "items": [
            {"eta": eta, "rho": _matrix_to_dict(rho.entries)} for eta, rho in ensemble.items
        ],
    }


def ensemble_from_dict(obj) -> StateEnsemble:
    dims = _dims_from_dict(obj["dims"])
    items = tuple(
        (float(item["eta"]), HermitianOperator(dims, _matrix_from_dict(item["rho"])))
        for item in obj["items"]
    )
    return StateEnsemble(dims, items)


def povm_to_dict(povm: Povm) -> dict:
    return {
        "dims": _dims_to_dict(povm.dims),
        "elements": [_matrix_to_dict(m.entries) for m in povm.elements],
    }


def povm_from_dict(obj) -> Povm:
    dims = _dims_from_dict(obj["dims"])
    elements = tuple(HermitianOperator(dims, _matrix_from_dict(el)) for el in obj["elements"])
    return Povm(dims, elements)


def load_ensemble(path) -> StateEnsemble:
    with open(path) as fh:
        return ensemble_from_dict(json.load(fh))


def load_povm(path) -> Povm:
    with open(path) as fh:
        return povm_from_dict(json.load(fh))


def load_operator(path) -> HermitianOperator:
    with open(path) as fh:
        return operator_from_dict(json.load(fh))
