"""Parsing of state and observable specifications.

A specification is one of

* a preset name (see :data:`STATE_PRESETS` and :data:`OBSERVABLE_PRESETS`),
* an inline JSON matrix, or
* a path to a file holding a JSON matrix (optionally prefixed with ``@``).

A JSON matrix is a list of rows; each entry is ``[re, im]`` or a plain
real number. Matrices may also be wrapped as ``{"matrix": [...]}``.
"""

import json
import math
import os

import numpy as np

from .algebra import IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z
from .exceptions import ParseError
from .states import QuantumState

__all__ = ["OBSERVABLE_PRESETS", "STATE_PRESETS", "parse_matrix", "parse_observable", "parse_state"]

_SQ2 = 1 / math.sqrt(2)

STATE_PRESETS = {
    "singlet": lambda: QuantumState.from_vector([0, _SQ2, -_SQ2, 0]),
    "mixed_qubit": lambda: QuantumState.maximally_mixed(2),
    "up_z": lambda: QuantumState.from_vector([1, 0]),
    "down_z": lambda: QuantumState.from_vector([0, 1]),
    "plus_x": lambda: QuantumState.from_vector([_SQ2, _SQ2]),
}

_SINGLE = {"pauli_x": PAULI_X, "pauli_y": PAULI_Y, "pauli_z": PAULI_Z, "identity_2": IDENTITY_2}

OBSERVABLE_PRESETS = dict(_SINGLE)
for _name, _m in list(_SINGLE.items()):
    if _name.startswith("pauli"):
        OBSERVABLE_PRESETS[f"{_name}_A"] = np.kron(_m, IDENTITY_2)
        OBSERVABLE_PRESETS[f"{_name}_B"] = np.kron(IDENTITY_2, _m)
OBSERVABLE_PRESETS["pauli_zz"] = np.kron(PAULI_Z, PAULI_Z)


def _load_text(spec):
    text = spec.strip()
    if text.startswith("[") or text.startswith("{"):
        return text
    path = text[1:] if text.startswith("@") else text
    if not os.path.exists(path):
        raise ParseError(f"{spec!r} is neither a preset, inline JSON, nor an existing file")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _entry(value, where):
    if isinstance(value, bool):
        raise ParseError(f"entry {where} must be a number or [re, im]")
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ParseError(f"entry {where} must be a number or [re, im], got {value!r}")


def parse_matrix(text):
    """Parse a JSON matrix document into a square complex array."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise ParseError('JSON object must have a "matrix" key')
        doc = doc["matrix"]
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise ParseError("matrix must be a non-empty list of rows")
    n = len(doc)
    rows = []
    for i, row in enumerate(doc):
        if len(row) != n:
            raise ParseError(f"row {i} has {len(row)} entries, expected {n} (matrix must be square)")
        rows.append([_entry(v, f"[{i}][{j}]") for j, v in enumerate(row)])
    M = np.array(rows, dtype=np.complex128)
    if not np.all(np.isfinite(M)):
        raise ParseError("matrix has non-finite entries")
    return M


def parse_state(spec):
    if spec in STATE_PRESETS:
        return STATE_PRESETS[spec]()
    return QuantumState(parse_matrix(_load_text(spec)))


def parse_observable(spec):
    if spec in OBSERVABLE_PRESETS:
        return np.array(OBSERVABLE_PRESETS[spec])
    return parse_matrix(_load_text(spec))
