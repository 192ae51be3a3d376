"""Deterministic JSON emission and the on-disk file formats.

Floats are serialized with 17 significant digits so every double round-trips
exactly; keys keep insertion order and the pipeline is RNG-free, so identical
inputs yield byte-identical output.

Fractal file: ``{"name": str, "N": int, "k": int, "vertices": int,
"cells": [[int, ...], ...], "weights": [float, ...]?}`` with weights optional
(default all 1.0).  Form file: ``{"N": int, "coefficients": [[j1, j2, c], ...]}``
with ``j1 < j2`` and ``c >= 0``.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .forms import DirichletForm
from .fractal import FractalTriple, check_weights

__all__ = [
    "dumps",
    "form_to_dict",
    "load_form",
    "load_fractal",
    "parse_form",
    "parse_fractal",
    "triple_to_dict",
]


def _emit(value, parts, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON keys must be strings, got {key!r}")
            parts.append(f"{inner}{json.dumps(key)}: ")
            _emit(item, parts, indent, level + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            parts.append("[]")
            return
        flat = all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq)
        if flat:
            parts.append("[")
            for i, item in enumerate(seq):
                _emit(item, parts, indent, level + 1)
                if i < len(seq) - 1:
                    parts.append(", ")
            parts.append("]")
        else:
            parts.append("[\n")
            for i, item in enumerate(seq):
                parts.append(inner)
                _emit(item, parts, indent, level + 1)
                parts.append(",\n" if i < len(seq) - 1 else "\n")
            parts.append(pad + "]")
    elif isinstance(value, (bool, np.bool_)):
        parts.append("true" if value else "false")
    elif value is None:
        parts.append("null")
    elif isinstance(value, (int, np.integer)):
        parts.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x}")
        parts.append(format(x, ".17g"))
    elif isinstance(value, str):
        parts.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value, indent: int = 2) -> str:
    parts: list[str] = []
    _emit(value, parts, indent, 0)
    return "".join(parts)


def triple_to_dict(triple: FractalTriple, weights=None) -> dict:
    out = {
        "name": triple.name,
        "N": triple.N,
        "k": triple.k,
        "vertices": triple.num_vertices,
        "cells": [list(cell) for cell in triple.cells],
    }
    if weights is not None:
        out["weights"] = [float(w) for w in weights]
    return out


def parse_fractal(data: dict) -> tuple[FractalTriple, np.ndarray]:
    """Build a triple and its weight vector from a decoded fractal file."""
    if not isinstance(data, dict):
        raise ValueError("fractal file must contain a JSON object")
    for key in ("N", "k", "vertices", "cells"):
        if key not in data:
            raise ValueError(f"fractal file is missing required key {key!r}")
    try:
        triple = FractalTriple(
            name=str(data.get("name", "unnamed")),
            N=int(data["N"]),
            k=int(data["k"]),
            num_vertices=int(data["vertices"]),
            cells=tuple(tuple(int(x) for x in cell) for cell in data["cells"]),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed fractal file: {exc}") from exc
    raw = data.get("weights")
    weights = np.ones(triple.k) if raw is None else np.asarray(raw, dtype=float)
    return triple, check_weights(triple, weights)


def load_fractal(path) -> tuple[FractalTriple, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        return parse_fractal(json.load(fh))


def form_to_dict(form: DirichletForm) -> dict:
    return {
        "N": form.N,
        "coefficients": [[a, b, c] for a, b, c in form.coefficient_items()],
    }


def parse_form(data: dict) -> DirichletForm:
    if not isinstance(data, dict):
        raise ValueError("form file must contain a JSON object")
    for key in ("N", "coefficients"):
        if key not in data:
            raise ValueError(f"form file is missing required key {key!r}")
    entries = []
    for row in data["coefficients"]:
        if len(row) != 3:
            raise ValueError(f"coefficient rows must be [j1, j2, c], got {row}")
        a, b, c = int(row[0]), int(row[1]), float(row[2])
        if not a < b:
            raise ValueError(f"coefficient rows need j1 < j2, got {row}")
        entries.append((a, b, c))
    try:
        return DirichletForm(int(data["N"]), entries)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed form file: {exc}") from exc


def load_form(path) -> DirichletForm:
    with open(path, encoding="utf-8") as fh:
        return parse_form(json.load(fh))
