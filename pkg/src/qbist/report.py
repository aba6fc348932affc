"""Deterministic text and JSON rendering of report trees."""

import json
from fractions import Fraction

import numpy as np


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def fmt_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, list):
        return "[" + ", ".join(fmt_scalar(v) for v in value) + "]"
    if value is None:
        return "none"
    return str(value)


def _flatten(tree, prefix=""):
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        else:
            yield name, value


def render(tree: dict, fmt: str = "text") -> str:
    """Render as ``key = value`` lines (nested keys dotted) or as JSON."""
    tree = _plain(tree)
    if fmt == "structured":
        return json.dumps(tree, indent=2) + "\n"
    return "".join(f"{k} = {fmt_scalar(v)}\n" for k, v in _flatten(tree))
