"""Plain-text readers and writers for fiducials, SICs, states, probabilities and POVMs.

Complex entries are written one per line as ``"re im"`` using Python's
shortest round-trip float repr, so write -> read is bit exact.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .sic_core import Fiducial, SicSystem

__all__ = [
    "FormatError",
    "write_fiducial",
    "read_fiducial",
    "write_sic",
    "read_sic",
    "write_state",
    "read_state",
    "write_probs",
    "read_probs",
    "write_povm",
    "read_povm",
]


class FormatError(ValueError):
    """Malformed input file."""


def _fmt(z) -> str:
    z = complex(z)
    return f"{float(z.real)!r} {float(z.imag)!r}"


def _parse_complex(line, where):
    parts = line.split()
    if len(parts) != 2:
        raise FormatError(f"{where}: expected 're im', got {line!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _lines(path):
    text = Path(path).read_text()
    return [ln for ln in text.splitlines() if ln.strip()]


def _parse_header_int(line, path):
    try:
        return int(line.strip())
    except ValueError:
        raise FormatError(f"{path}: header must be an integer, got {line!r}") from None


def _read_complex_block(lines, start, count, path):
    if len(lines) < start + count:
        raise FormatError(f"{path}: expected {count} entries after line {start}, file too short")
    return np.array([_parse_complex(lines[start + i], f"{path}:{start + i + 1}") for i in range(count)])


def write_fiducial(path, fiducial: Fiducial):
    amps = fiducial.amplitudes
    out = [str(amps.size)] + [_fmt(z) for z in amps]
    Path(path).write_text("\n".join(out) + "\n")


def read_fiducial(path) -> Fiducial:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty file")
    d = _parse_header_int(lines[0], path)
    amps = _read_complex_block(lines, 1, d, path)
    if len(lines) != d + 1:
        raise FormatError(f"{path}: expected {d + 1} lines, got {len(lines)}")
    return Fiducial(amps)


def write_sic(path, sic: SicSystem):
    out = [str(sic.d)]
    for proj in sic.projectors:
        out.extend(_fmt(z) for z in proj.ravel())
    Path(path).write_text("\n".join(out) + "\n")


def read_sic(path) -> SicSystem:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty file")
    d = _parse_header_int(lines[0], path)
    n = d * d
    if len(lines) != 1 + n * n:
        raise FormatError(f"{path}: expected {1 + n * n} lines for d={d}, got {len(lines)}")
    flat = _read_complex_block(lines, 1, n * n, path)
    return SicSystem(flat.reshape(n, d, d))


def write_state(path, rho):
    rho = np.asarray(rho)
    out = [str(rho.shape[0])] + [_fmt(z) for z in rho.ravel()]
    Path(path).write_text("\n".join(out) + "\n")


def read_state(path) -> np.ndarray:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty file")
    d = _parse_header_int(lines[0], path)
    if len(lines) != 1 + d * d:
        raise FormatError(f"{path}: expected {1 + d * d} lines for d={d}, got {len(lines)}")
    return _read_complex_block(lines, 1, d * d, path).reshape(d, d)


def write_probs(path, p):
    Path(path).write_text("\n".join(repr(float(x)) for x in p) + "\n")


def read_probs(path) -> np.ndarray:
    lines = _lines(path)
    try:
        p = np.array([float(ln) for ln in lines])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    d = math.isqrt(p.size)
    if d < 2 or d * d != p.size:
        raise FormatError(f"{path}: number of entries {p.size} is not a square d*d with d >= 2")
    return p


def write_povm(path, elements):
    elements = np.asarray(elements)
    n, d, _ = elements.shape
    out = [f"{d} {n}"]
    for F in elements:
        out.extend(_fmt(z) for z in F.ravel())
    Path(path).write_text("\n".join(out) + "\n")


def read_povm(path) -> np.ndarray:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty file")
    try:
        d, n = (int(x) for x in lines[0].split())
    except ValueError:
        raise FormatError(f"{path}: header must be 'd n', got {lines[0]!r}") from None
    if len(lines) != 1 + n * d * d:
        raise FormatError(f"{path}: expected {1 + n * d * d} lines, got {len(lines)}")
    return _read_complex_block(lines, 1, n * d * d, path).reshape(n, d, d)
