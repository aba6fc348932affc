"""Geometry of consistent sets in the probability simplex.

Scalar products ``p.q`` of consistent vectors lie in
``[1/(d(d+1)), 2/(d(d+1))]``. The centred form ``p' = p - c`` (``c`` the
uniform distribution) turns the upper bound into a sphere of squared
radius ``(d-1)/(d^2 (d+1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .representation import StateError, state_to_probs
from .sic_core import SicSystem

__all__ = [
    "GeometryError",
    "lower_bound",
    "upper_bound",
    "uniform",
    "center",
    "uncenter",
    "consistency_pair",
    "consistency_report",
    "ConsistencyReport",
    "basis_distributions",
    "circumscribed_radius2",
    "sphere_membership",
    "max_component_check",
    "opening_angle",
    "gram_vector_norm2",
    "gram_vector_formula",
    "verify_max_distant",
    "MaxDistantSet",
    "orthobasis_to_distant",
    "face_distance2",
    "zero_bound",
    "zero_count",
    "max_zero_vector",
    "max_zero_value",
    "overlap_stats",
    "sphere_sample",
    "sphere_exit_point",
]

GEOM_TOL = 1e-10
ZERO_TOL = 1e-10


class GeometryError(ValueError):
    pass


def _dim_of(p):
    n = np.asarray(p).shape[-1]
    d = math.isqrt(n)
    if d * d != n or d < 2:
        raise GeometryError(f"vector length {n} is not d*d with d >= 2")
    return d


def lower_bound(d):
    return 1.0 / (d * (d + 1))


def upper_bound(d):
    return 2.0 / (d * (d + 1))


def uniform(d):
    return np.full(d * d, 1.0 / (d * d))


def center(p):
    p = np.asarray(p, dtype=float)
    d = _dim_of(p)
    return p - 1.0 / (d * d)


def uncenter(p_centered):
    p_centered = np.asarray(p_centered, dtype=float)
    d = _dim_of(p_centered)
    return p_centered + 1.0 / (d * d)


class PairCheck(NamedTuple):
    product: float
    in_bounds: bool
    at_lower: bool
    at_upper: bool


def consistency_pair(d, p, q, tol=GEOM_TOL) -> PairCheck:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.size != d * d or q.size != d * d:
        raise GeometryError(f"dimension mismatch: expected {d * d} components")
    x = float(p @ q)
    lo, hi = lower_bound(d), upper_bound(d)
    return PairCheck(
        product=x,
        in_bounds=lo - tol <= x <= hi + tol,
        at_lower=abs(x - lo) <= tol,
        at_upper=abs(x - hi) <= tol,
    )


@dataclass
class ConsistencyReport:
    """Pairwise and per-vector evaluation of a finite candidate set."""

    d: int
    pair_products: np.ndarray
    lower_violations: list
    upper_violations: list
    at_lower: list
    at_upper: list
    on_sphere: list
    max_components: list
    zero_counts: list
    tol: float

    @property
    def consistent(self) -> bool:
        return not self.lower_violations and not self.upper_violations


def consistency_report(vectors, tol=GEOM_TOL) -> ConsistencyReport:
    """Check every pair (including each vector with itself) against the bounds.

    Pairs are reported as index tuples ``(k, l)`` with ``k <= l``. Whether the
    set is maximal is not decided; the report only lists which bound is
    active for which pair.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    d = _dim_of(V)
    G = V @ V.T
    lo, hi = lower_bound(d), upper_bound(d)
    iu = list(zip(*np.triu_indices(len(V))))
    r2 = circumscribed_radius2(d)
    norms = np.sum(center(V) ** 2, axis=1)
    return ConsistencyReport(
        d=d,
        pair_products=G,
        lower_violations=[(int(k), int(l)) for k, l in iu if G[k, l] < lo - tol],
        upper_violations=[(int(k), int(l)) for k, l in iu if G[k, l] > hi + tol],
        at_lower=[(int(k), int(l)) for k, l in iu if abs(G[k, l] - lo) <= tol],
        at_upper=[(int(k), int(l)) for k, l in iu if abs(G[k, l] - hi) <= tol],
        on_sphere=[bool(abs(x - r2) <= tol) for x in norms],
        max_components=[float(x) for x in V.max(axis=1)],
        zero_counts=[zero_count(v) for v in V],
        tol=tol,
    )


def basis_distributions(d) -> np.ndarray:
    """Rows ``e_k``: ``1/d`` at position ``k`` and ``1/(d(d+1))`` elsewhere."""
    n = d * d
    E = np.full((n, n), 1.0 / (d * (d + 1)))
    np.fill_diagonal(E, 1.0 / d)
    return E


def circumscribed_radius2(d) -> float:
    return (d - 1) / (d * d * (d + 1))


class SpherePosition(NamedTuple):
    norm2_centered: float
    on_sphere: bool
    inside: bool


def sphere_membership(p, tol=GEOM_TOL) -> SpherePosition:
    """Position of ``p`` relative to the circumscribed sphere.

    ``inside`` means strictly inside (beyond ``tol``).
    """
    p = np.asarray(p, dtype=float)
    d = _dim_of(p)
    x = float(np.sum(center(p) ** 2))
    r2 = circumscribed_radius2(d)
    return SpherePosition(x, abs(x - r2) <= tol, x < r2 - tol)


class MaxComponent(NamedTuple):
    max_value: float
    max_ok: bool
    forced_basis: int | None
    equals_basis: bool | None


def max_component_check(p, tol=GEOM_TOL) -> MaxComponent:
    """Largest component against the ``1/d`` ceiling.

    When some ``p_k`` reaches ``1/d`` the only point of the ball with that
    value is ``e_k``; ``equals_basis`` reports whether ``p`` matches it.
    """
    p = np.asarray(p, dtype=float)
    d = _dim_of(p)
    pos = sphere_membership(p, tol)
    if pos.norm2_centered > circumscribed_radius2(d) + tol:
        raise GeometryError("vector lies outside the circumscribed sphere")
    k = int(np.argmax(p))
    mx = float(p[k])
    forced, equal = None, None
    if abs(mx - 1.0 / d) <= tol:
        forced = k
        equal = bool(np.max(np.abs(p - basis_distributions(d)[k])) <= tol)
    return MaxComponent(mx, mx <= 1.0 / d + tol, forced, equal)


def opening_angle(m) -> float:
    """Cosine of the centre-to-vertex angle of a regular simplex with ``m`` vertices."""
    if m < 2:
        raise GeometryError("opening angle needs m >= 2")
    return -1.0 / (m - 1)


def gram_vector_formula(d, m) -> float:
    """``|sum_k p'_k|^2`` for ``m`` exactly maximally distant points: ``m(d-m)/(d^2(d+1))``."""
    return m * (d - m) / (d * d * (d + 1))


def _max_distant_violations(V, tol):
    d = _dim_of(V)
    G = V @ V.T
    target = (np.eye(len(V)) + 1.0) / (d * (d + 1))
    dev = np.abs(G - target)
    bad = [(int(k), int(l)) for k, l in zip(*np.triu_indices(len(V))) if dev[k, l] > tol]
    return bad, float(dev.max())


def gram_vector_norm2(vectors, tol=GEOM_TOL) -> float:
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    bad, _ = _max_distant_violations(V, tol)
    if bad:
        raise GeometryError(f"pair {bad[0]} is not maximally distant")
    g = center(V).sum(axis=0)
    return float(g @ g)


@dataclass(frozen=True)
class MaxDistantSet:
    d: int
    members: np.ndarray
    gram_residual: float
    violations: tuple
    tol: float

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def accepted(self) -> bool:
        return not self.violations and self.m <= self.d


def verify_max_distant(vectors, tol=GEOM_TOL) -> MaxDistantSet:
    """Check ``p_k.p_l = (delta_kl + 1)/(d(d+1))`` for all pairs and ``m <= d``."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.shape[0] == 0:
        raise GeometryError("empty set")
    d = _dim_of(V)
    bad, resid = _max_distant_violations(V, tol)
    return MaxDistantSet(d, V, resid, tuple(bad), tol)


def orthobasis_to_distant(sic: SicSystem, basis, tol=GEOM_TOL) -> MaxDistantSet:
    """Image of an orthonormal basis (rows of ``basis``) under the SIC map."""
    B = np.atleast_2d(np.asarray(basis, dtype=complex))
    if B.shape[1] != sic.d:
        raise StateError(f"dimension mismatch: basis vectors have length {B.shape[1]}, SIC has d={sic.d}")
    if np.max(np.abs(B.conj() @ B.T - np.eye(len(B)))) > 1e-10:
        raise GeometryError("basis vectors are not orthonormal")
    rhos = np.einsum("ni,nj->nij", B, B.conj())
    return verify_max_distant(state_to_probs(sic, rhos, validate=False), tol)


def face_distance2(d, n) -> float:
    """Squared distance from ``c`` to the nearest point of a face with ``n`` zeros."""
    if not 0 <= n < d * d:
        raise GeometryError(f"number of zeros must lie in [0, {d * d}), got {n}")
    return n / (d * d * (d * d - n))


def zero_bound(d) -> int:
    return d * (d - 1) // 2


def zero_count(p, threshold=ZERO_TOL) -> int:
    return int(np.sum(np.asarray(p) < threshold))


def max_zero_value(d) -> Fraction:
    return Fraction(2, d * (d + 1))


def max_zero_vector(d, zero_positions) -> np.ndarray:
    """Sphere point with ``d(d-1)/2`` zeros and ``2/(d(d+1))`` on the other positions."""
    zeros = sorted(set(int(i) for i in zero_positions))
    if len(zeros) != zero_bound(d):
        raise GeometryError(f"need exactly {zero_bound(d)} zero positions, got {len(zeros)}")
    if zeros and (zeros[0] < 0 or zeros[-1] >= d * d):
        raise GeometryError("zero position out of range")
    p = np.full(d * d, 2.0 / (d * (d + 1)))
    p[zeros] = 0.0
    return p


def _pattern_support(p, d):
    p = np.asarray(p, dtype=float)
    v = 2.0 / (d * (d + 1))
    zero = np.abs(p) <= ZERO_TOL
    nonzero = np.abs(p - v) <= ZERO_TOL
    if not np.all(zero | nonzero) or zero.sum() != zero_bound(d):
        raise GeometryError("vector is not a max-zero pattern")
    return frozenset(np.flatnonzero(nonzero).tolist())


class Overlap(NamedTuple):
    s0: int
    s1: int
    s: int
    product: Fraction
    consistent: bool
    at_lower: bool


def overlap_stats(p, q) -> Overlap:
    """Shared zero / nonzero positions of two max-zero patterns, with the exact product."""
    d = _dim_of(p)
    if _dim_of(q) != d:
        raise GeometryError("dimension mismatch")
    sp, sq = _pattern_support(p, d), _pattern_support(q, d)
    s1 = len(sp & sq)
    s0 = d * d - len(sp | sq)
    prod = s1 * max_zero_value(d) ** 2
    lo = Fraction(1, d * (d + 1))
    return Overlap(s0, s1, s0 + s1, prod, prod >= lo, prod == lo)


def sphere_sample(d, size, rng=None) -> np.ndarray:
    """Points uniformly distributed on the circumscribed sphere within the plane ``sum p = 1``."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    z = rng.normal(size=(size, d * d))
    z -= z.mean(axis=1, keepdims=True)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return 1.0 / (d * d) + math.sqrt(circumscribed_radius2(d)) * z


def sphere_exit_point(d, n=1) -> np.ndarray:
    """Sphere point in the direction of the midpoint of a face with ``n`` zeros.

    Its zero-face components equal ``(1 - r'/d_face)/d^2``, negative whenever
    the face is closer to ``c`` than the sphere radius, i.e. ``n < d(d-1)/2``.
    """
    m = np.zeros(d * d)
    m[: d * d - n] = 1.0 / (d * d - n)
    direction = center(m)
    direction /= np.linalg.norm(direction)
    return uniform(d) + math.sqrt(circumscribed_radius2(d)) * direction
