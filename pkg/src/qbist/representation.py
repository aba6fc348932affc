"""SIC probability representation of density matrices.

States are plain ``(d, d)`` complex arrays and probability vectors plain
length ``d*d`` float arrays. Most maps accept a leading batch axis.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .sic_core import SicSystem

__all__ = [
    "StateError",
    "check_density_matrix",
    "as_probability_vector",
    "check_povm",
    "state_to_probs",
    "probs_to_state",
    "positivity_check",
    "trace_inner_from_probs",
    "structure_constants",
    "purity_conditions",
    "quadratic_fixed_point",
    "conditional_matrix",
    "povm_from_conditional",
    "born_rule",
    "total_probability",
    "caratheodory_decompose",
    "Positivity",
    "Purity",
]

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
CLAMP_TOL = 1e-12


class StateError(ValueError):
    """Input is not a valid state, probability vector or measurement."""


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _check_sic_dim(sic, d):
    if sic.d != d:
        raise StateError(f"dimension mismatch: SIC has d={sic.d}, input has d={d}")


def check_density_matrix(rho, herm_tol=HERM_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Validate a state (or a batch of states); returns the array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise StateError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - _dagger(rho))) > herm_tol:
        raise StateError("density matrix is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0)) > trace_tol:
        raise StateError(f"density matrix trace deviates from 1 by more than {trace_tol}")
    if np.min(np.linalg.eigvalsh(rho)) < -psd_tol:
        raise StateError("density matrix has a negative eigenvalue")
    return rho


def as_probability_vector(p, d=None):
    """Validate and return ``p`` as a float array, clamping tiny negatives to 0."""
    p = np.array(p, dtype=float)
    if p.ndim != 1:
        raise StateError(f"probability vector must be one-dimensional, got shape {p.shape}")
    if d is not None and p.size != d * d:
        raise StateError(f"dimension mismatch: expected {d * d} components, got {p.size}")
    if np.min(p) < -CLAMP_TOL:
        raise StateError(f"negative probability {np.min(p)!r}")
    p[p < 0] = 0.0
    if abs(p.sum() - 1.0) > 1e-12:
        raise StateError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def check_povm(elements, tol=1e-10):
    F = np.asarray(elements, dtype=complex)
    if F.ndim != 3 or F.shape[1] != F.shape[2]:
        raise StateError(f"POVM must have shape (n, d, d), got {F.shape}")
    if np.max(np.abs(F - _dagger(F))) > tol:
        raise StateError("POVM element is not Hermitian")
    if np.min(np.linalg.eigvalsh(F)) < -tol:
        raise StateError("POVM element is not positive semidefinite")
    if np.max(np.abs(F.sum(axis=0) - np.eye(F.shape[1]))) > tol:
        raise StateError("POVM elements do not sum to the identity")
    return F


def state_to_probs(sic: SicSystem, rho, validate=True) -> np.ndarray:
    """``p_i = tr(rho Pi_i) / d``; accepts a single state or a batch."""
    rho = np.asarray(rho, dtype=complex)
    _check_sic_dim(sic, rho.shape[-1])
    if validate:
        check_density_matrix(rho)
    return np.einsum("kij,...ji->...k", sic.projectors, rho).real / sic.d


def probs_to_state(sic: SicSystem, p) -> np.ndarray:
    """``(d+1) sum_i p_i Pi_i - 1``; Hermitian and unit trace but not necessarily positive."""
    p = np.asarray(p, dtype=float)
    d = sic.d
    if p.shape[-1] != d * d:
        raise StateError(f"dimension mismatch: SIC has {d * d} outcomes, vector has {p.shape[-1]}")
    m = (d + 1) * np.einsum("...k,kij->...ij", p, sic.projectors) - np.eye(d)
    return 0.5 * (m + _dagger(m))


class Positivity(NamedTuple):
    is_state: bool
    min_eigenvalue: float


def positivity_check(m, tol: float = PSD_TOL) -> Positivity:
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - _dagger(m))) > 1e-10:
        raise StateError("positivity check requires a Hermitian matrix")
    lam = float(np.linalg.eigvalsh(m)[0])
    return Positivity(lam >= -tol, lam)


def trace_inner_from_probs(d: int, p, q):
    """``tr(rho sigma) = d(d+1) p.q - 1``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1] != d * d or q.shape[-1] != d * d:
        raise StateError(f"dimension mismatch: expected {d * d} components")
    return d * (d + 1) * np.sum(p * q, axis=-1) - 1.0


def structure_constants(sic: SicSystem, cond_max: float = 1e8) -> np.ndarray:
    """Tensor ``alpha[i, j, k]`` with ``Pi_i Pi_j = sum_k alpha[i, j, k] Pi_k``.

    Solves ``G x = b`` for every pair, ``G`` the Gram matrix of the
    projectors and ``b_m = tr(Pi_i Pi_j Pi_m)``.
    """
    P = sic.projectors
    n = sic.size
    G = sic.gram()
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > cond_max:
        raise StateError(f"projector Gram matrix is ill-conditioned (cond={cond:.3e})")
    PP = np.einsum("iab,jbc->ijac", P, P)
    b = np.einsum("ijac,mca->ijm", PP, P).reshape(n * n, n)
    # G is real symmetric, so x = G^{-1} b row-wise
    alpha = np.linalg.solve(G, b.T).T
    return alpha.reshape(n, n, n)


class Purity(NamedTuple):
    quadratic_lhs: float
    cubic_lhs: float
    cubic_imag: float
    is_pure: bool


def purity_conditions(sic: SicSystem, p, alpha, tol: float = 1e-9) -> Purity:
    """Sphere condition ``sum p_i^2`` and cubic condition ``Re sum alpha_ijk p_i p_j p_k``."""
    d = sic.d
    p = np.asarray(p, dtype=float)
    if p.size != d * d:
        raise StateError(f"dimension mismatch: expected {d * d} components, got {p.size}")
    quad = float(p @ p)
    cubic = complex(np.einsum("ijk,i,j,k->", alpha, p, p, p))
    pure = (abs(quad - 2.0 / (d * (d + 1))) <= tol
            and abs(cubic.real - 4.0 / (d * (d + 1) ** 2)) <= tol)
    return Purity(quad, cubic.real, abs(cubic.imag), pure)


def quadratic_fixed_point(sic: SicSystem, p, alpha) -> np.ndarray:
    """Residual of the coupled quadratic pure-state equations, one entry per outcome."""
    d = sic.d
    p = np.asarray(p, dtype=float)
    if p.size != d * d:
        raise StateError(f"dimension mismatch: expected {d * d} components, got {p.size}")
    quad = np.einsum("ijk,i,j->k", alpha, p, p).real
    return p - (d + 1) * quad / 3.0 - 2.0 / (3.0 * d * (d + 1))


def conditional_matrix(sic: SicSystem, povm) -> np.ndarray:
    """``r[j, i] = tr(Pi_i F_j)``; columns (fixed ``i``) sum to one."""
    F = check_povm(povm)
    _check_sic_dim(sic, F.shape[1])
    return np.einsum("iab,jba->ji", sic.projectors, F).real


def povm_from_conditional(sic: SicSystem, r) -> np.ndarray:
    """Invert :func:`conditional_matrix`.

    Any Hermitian ``A`` with ``a_i = tr(A Pi_i)`` satisfies
    ``A = (1/d) sum_i ((d+1) a_i - tr A) Pi_i`` and ``tr A = sum_i a_i / d``.
    """
    r = np.asarray(r, dtype=float)
    d = sic.d
    if r.ndim != 2 or r.shape[1] != d * d:
        raise StateError(f"conditional matrix must have shape (n, {d * d}), got {r.shape}")
    trF = r.sum(axis=1) / d
    coeff = ((d + 1) * r - trF[:, None]) / d
    return np.einsum("ji,iab->jab", coeff, sic.projectors)


def born_rule(d: int, p, r) -> np.ndarray:
    """Outcome distribution ``Pr(j) = sum_i ((d+1) p_i - 1/d) r(j|i)``."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape[-1] != d * d or r.shape[-1] != d * d:
        raise StateError(f"dimension mismatch: expected {d * d} SIC outcomes")
    return ((d + 1) * p - 1.0 / d) @ r.T


def total_probability(p, r) -> np.ndarray:
    """Classical law of total probability ``sum_i p_i r(j|i)``."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape[-1] != r.shape[-1]:
        raise StateError("dimension mismatch between prior and conditional matrix")
    return p @ r.T


def _sign_fix(v):
    k = int(np.argmax(np.abs(v) > 1e-12))
    return v * np.exp(-1j * np.angle(v[k]))


def caratheodory_decompose(sic: SicSystem, rho, weight_tol: float = 1e-12):
    """Split a state into at most ``d`` weighted pure-state probability vectors.

    Uses the eigendecomposition of ``rho``. Pairs come back in descending
    weight order; eigenvalues at or below ``weight_tol`` are dropped.
    """
    rho = check_density_matrix(rho)
    _check_sic_dim(sic, rho.shape[0])
    w, V = np.linalg.eigh(rho)
    order = np.argsort(-w, kind="stable")
    out = []
    for idx in order:
        if w[idx] <= weight_tol:
            continue
        v = _sign_fix(V[:, idx])
        out.append((float(w[idx]), state_to_probs(sic, np.outer(v, v.conj()), validate=False)))
    return out
