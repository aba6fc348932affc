"""Weyl-Heisenberg SIC construction, verification and numerical fiducial search.

Projectors are stored as a ``(d*d, d, d)`` complex array ordered
lexicographically in the displacement labels ``(a, b)``, so index
``k = a*d + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "SicError",
    "SearchFailure",
    "Fiducial",
    "SicSystem",
    "GramReport",
    "wh_displacement",
    "displacement_operators",
    "orbit",
    "verify_sic",
    "known_fiducial",
    "search_fiducial",
    "orbit_objective",
    "MAX_SEARCH_DIM",
]

MAX_SEARCH_DIM = 7
NORM_TOL = 1e-8


class SicError(ValueError):
    """Invalid fiducial, candidate or dimension."""


class SearchFailure(RuntimeError):
    """Raised when the fiducial search does not reach its objective threshold."""

    def __init__(self, message, best_objective=None):
        super().__init__(message)
        self.best_objective = best_objective


def _check_dim(d):
    if int(d) != d or d < 2:
        raise SicError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def wh_displacement(d: int, a: int, b: int) -> np.ndarray:
    """Return ``tau**(a*b) X**a Z**b`` with ``tau = -exp(i*pi/d)``.

    ``X`` sends basis vector ``j`` to ``j+1 mod d`` and ``Z`` multiplies basis
    vector ``j`` by ``exp(2*pi*i*j/d)``.
    """
    d = _check_dim(d)
    if not (0 <= a < d and 0 <= b < d):
        raise SicError(f"displacement labels must lie in [0, {d}), got ({a}, {b})")
    tau = -np.exp(1j * np.pi / d)
    j = np.arange(d)
    # X^a Z^b |j> = omega^(b j) |j + a>
    out = np.zeros((d, d), dtype=complex)
    out[(j + a) % d, j] = np.exp(2j * np.pi * b * j / d)
    return tau ** (a * b) * out


def displacement_operators(d: int) -> np.ndarray:
    """All ``d*d`` displacement operators in lexicographic ``(a, b)`` order."""
    d = _check_dim(d)
    return np.array([wh_displacement(d, a, b) for a in range(d) for b in range(d)])


@dataclass(frozen=True)
class Fiducial:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        _check_dim(amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise SicError(f"fiducial norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class SicSystem:
    """A candidate or verified set of ``d*d`` rank-one projectors.

    ``vectors`` holds unit vectors ``psi_k`` with ``projectors[k] = |psi_k><psi_k|``.
    When only projectors are supplied (e.g. read from a file) the vectors are
    recovered from the projectors up to phase.
    """

    projectors: np.ndarray
    vectors: np.ndarray = field(default=None)

    def __post_init__(self):
        proj = np.asarray(self.projectors, dtype=complex)
        if proj.ndim != 3 or proj.shape[1] != proj.shape[2]:
            raise SicError(f"projectors must have shape (n, d, d), got {proj.shape}")
        d = _check_dim(proj.shape[1])
        if proj.shape[0] != d * d:
            raise SicError(f"expected {d * d} projectors for d={d}, got {proj.shape[0]}")
        proj.setflags(write=False)
        object.__setattr__(self, "projectors", proj)
        if self.vectors is None:
            vecs = np.array([_vector_of_projector(p) for p in proj])
        else:
            vecs = np.asarray(self.vectors, dtype=complex)
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def d(self) -> int:
        return self.projectors.shape[1]

    @property
    def size(self) -> int:
        return self.projectors.shape[0]

    @property
    def povm(self) -> np.ndarray:
        """POVM elements ``E_i = Pi_i / d``."""
        return self.projectors / self.d

    def gram(self) -> np.ndarray:
        """Real matrix of trace products ``tr(Pi_k Pi_l)``."""
        P = self.projectors
        return np.einsum("kij,lji->kl", P, P).real


def _vector_of_projector(p):
    # Pi v = v for any nonzero column of Pi; take the heaviest column.
    col = np.argmax(np.linalg.norm(p, axis=0))
    v = p[:, col]
    return v / np.linalg.norm(v)


def orbit(fiducial: Fiducial) -> SicSystem:
    """Weyl-Heisenberg orbit of ``fiducial`` as an (unverified) SicSystem."""
    if not isinstance(fiducial, Fiducial):
        fiducial = Fiducial(fiducial)
    D = displacement_operators(fiducial.d)
    vecs = D @ fiducial.amplitudes
    proj = np.einsum("ki,kj->kij", vecs, vecs.conj())
    return SicSystem(proj, vecs)


@dataclass(frozen=True)
class GramReport:
    max_offdiag_error: float
    max_idempotency_error: float
    resolution_error: float
    max_trace_error: float
    worst_pair: tuple
    tol: float
    idempotency_tol: float

    @property
    def accepted(self) -> bool:
        return (
            self.max_offdiag_error <= self.tol
            and self.resolution_error <= self.tol
            and self.max_trace_error <= self.tol
            and self.max_idempotency_error <= self.idempotency_tol
        )


def verify_sic(candidate: SicSystem, tol: float = 1e-9, idempotency_tol: float | None = None) -> GramReport:
    """Check the SIC conditions on ``candidate``; never raises on failure.

    ``idempotency_tol`` defaults to ``tol``.
    """
    if idempotency_tol is None:
        idempotency_tol = tol
    P = candidate.projectors
    d = candidate.d
    herm = np.max(np.abs(P - np.conj(np.transpose(P, (0, 2, 1)))))
    idem = np.max(np.abs(P @ P - P))
    traces = np.einsum("kii->k", P)
    trace_err = float(np.max(np.abs(traces - 1.0)))
    G = np.einsum("kij,lji->kl", P, P)
    off = np.abs(G - 1.0 / (d + 1))
    np.fill_diagonal(off, 0.0)
    k, l = np.unravel_index(np.argmax(off), off.shape)
    resolution = np.max(np.abs(P.sum(axis=0) / d - np.eye(d)))
    return GramReport(
        max_offdiag_error=float(off[k, l]),
        max_idempotency_error=float(max(idem, herm)),
        resolution_error=float(resolution),
        max_trace_error=trace_err,
        worst_pair=(int(min(k, l)), int(max(k, l))),
        tol=float(tol),
        idempotency_tol=float(idempotency_tol),
    )


def known_fiducial(d: int, t: float = 0.0) -> Fiducial:
    """Analytic fiducials: the tetrahedral qubit SIC and the qutrit family.

    For ``d == 3`` the fiducial is ``(0, 1, -exp(i t)) / sqrt(2)``; ``t`` is
    ignored for ``d == 2``.
    """
    if d == 2:
        # Bloch vector (1, 1, 1)/sqrt(3)
        theta = np.arccos(1 / np.sqrt(3))
        amps = np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])
    elif d == 3:
        amps = np.array([0.0, 1.0, -np.exp(1j * t)]) / np.sqrt(2)
    else:
        raise SicError(f"no analytic fiducial for d={d}; use search_fiducial")
    return Fiducial(amps)


def _overlap_residuals(d, D):
    """Residual and Jacobian callables for the orbit overlap equations.

    Parameters are ``x = (Re psi, Im psi)`` for an unnormalised ``psi``;
    the last residual pins ``|psi|^2 = 1``.
    """
    target = 1.0 / (d + 1)
    DT = np.transpose(D, (0, 2, 1))

    def residuals(x):
        psi = x[:d] + 1j * x[d:]
        n = np.vdot(psi, psi).real
        f = np.einsum("i,pij,j->p", psi.conj(), D, psi)
        return np.append(np.abs(f) ** 2 / n**2 - target, n - 1.0)

    def jacobian(x):
        psi = x[:d] + 1j * x[d:]
        n = np.vdot(psi, psi).real
        Dpsi = D @ psi
        DTc = DT @ psi.conj()
        f = Dpsi @ psi.conj()
        g = np.abs(f) ** 2
        gx = 2 * np.real(f.conj()[:, None] * (Dpsi + DTc))
        gy = 2 * np.real(f.conj()[:, None] * (-1j * Dpsi + 1j * DTc))
        J = np.hstack([gx, gy]) / n**2 - (4 * g / n**3)[:, None] * x[None, :]
        return np.vstack([J, 2 * x[None, :]])

    return residuals, jacobian


def orbit_objective(fiducial: Fiducial) -> float:
    """Sum over orbit pairs ``k < l`` of ``(|<psi_k|psi_l>|^2 - 1/(d+1))**2``."""
    sic = orbit(fiducial)
    d = sic.d
    G = np.abs(sic.vectors.conj() @ sic.vectors.T) ** 2
    iu = np.triu_indices(d * d, k=1)
    return float(np.sum((G[iu] - 1.0 / (d + 1)) ** 2))


def _gauge_fix(psi):
    psi = psi / np.linalg.norm(psi)
    k = int(np.argmax(np.abs(psi) > 1e-12))
    return psi * np.exp(-1j * np.angle(psi[k]))


def search_fiducial(
    d: int,
    seed: int = 0,
    restarts: int = 10,
    threshold: float = 1e-18,
    max_dim: int = MAX_SEARCH_DIM,
    max_nfev: int = 2000,
) -> Fiducial:
    """Numerically search for a Weyl-Heisenberg covariant SIC fiducial.

    Each restart draws a Gaussian starting vector from ``default_rng([seed, r])``
    and runs Levenberg-Marquardt on the ``d*d - 1`` overlap equations
    ``|<psi|D_p|psi>|^2 = 1/(d+1)``. The restart with the smallest pairwise
    objective (lowest index on ties) is returned.

    Raises SearchFailure when no restart reaches ``threshold``.
    """
    d = _check_dim(d)
    if d > max_dim:
        raise SicError(f"search is capped at d <= {max_dim}, got d={d}")
    if restarts < 1:
        raise SicError("restarts must be positive")
    D = displacement_operators(d)[1:]
    residuals, jacobian = _overlap_residuals(d, D)

    best, best_obj = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x0 = rng.normal(size=2 * d)
        sol = least_squares(
            residuals, x0, jac=jacobian, method="lm",
            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
        )
        psi = _gauge_fix(sol.x[:d] + 1j * sol.x[d:])
        obj = orbit_objective(Fiducial(psi))
        if obj < best_obj:
            best, best_obj = psi, obj
    if best_obj > threshold:
        raise SearchFailure(
            f"no SIC fiducial found for d={d} after {restarts} restarts "
            f"(best objective {best_obj:.3e} > {threshold:.1e})",
            best_objective=best_obj,
        )
    return Fiducial(best)
