"""Random quantum objects for tests and reproduction runs."""

import numpy as np


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_pure_vectors(d, size, rng=None):
    """Haar-random unit vectors, shape ``(size, d)``."""
    rng = _rng(rng)
    z = rng.normal(size=(size, d)) + 1j * rng.normal(size=(size, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_pure_states(d, size, rng=None):
    """Haar-random pure density matrices, shape ``(size, d, d)``."""
    v = random_pure_vectors(d, size, rng)
    return np.einsum("ni,nj->nij", v, v.conj())


def random_density_matrices(d, size, rng=None, rank=None):
    """Induced-measure random states ``G G^dag / tr`` with ``G`` of shape ``(d, rank)``.

    ``rank=None`` gives full rank (Hilbert-Schmidt measure).
    """
    rng = _rng(rng)
    k = d if rank is None else rank
    G = rng.normal(size=(size, d, k)) + 1j * rng.normal(size=(size, d, k))
    rho = G @ np.conj(np.transpose(G, (0, 2, 1)))
    tr = np.einsum("nii->n", rho).real
    return rho / tr[:, None, None]


def random_povm(d, n, rng=None):
    """Random ``n``-outcome POVM ``F_j = S^{-1/2} A_j S^{-1/2}``, ``A_j`` Wishart."""
    rng = _rng(rng)
    G = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    A = G @ np.conj(np.transpose(G, (0, 2, 1)))
    w, V = np.linalg.eigh(A.sum(axis=0))
    s = (V / np.sqrt(w)) @ V.conj().T
    F = s @ A @ s
    return 0.5 * (F + np.conj(np.transpose(F, (0, 2, 1))))


def random_unitary(d, rng=None):
    rng = _rng(rng)
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
