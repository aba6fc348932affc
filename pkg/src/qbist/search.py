"""Combinatorial and linear-algebraic searches over max-zero patterns and SIC vectors.

Max-zero patterns are represented by their support (the positions holding
``2/(d(d+1))``) encoded as an integer bitmask. Scalar products between two
patterns are ``|S & T| * (2/(d(d+1)))**2`` and are compared exactly with
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .geometry import max_zero_value
from .sic_core import SicSystem, known_fiducial, orbit

__all__ = [
    "InfeasibleSearch",
    "support_size",
    "pattern_product",
    "is_consistent",
    "is_max_distant",
    "support_vector",
    "permutation_consistency_classify",
    "PermutationClassification",
    "distant_clique_search",
    "CliqueResult",
    "subspace_dependence_search",
    "SubspaceHit",
    "certify_hit",
    "orthogonal_complement_state",
    "dependent_triple_scan",
]


class InfeasibleSearch(RuntimeError):
    """Enumeration size exceeds the configured cap."""


def support_size(d) -> int:
    return d * (d + 1) // 2


def _mask(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _indices(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def pattern_product(d, s, t) -> Fraction:
    return (s & t).bit_count() * max_zero_value(d) ** 2


def is_consistent(d, s, t) -> bool:
    return pattern_product(d, s, t) >= Fraction(1, d * (d + 1))


def is_max_distant(d, s, t) -> bool:
    return pattern_product(d, s, t) == Fraction(1, d * (d + 1))


def support_vector(d, mask) -> np.ndarray:
    p = np.zeros(d * d)
    p[_indices(mask)] = 2.0 / (d * (d + 1))
    return p


def _all_supports(d):
    for comb in itertools.combinations(range(d * d), support_size(d)):
        yield _mask(comb)


@dataclass(frozen=True)
class PermutationClassification:
    d: int
    all_consistent: bool
    min_s1_observed: int
    pairs_checked: int
    inconsistent_pairs: int
    at_lower_pairs: int
    mode: str


def permutation_consistency_classify(d, cap=200_000, allow_sampling=True, samples=100_000, seed=0):
    """Classify pairs of max-zero patterns by consistency.

    Pattern pairs are permutation covariant, so the first pattern can be fixed
    to the canonical support ``{0, ..., d(d+1)/2 - 1}``. Small cases
    (at most 1000 supports) are checked over all pairs anyway; up to ``cap``
    supports the canonical one is paired with every support; beyond that a
    seeded random sample of supports is drawn, or InfeasibleSearch is raised.
    """
    n, k = d * d, support_size(d)
    total = math.comb(n, k)
    canon = (1 << k) - 1
    if total <= 1000:
        supports = list(_all_supports(d))
        pairs = itertools.combinations_with_replacement(supports, 2)
        mode = "all-pairs"
    elif total <= cap:
        pairs = ((canon, t) for t in _all_supports(d))
        mode = "canonical"
    elif allow_sampling:
        rng = np.random.default_rng(seed)
        pairs = ((canon, _mask(rng.choice(n, size=k, replace=False))) for _ in range(samples))
        mode = "sampled"
    else:
        raise InfeasibleSearch(f"{total} supports exceed cap {cap} and sampling is disabled")

    lo = Fraction(1, d * (d + 1))
    v2 = max_zero_value(d) ** 2
    checked = bad = at_lo = 0
    min_s1 = k
    for s, t in pairs:
        s1 = (s & t).bit_count()
        prod = s1 * v2
        checked += 1
        min_s1 = min(min_s1, s1)
        bad += prod < lo
        at_lo += prod == lo
    return PermutationClassification(d, bad == 0, min_s1, checked, bad, at_lo, mode)


@dataclass(frozen=True)
class CliqueResult:
    d: int
    support_size: int
    max_clique_size: int
    witness: tuple
    candidates: int

    def witness_vectors(self) -> np.ndarray:
        return np.array([support_vector(self.d, s) for s in self.witness])


def _max_clique(adj):
    """Exact maximum clique on a small graph given as bitset adjacency lists."""
    best = []

    def expand(clique, cand):
        nonlocal best
        if not cand:
            if len(clique) > len(best):
                best = clique
            return
        while cand:
            if len(clique) + cand.bit_count() <= len(best):
                return
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            expand(clique + [v], cand & adj[v])

    expand([], (1 << len(adj)) - 1)
    return sorted(best)


def distant_clique_search(d, cap=50_000) -> CliqueResult:
    """Largest set of pairwise maximally distant max-zero patterns.

    The canonical support is a mandatory member; candidates are all supports
    maximally distant from it, which requires sharing exactly
    ``d(d+1)/4`` positions. An exact branch and bound then finds the maximum
    clique among the candidates.
    """
    n, k = d * d, support_size(d)
    canon = (1 << k) - 1
    lo = Fraction(1, d * (d + 1))
    shared = lo / max_zero_value(d) ** 2
    if shared.denominator != 1:
        return CliqueResult(d, k, 1, (canon,), 0)
    s1 = int(shared)
    count = math.comb(k, s1) * math.comb(n - k, k - s1)
    if count > cap:
        raise InfeasibleSearch(f"{count} candidate supports for d={d} exceed cap {cap}")
    inside, outside = range(k), range(k, n)
    cands = [
        _mask(a) | _mask(b)
        for a in itertools.combinations(inside, s1)
        for b in itertools.combinations(outside, k - s1)
    ]
    # the product equals the bound exactly iff the overlap count equals s1
    adj = [0] * len(cands)
    for i, j in itertools.combinations(range(len(cands)), 2):
        if (cands[i] & cands[j]).bit_count() == s1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    clique = _max_clique(adj)
    witness = (canon,) + tuple(cands[i] for i in clique)
    assert all(is_max_distant(d, s, t) for s, t in itertools.combinations(witness, 2))
    return CliqueResult(d, k, len(witness), witness, len(cands))


@dataclass(frozen=True)
class SubspaceHit:
    subset: tuple
    rank: int
    singular_values: tuple

    @property
    def smallest_singular_values(self):
        return self.singular_values[self.rank:]


def subspace_dependence_search(
    sic: SicSystem, k: int, max_subsets=2_000_000, rel_tol=1e-8, gap=1e3, chunk=50_000
) -> list:
    """All ``k``-subsets of SIC vectors spanning at most ``d - 1`` dimensions.

    For ``k < d`` every subset fits in such a subspace, so only linearly
    dependent subsets (rank below ``k``) are reported.

    Rank is read from the singular values of the ``d x k`` matrix of vectors:
    ``sigma < rel_tol * sigma_max`` counts as zero, and a hit also needs a
    ratio of at least ``gap`` between the last nonzero and first zero value.
    """
    d, n = sic.d, sic.size
    if not 1 <= k <= n:
        raise ValueError(f"subset size must lie in [1, {n}]")
    total = math.comb(n, k)
    if total > max_subsets:
        raise InfeasibleSearch(f"C({n}, {k}) = {total} subsets exceed cap {max_subsets}")
    V = np.asarray(sic.vectors)
    hits = []
    combos = itertools.combinations(range(n), k)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        # batch shape (m, k, d); singular values equal those of the d x k matrix
        s = np.linalg.svd(V[block], compute_uv=False)
        rank = np.sum(s >= rel_tol * s[:, :1], axis=1)
        for idx in np.flatnonzero(rank < min(k, d)):
            sv = s[idx]
            r = int(rank[idx])
            if r == 0 or sv[r - 1] < gap * sv[r]:
                continue
            hits.append(SubspaceHit(tuple(int(i) for i in block[idx]), r, tuple(float(x) for x in sv)))
    hits.sort(key=lambda h: h.subset)
    return hits


def certify_hit(sic: SicSystem, hit: SubspaceHit, threshold=1e-16, dps=50) -> bool:
    """Independent rank-deficiency check via the Gram determinant of the subset.

    The determinant is evaluated in ``dps``-digit arithmetic on the stored
    double-precision vectors and compared with ``threshold`` times the
    Hadamard bound ``prod_i G_ii``.
    """
    V = np.asarray(sic.vectors)[list(hit.subset)]
    with mpmath.workdps(dps):
        M = mpmath.matrix([[mpmath.mpc(complex(z)) for z in row] for row in V])
        G = M * M.H
        scale = mpmath.fprod(G[i, i].real for i in range(G.rows))
        return abs(mpmath.det(G)) < threshold * scale


def orthogonal_complement_state(sic: SicSystem, subset, rel_tol=1e-8) -> np.ndarray:
    """Pure state orthogonal to the SIC vectors at ``subset``.

    Uses the left singular vector for the smallest singular value of the
    ``d x k`` matrix of vectors, phased so its first nonzero entry is real
    and positive.
    """
    subset = [int(i) for i in subset]
    d = sic.d
    if not subset:
        raise ValueError("subset must be nonempty")
    A = np.asarray(sic.vectors)[subset].T
    U, s, _ = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s >= rel_tol * s[0]))
    if rank >= d:
        raise ValueError(f"SIC vectors {subset} span the full {d}-dimensional space")
    psi = U[:, -1]
    j = int(np.argmax(np.abs(psi) > 1e-12))
    psi = psi * np.exp(-1j * np.angle(psi[j]))
    return np.outer(psi, psi.conj())


def dependent_triple_scan(ts, tol=1e-8):
    """Count linearly dependent SIC-vector triples across the qutrit family.

    Returns a list of ``(t, hits)`` where ``hits`` is the number of
    dependent triples among the 84 for that family member.
    """
    out = []
    for t in ts:
        sic = orbit(known_fiducial(3, t))
        out.append((float(t), len(subspace_dependence_search(sic, 3, rel_tol=tol))))
    return out
