import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbist import geometry as geo
from qbist.representation import positivity_check, probs_to_state, state_to_probs
from qbist.sampling import random_density_matrices, random_pure_states, random_unitary

from conftest import get_sic

simplex_points = st.integers(2, 5).flatmap(
    lambda d: st.lists(st.floats(0.0, 1.0), min_size=d * d, max_size=d * d)
    .filter(lambda xs: sum(xs) > 1e-3)
    .map(lambda xs: np.array(xs) / sum(xs))
)


def test_center_examples():
    for d in (2, 3, 4):
        assert np.all(geo.center(geo.uniform(d)) == 0)
        e = geo.center(geo.basis_distributions(d)[0])
        assert abs(e[0] - (1 / d - 1 / d**2)) < 1e-15
        np.testing.assert_allclose(e[1:], 1 / (d * (d + 1)) - 1 / d**2, atol=1e-15)


@settings(max_examples=60)
@given(simplex_points, simplex_points)
def test_centered_product_identity(p, q):
    if p.size != q.size:
        return
    d = math.isqrt(p.size)
    np.testing.assert_allclose(geo.uncenter(geo.center(p)), p, atol=1e-15)
    assert abs(geo.center(p) @ geo.center(q) - (p @ q - 1 / d**2)) < 1e-14
    # bounds in both forms agree away from float ties at the boundary
    lo_c, hi_c = -1 / (d * d * (d + 1)), (d - 1) / (d * d * (d + 1))
    x = geo.center(p) @ geo.center(q)
    if min(abs(x - lo_c), abs(x - hi_c)) > 1e-13:
        assert geo.consistency_pair(d, p, q, tol=0).in_bounds == (lo_c <= x <= hi_c)


def test_consistency_pair_examples():
    e1 = geo.basis_distributions(2)[0]
    res = geo.consistency_pair(2, e1, e1)
    assert res.at_upper and abs(res.product - 1 / 3) < 1e-15
    for d in (2, 3, 4):
        c = geo.uniform(d)
        res = geo.consistency_pair(d, c, c)
        assert res.in_bounds and not res.at_lower and not res.at_upper
    p = np.array([1, 1, 1, 1, 1, 1, 0, 0, 0]) / 6
    q = np.array([0, 0, 0, 1, 1, 1, 1, 1, 1]) / 6
    res = geo.consistency_pair(3, p, q)
    assert res.at_lower and abs(res.product - 1 / 12) < 1e-15


def test_basis_distribution_simplex():
    for d in range(2, 6):
        E = geo.basis_distributions(d)
        np.testing.assert_allclose(E.sum(axis=1), 1, atol=1e-15)
        G = E @ E.T
        np.testing.assert_allclose(np.diag(G), 2 / (d * (d + 1)), atol=1e-15)
        off = G[~np.eye(d * d, dtype=bool)]
        np.testing.assert_allclose(off, (d + 2) / (d * (d + 1) ** 2), atol=1e-15)
        assert geo.lower_bound(d) < off.min() and off.max() < geo.upper_bound(d)


def test_circumscribed_radius():
    assert geo.circumscribed_radius2(2) == pytest.approx(1 / 12, abs=1e-16)
    assert geo.circumscribed_radius2(3) == pytest.approx(1 / 18, abs=1e-16)
    for d in range(2, 7):
        e = geo.center(geo.basis_distributions(d)[3])
        assert abs(e @ e - geo.circumscribed_radius2(d)) < 1e-15


def test_sphere_membership_examples():
    assert geo.sphere_membership(geo.basis_distributions(3)[0]).on_sphere
    pos = geo.sphere_membership(geo.uniform(3))
    assert pos.inside and pos.norm2_centered == 0
    facet = np.array([1, 1, 1, 0]) / 3
    pos = geo.sphere_membership(facet)
    assert pos.on_sphere and abs(pos.norm2_centered - 1 / 12) < 1e-15


def test_max_component_examples(rng):
    for d in (2, 3, 4):
        E = geo.basis_distributions(d)
        res = geo.max_component_check(E[2])
        assert res.forced_basis == 2 and res.equals_basis and res.max_ok
        res = geo.max_component_check(geo.uniform(d))
        assert res.max_ok and res.forced_basis is None and res.max_value == pytest.approx(1 / d**2)
    sic = get_sic(3)
    for p in state_to_probs(sic, random_pure_states(3, 200, rng)):
        assert geo.max_component_check(p).max_value <= 1 / 3 + 1e-12
    with pytest.raises(geo.GeometryError):
        geo.max_component_check(np.array([1.0, 0, 0, 0]))


def test_max_component_schwarz_stability():
    # on-sphere points with p_1 = 1/d - delta sit at distance ~ sqrt(2 delta/(d+1)) from e_1
    for d in (2, 3, 4):
        e = geo.basis_distributions(d)[0]
        for delta in (1e-4, 1e-6, 1e-8):
            p1 = 1 / d - delta
            rest = (1 - p1) / (d * d - 1)
            slack = 2 / (d * (d + 1)) - p1**2 - (d * d - 1) * rest**2
            u = np.zeros(d * d - 1)
            u[0], u[1] = 1, -1
            p = np.concatenate([[p1], rest + math.sqrt(slack) * u / np.linalg.norm(u)])
            assert geo.sphere_membership(p).on_sphere
            dist = np.linalg.norm(p - e)
            assert dist <= math.sqrt(2 * delta / (d + 1)) * (1 + 1e-3) + 1e-12
            assert dist >= math.sqrt(2 * delta / (d + 1)) * 0.99


def test_opening_angle():
    assert geo.opening_angle(2) == -1
    assert geo.opening_angle(4) == pytest.approx(-1 / 3)
    for d in range(2, 6):
        lo_c = -1 / (d * d * (d + 1))
        assert lo_c / geo.circumscribed_radius2(d) == pytest.approx(geo.opening_angle(d))
    with pytest.raises(geo.GeometryError):
        geo.opening_angle(1)


def test_gram_vector_formula_values():
    for d in range(2, 7):
        assert geo.gram_vector_formula(d, 1) == pytest.approx(geo.circumscribed_radius2(d))
        assert geo.gram_vector_formula(d, d) == 0
        assert geo.gram_vector_formula(d, d + 1) < 0
    assert geo.gram_vector_formula(3, 2) == pytest.approx(1 / 18)


def test_orthobasis_images(sic, rng):
    d = sic.d
    for basis in (np.eye(d), random_unitary(d, rng).T, np.fft.fft(np.eye(d)) / np.sqrt(d)):
        ms = geo.orthobasis_to_distant(sic, basis)
        assert ms.accepted and ms.m == d
        assert abs(geo.gram_vector_norm2(ms.members)) <= 1e-10
        np.testing.assert_allclose(ms.members.mean(axis=0), geo.uniform(d), atol=1e-12)


def test_two_qubit_basis_points_antipodal():
    ms = geo.orthobasis_to_distant(get_sic(2), np.eye(2))
    a, b = geo.center(ms.members)
    np.testing.assert_allclose(a, -b, atol=1e-15)
    assert all(geo.sphere_membership(p).on_sphere for p in ms.members)


def test_partial_distant_set_gram_vector(rng):
    ms = geo.orthobasis_to_distant(get_sic(3), random_unitary(3, rng).T[:2])
    assert geo.gram_vector_norm2(ms.members) == pytest.approx(1 / 18, abs=1e-12)


def test_verify_max_distant_rejections():
    E = geo.basis_distributions(3)
    ms = geo.verify_max_distant(E[:2])
    assert not ms.accepted and (0, 1) in ms.violations
    assert geo.verify_max_distant(E[:1]).accepted
    with pytest.raises(geo.GeometryError):
        geo.gram_vector_norm2(E[:2])
    with pytest.raises(geo.GeometryError):
        geo.orthobasis_to_distant(get_sic(2), np.array([[1, 0], [1, 1]]) / np.sqrt([[1], [2]]))


def test_face_distance_oracle():
    for d in (2, 3, 4):
        for n in range(d * d):
            m = np.zeros(d * d)
            m[: d * d - n] = 1 / (d * d - n)
            direct = np.sum((m - geo.uniform(d)) ** 2)
            assert geo.face_distance2(d, n) == pytest.approx(direct, abs=1e-15)
    assert geo.face_distance2(2, 1) == pytest.approx(geo.circumscribed_radius2(2), abs=1e-16)
    assert geo.face_distance2(3, 3) == pytest.approx(geo.circumscribed_radius2(3), abs=1e-16)
    with pytest.raises(geo.GeometryError):
        geo.face_distance2(2, 4)


def test_zero_bound_touches_sphere():
    assert [geo.zero_bound(d) for d in range(2, 6)] == [1, 3, 6, 10]
    for d in range(2, 7):
        n = geo.zero_bound(d)
        assert geo.face_distance2(d, n) <= geo.circumscribed_radius2(d) + 1e-15
        assert geo.face_distance2(d, n + 1) > geo.circumscribed_radius2(d)


def test_max_zero_vector():
    p = geo.max_zero_vector(3, [6, 7, 8])
    np.testing.assert_allclose(p, [1 / 6] * 6 + [0] * 3)
    for d in range(2, 7):
        p = geo.max_zero_vector(d, range(geo.zero_bound(d)))
        assert abs(p.sum() - 1) < 1e-14
        assert geo.sphere_membership(p).on_sphere
        assert abs(p @ p - 2 / (d * (d + 1))) < 1e-15
    with pytest.raises(geo.GeometryError):
        geo.max_zero_vector(3, [0, 1])


def test_max_zero_vector_basis_products():
    for d in (3, 4, 5):
        p = geo.max_zero_vector(d, range(d * d - geo.zero_bound(d), d * d))
        prods = geo.basis_distributions(d) @ p
        assert prods.min() >= geo.lower_bound(d) - 1e-15 and prods.max() <= geo.upper_bound(d) + 1e-15
        np.testing.assert_allclose(prods[d * (d + 1) // 2:], geo.lower_bound(d), atol=1e-15)


def test_overlap_stats():
    d = 3
    p = geo.max_zero_vector(d, [6, 7, 8])
    res = geo.overlap_stats(p, p)
    assert res.s1 == 6 and res.consistent and res.product == Fraction(2, d * (d + 1))
    q = geo.max_zero_vector(d, [0, 1, 2])
    res = geo.overlap_stats(p, q)
    assert res.s1 == 3 and res.s0 == 0 and res.at_lower
    d = 4
    p = geo.max_zero_vector(d, range(10, 16))
    q = geo.max_zero_vector(d, range(6))
    res = geo.overlap_stats(p, q)
    assert res.s1 == 4 and not res.consistent
    with pytest.raises(geo.GeometryError):
        geo.overlap_stats(geo.uniform(3), p[:9])


def test_overlap_thresholds():
    for d in (3, 4, 5, 7, 8):
        k = d * (d + 1) // 2
        n = d * d
        for s1 in range(max(0, 2 * k - n), k + 1):
            p = np.zeros(n)
            p[:k] = 1
            q = np.zeros(n)
            q[:s1] = 1
            q[k:k + (k - s1)] = 1
            p, q = p * 2 / (d * (d + 1)), q * 2 / (d * (d + 1))
            res = geo.overlap_stats(p, q)
            assert res.consistent == (4 * s1 >= d * (d + 1))
            assert res.s0 >= d * (d - 3) / 4 or not res.consistent
            assert res.s >= d * (d - 1) / 2 or not res.consistent


def test_sphere_sample_on_sphere(rng):
    for d in (2, 3):
        pts = geo.sphere_sample(d, 100, rng)
        np.testing.assert_allclose(pts.sum(axis=1), 1, atol=1e-14)
        np.testing.assert_allclose(np.sum(geo.center(pts) ** 2, axis=1), geo.circumscribed_radius2(d), atol=1e-14)


def test_sphere_pokes_out_beyond_qubits():
    assert geo.sphere_exit_point(2, 1).min() >= -1e-15
    for d in (3, 4, 5):
        p = geo.sphere_exit_point(d, 1)
        assert geo.sphere_membership(p).on_sphere
        assert p.min() < -1e-4


def test_consistency_report(rng):
    sic = get_sic(3)
    P = state_to_probs(sic, random_density_matrices(3, 5, rng))
    rep = geo.consistency_report(np.vstack([P, geo.basis_distributions(3)[:2]]))
    assert rep.consistent
    assert rep.on_sphere[-2:] == [True, True] and (5, 5) in rep.at_upper
    bad = np.zeros(9)
    bad[0] = 1
    rep = geo.consistency_report(np.vstack([P[:1], bad]))
    assert (1, 1) in rep.upper_violations and not rep.consistent
    rep = geo.consistency_report(np.vstack([geo.max_zero_vector(4, range(6)), geo.max_zero_vector(4, range(10, 16))]))
    assert (0, 1) in rep.lower_violations and rep.zero_counts == [6, 6]


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_quantum_pairs_obey_bounds(d, rng):
    sic = get_sic(d)
    P = state_to_probs(sic, np.concatenate([random_pure_states(d, 300, rng), random_density_matrices(d, 300, rng)]))
    Q = state_to_probs(sic, np.concatenate([random_pure_states(d, 300, rng), random_density_matrices(d, 300, rng)]))
    x = np.sum(P * Q, axis=1)
    assert x.min() >= geo.lower_bound(d) - 1e-12
    assert x.max() < geo.upper_bound(d)
    # strictness argument: sum (p-q)^2 > 0 whenever p != q
    assert np.all(np.sum((P - Q) ** 2, axis=1) > 0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_mixtures_stay_quantum(d, rng):
    sic = get_sic(d)
    P = state_to_probs(sic, random_pure_states(d, 20, rng))
    for lam in (0.0, 0.3, 1.0):
        mix = lam * P[:10] + (1 - lam) * P[10:]
        for m in probs_to_state(sic, mix):
            assert positivity_check(m).is_state


def test_qubit_sphere_points_are_states(rng):
    sic = get_sic(2)
    for p in geo.sphere_sample(2, 200, rng):
        assert positivity_check(probs_to_state(sic, p)).is_state
