import random

import pytest
from hypothesis import given, strategies as st

from spbound.bounds import crt_generating_set
from spbound.decomposition import (
    RootCertifier,
    compress,
    corner_word,
    factor_elq,
    in_c2_corner,
    is_lower_unipotent,
    is_upper_unipotent,
    pipeline_bound,
    theorem_b1_pipeline,
    unipotent_decompose_sr1,
    unipotent_reduce_to_c2,
)
from spbound.rings import ZZ, Ring
from spbound.symplectic import Long, ShortDiff, ShortSum, all_roots, identity, positive_roots, random_sp, root_element
from spbound.words import eval_word


def random_upper(n, R, seed):
    rng = random.Random(seed)
    u = identity(n, R)
    for r in positive_roots(n):
        t = rng.randrange(-40, 40) if R.modulus is None else rng.randrange(R.modulus)
        u = u @ root_element(n, r, t, R)
    return u


def test_identity_factorization():
    F = unipotent_decompose_sr1(identity(3, Ring(12)))
    assert all(getattr(F, k).is_identity() for k in ("u1p", "u1m", "u2p", "u2m"))


def test_upper_input():
    u = random_upper(3, Ring(12), 1)
    F = unipotent_decompose_sr1(u)
    assert F.u1p == u and F.product() == u
    low = u.transpose()
    assert unipotent_decompose_sr1(low).u1m == low


def test_needs_finite_ring():
    with pytest.raises(ValueError):
        unipotent_decompose_sr1(identity(3, ZZ))


@given(st.integers(0, 10**6), st.sampled_from([(3, 5), (3, 8), (2, 9), (4, 6), (3, 210)]))
def test_sr1_decomposition(seed, case):
    n, m = case
    A = random_sp(n, Ring(m), 30, seed)
    F = unipotent_decompose_sr1(A)
    assert F.product() == A
    assert is_upper_unipotent(F.u1p) and is_upper_unipotent(F.u2p)
    assert is_lower_unipotent(F.u1m) and is_lower_unipotent(F.u2m)


@given(st.integers(0, 10**6), st.sampled_from([(3, Ring(210)), (4, ZZ), (5, Ring(8)), (2, Ring(7))]))
def test_reduce_to_c2(seed, case):
    n, R = case
    u = random_upper(n, R, seed)
    up, w = unipotent_reduce_to_c2(u)
    assert len(w) <= 3 * (n - 2)
    assert in_c2_corner(up) and is_upper_unipotent(up)
    assert eval_word(w) == up.inverse() @ u
    assert len(corner_word(up)) <= 4


def test_reduce_to_c2_trivial_cases():
    u = random_upper(2, Ring(9), 3)
    assert unipotent_reduce_to_c2(u) == (u, unipotent_reduce_to_c2(u)[1])
    assert len(unipotent_reduce_to_c2(u)[1]) == 0
    up, w = unipotent_reduce_to_c2(identity(3, ZZ))
    assert up.is_identity() and len(w) == 0
    with pytest.raises(ValueError):
        unipotent_reduce_to_c2(root_element(3, Long(1, False), 1))


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=5), st.sampled_from([ZZ, Ring(210), Ring(16)]))
def test_compress(vec, R):
    H, Hi, g = compress(vec, R)
    k = len(vec)
    Hv = [R.reduce(sum(H[i][j] * vec[j] for j in range(k))) for i in range(k)]
    assert Hv == [R.reduce(g)] + [0] * (k - 1)
    prod = [[R.reduce(sum(H[i][l] * Hi[l][j] for l in range(k))) for j in range(k)] for i in range(k)]
    assert prod == [[int(i == j) for j in range(k)] for i in range(k)]


@given(st.integers(0, 10**6), st.sampled_from([(3, 8), (3, 5), (2, 6), (4, 30)]))
def test_factor_elq(seed, case):
    n, m = case
    A = random_sp(n, Ring(m), 30, seed)
    E = factor_elq(A)
    assert len(E.word) <= 9 * n - 6 == E.budget
    assert eval_word(E.word) == A


def test_factor_elq_small_cases():
    R = Ring(8)
    assert len(factor_elq(identity(3, R)).word) == 0
    for r in all_roots(3):
        E = factor_elq(root_element(3, r, 3, R))
        assert len(E.word) == 1


@pytest.fixture(scope="module")
def crt_set():
    return crt_generating_set(Ring(210), 2).set


def test_pipeline_identity(crt_set):
    res = theorem_b1_pipeline(identity(3, Ring(210)), crt_set)
    assert len(res.word) == 0


def test_short_root_within_stage_one(crt_set):
    cert = RootCertifier(crt_set)
    for r in (ShortDiff(1, 2), ShortSum(2, 3, False)):
        w = cert.root(r, 17)
        assert len(w) <= 64 * min(4, 5 * 3 * 2)
        assert eval_word(w, crt_set) == root_element(3, r, 17, Ring(210))


def test_long_roots_triple_cost(crt_set):
    cert = RootCertifier(crt_set)
    for r in (Long(1), Long(3, False)):
        w = cert.root(r, 11)
        assert len(w) <= 3 * cert.short_budget
        assert eval_word(w, crt_set) == root_element(3, r, 11, Ring(210))


def test_pipeline_routes_agree(crt_set):
    A = random_sp(3, Ring(210), 25, 4)
    for route in ("q", "5nk"):
        cert = RootCertifier(crt_set, route=route)
        res = theorem_b1_pipeline(A, crt_set, certifier=cert)
        assert eval_word(res.word, crt_set) == A
        assert len(res.word) <= res.bound == pipeline_bound(3, 4, 2) == 16128


def test_pipeline_rejects_bad_sets():
    R = Ring(210)
    with pytest.raises(ValueError):
        theorem_b1_pipeline(identity(3, R), [root_element(3, Long(1), 2, R)])
    with pytest.raises(ValueError):
        theorem_b1_pipeline(identity(2, R), [root_element(2, Long(1), 1, R)])
