import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spbound.bounds import (
    ConjugatorPool,
    batch_fixed_space_dim,
    batch_inverse_sp,
    batch_matmul,
    batch_rank_mod_p,
    check_x_pattern,
    crt_generating_set,
    crt_sampling_failures,
    fixed_space_dim,
    fixed_space_law_violations,
    no_eigenvalue_one_witness,
    normally_generates,
    pi_of_set,
    random_sp_batch,
    rank_mod_p,
)
from spbound.rings import ZZ, MaxIdealSet, Ring
from spbound.symplectic import Long, ShortDiff, SpMatrix, identity, is_central_mod, random_sp, root_element


def minus_identity(n, R):
    d = 2 * n
    return SpMatrix([[R.reduce(-1) if i == j else 0 for j in range(d)] for i in range(d)], R)


def test_pi_examples():
    assert pi_of_set([identity(3, ZZ)]) == MaxIdealSet.all()
    assert pi_of_set([minus_identity(3, ZZ)]) == MaxIdealSet.all()
    assert pi_of_set([root_element(3, Long(1), 6, ZZ)]) == MaxIdealSet.of({2, 3})
    # -I + (something = 0 mod 3): central mod 3 only through -I
    A = root_element(3, Long(1), 3, ZZ) @ minus_identity(3, ZZ)
    assert pi_of_set([A]) == MaxIdealSet.of({3})


def test_pi_crt_set_over_z30():
    cert = crt_generating_set(Ring(30), 3)
    for j, A in enumerate(cert.set):
        assert pi_of_set([A]) == MaxIdealSet.of({2, 3, 5} - {(2, 3, 5)[j]})
    assert pi_of_set(cert.set).is_empty()


def test_normally_generates():
    R = Ring(210)
    assert not normally_generates([identity(3, R)])
    assert normally_generates([root_element(3, Long(1), 1, R)])
    with pytest.raises(ValueError):
        normally_generates([root_element(2, Long(1), 1, R)])


@given(st.integers(0, 10**5), st.integers(0, 10**5), st.sampled_from([6, 30, 210]))
def test_pi_of_union(s1, s2, m):
    R = Ring(m)
    divisors = [d for d in range(1, m + 1) if m % d == 0]
    A = root_element(3, ShortDiff(1, 3), divisors[s1 % len(divisors)], R).conj(random_sp(3, R, 10, s1))
    B = root_element(3, Long(2), divisors[s2 % len(divisors)], R).conj(random_sp(3, R, 10, s2))
    assert pi_of_set([A, B]) == pi_of_set([A]).intersect(pi_of_set([B]))
    for p in (q for q in (2, 3, 5, 7) if m % q == 0):
        assert (p in pi_of_set([A, B])) == (is_central_mod(A, p) and is_central_mod(B, p))


def test_fixed_space_examples():
    R = Ring(5)
    assert fixed_space_dim(identity(3, R)) == 6
    E = root_element(3, Long(1), 2, R)
    assert fixed_space_dim(E) == 5
    g = random_sp(3, R, 20, 1)
    assert fixed_space_dim(root_element(3, Long(1), 1, R).conj(g)) == 5
    with pytest.raises(ValueError):
        fixed_space_dim(identity(3, Ring(6)))


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5, 7]))
def test_batch_rank_matches_scalar(seed, p):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, p, size=(20, 5, 5))
    M[::3, 4] = M[::3, 0]  # force some rank drops
    ranks = batch_rank_mod_p(M, p)
    assert [rank_mod_p(m.tolist(), p) for m in M] == ranks.tolist()


def test_batch_helpers_agree_with_spmatrix():
    rng = np.random.default_rng(3)
    M = random_sp_batch(3, 7, 10, rng)
    inv = batch_inverse_sp(M, 3, 7)
    for a, b in zip(M, inv):
        A = SpMatrix(a.tolist(), Ring(7))
        assert A.inverse().rows == tuple(tuple(r) for r in b.tolist())
    pool = ConjugatorPool(3, 7, rng, size=16)
    assert batch_matmul(pool.g, pool.ginv, 7).tolist() == [np.eye(6, dtype=int).tolist()] * 16


@pytest.mark.parametrize("n,p", [(2, 3), (2, 2), (3, 2), (3, 5)])
def test_witness(n, p):
    A = no_eigenvalue_one_witness(n, p)
    assert fixed_space_dim(A) == 0
    assert rank_mod_p([[x - (i == j) for j, x in enumerate(r)] for i, r in enumerate(A.rows)], p) == 2 * n


def test_witness_needs_rank_two():
    with pytest.raises(ValueError):
        no_eigenvalue_one_witness(1, 5)


def test_fixed_space_laws_small():
    assert fixed_space_law_violations(2, 3, 500, seed=2) == {"product": 0, "conjugation": 0, "transvection_count": 0}


def test_transvection_products_exhaustive_sp4f2():
    # every product of at most 3 transvections in Sp4(F2) fixes a vector
    R = Ring(2)
    vecs = [v for v in itertools.product(range(2), repeat=4) if any(v)]
    Jm = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    T = []
    for v in vecs:
        u = np.array(v)
        T.append((np.eye(4, dtype=int) + np.outer(u, u) @ Jm) % 2)
    T = np.array(T)
    assert all(SpMatrix(t.tolist(), R) is not None for t in T)
    prods = T
    for _ in range(2):
        prods = (prods[:, None] @ T[None, :]).reshape(-1, 4, 4) % 2
        assert batch_fixed_space_dim(prods, 2).min() >= 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_crt_set(k):
    cert = crt_generating_set(Ring(30), k)
    assert check_x_pattern(cert) == []
    assert cert.claimed_bound == 6 * k
    assert normally_generates(cert.set)
    assert crt_sampling_failures(cert, 300, seed=k) == 0
    assert cert.to_json()["claimed_bound"] == 6 * k


def test_crt_set_single_prime():
    cert = crt_generating_set(Ring(7), 1)
    assert cert.xs == [1] and cert.claimed_bound == 6


def test_crt_set_errors():
    with pytest.raises(ValueError):
        crt_generating_set(Ring(30), 4)
    with pytest.raises(ValueError):
        crt_generating_set(Ring(30), 1, root=ShortDiff(1, 2))


def test_crt_prime_powers():
    cert = crt_generating_set(Ring(36), 2)
    assert check_x_pattern(cert) == []
    assert pi_of_set(cert.set).is_empty()


def test_s_integer_variant():
    cert = crt_generating_set(ZZ, 3, s_integers=[2, 3, 5])
    assert cert.xs == [15, 10, 6]
    assert pi_of_set(cert.set).is_empty()
    assert pi_of_set(cert.set[:1]) == MaxIdealSet.of({3, 5})
