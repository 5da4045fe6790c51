import math

import pytest
from hypothesis import given, strategies as st

from spbound.bounds import pi_of_set
from spbound.rings import ZZ, Ring, v_of_ideal
from spbound.symplectic import Long, ShortDiff, ShortSum, commutator, identity, random_sp, root_element
from spbound.reduction import (
    STAGE_BUDGETS,
    certify_and_check,
    column_constants,
    first_column_ideal,
    first_hessenberg,
    is_first_hessenberg,
    is_second_hessenberg,
    lemma16_certificates,
    lemma16_targets,
    lemma32_second_form,
    level_ideal,
    level_ideal_7n_split,
    mirror_matrix,
    rotation,
    scalar_congruence_failures,
    second_hessenberg,
    stage_totals,
)
from spbound.words import eval_word


def column_gcd(values, m=None):
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g if m is None else math.gcd(g, m)


@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([ZZ, Ring(12), Ring(210)]))
def test_rotation_is_unimodular(a, b, R):
    rot = rotation(a, b, R)
    if rot is None:
        assert R.reduce(b) == 0
        return
    u, v, x, y = rot
    assert u * y - v * x == 1
    assert R.reduce(x * a + y * b) == 0
    if R.modulus is None:
        assert abs(u * a + v * b) == math.gcd(a, b)


@given(st.integers(0, 10**6), st.sampled_from([(3, Ring(210)), (4, ZZ), (3, ZZ), (4, Ring(36))]))
def test_hessenberg_forms(seed, case):
    n, R = case
    A = random_sp(n, R, 12, seed)
    m = R.modulus
    for res, check, top in ((first_hessenberg(A), is_first_hessenberg, 0), (second_hessenberg(A), is_second_hessenberg, n)):
        assert res.conjugator @ A @ res.conjugator.inverse() == res.form
        assert check(res.form)
        want = column_gcd([A.rows[top + i][0] for i in range(1, n)], m)
        got = res.form.rows[top + 1][0]
        assert (abs(got) if m is None else math.gcd(got, m)) == want


def test_hessenberg_needs_rank_three():
    with pytest.raises(ValueError):
        first_hessenberg(identity(2, ZZ))


def closed_forms(A, x):
    """The two targets from the entries of A and A^{-1}."""
    n, R = A.n, A.ring
    B = A.inverse()
    b = B.a(n + 1, n + 1) - B.a(n + 1, 1)
    t1 = root_element(n, ShortSum(2, n, False), -(A.a(1, 1) * b - 1) * x, R)
    t2 = root_element(n, ShortSum(1, n, False), -(A.a(2, 1) * b) * x, R)
    return t1, t2


@given(st.integers(0, 10**6), st.integers(0, 209))
def test_first_form_certificates(seed, x):
    R = Ring(210)
    A = first_hessenberg(random_sp(3, R, 20, seed)).form
    w1, w2 = lemma16_certificates(A, x)
    assert len(w1) <= 16 and len(w2) <= 16
    t1, t2 = closed_forms(A, x)
    assert (t1, t2) == lemma16_targets(A, x)
    assert eval_word(w1, [A]) == t1
    assert eval_word(w2, [A]) == t2


def test_first_form_certificates_over_integers_rank4():
    A = first_hessenberg(random_sp(4, ZZ, 10, 3)).form
    w1, w2 = lemma16_certificates(A, 5)
    t1, t2 = closed_forms(A, 5)
    assert eval_word(w1, [A]) == t1 and eval_word(w2, [A]) == t2


def test_first_form_required():
    A = random_sp(3, Ring(210), 30, 11)
    if not is_first_hessenberg(A):
        with pytest.raises(ValueError):
            lemma16_certificates(A, 1)


def test_mirror_matrix_moves_lower_column():
    n, R = 3, Ring(101)
    P = mirror_matrix(n, R)
    A = second_hessenberg(random_sp(n, R, 20, 5)).form
    Z = A.conj(P)
    assert Z.a(1, 1) == A.a(1, 1)
    assert Z.a(2, 1) == A.a(n + 2, 1)
    assert all(Z.a(i, 1) == 0 for i in range(3, n + 1))


@given(st.integers(0, 10**6), st.integers(0, 209))
def test_second_form_certificates(seed, x):
    R = Ring(210)
    A = second_hessenberg(random_sp(3, R, 20, seed)).form
    c = lemma32_second_form(A, x)
    assert len(c.first) <= 16 and len(c.second) <= 16
    assert eval_word(c.first, [A]) == c.target_first
    assert eval_word(c.second, [A]) == c.target_second
    B = A.inverse()
    b = B.a(4, 4) - B.a(4, 1)
    assert c.generators == (R.reduce(A.a(1, 1) * b - 1), R.reduce(A.a(5, 1) * b))


# frozen values, computed once by the exhaustive check in test_level_ideal_matches_pi
LEVEL_CASES = [
    (root_element(3, Long(1), 6, Ring(210)), 6, {2, 3}),
    (root_element(3, ShortDiff(1, 2), 35, Ring(210)), 35, {5, 7}),
    (identity(3, Ring(210)), 0, {2, 3, 5, 7}),
]


@pytest.mark.parametrize("A,canonical,V", LEVEL_CASES)
def test_level_ideal_frozen(A, canonical, V):
    ci = level_ideal(A)
    assert ci.ideal.canonical == canonical
    assert v_of_ideal(ci.ideal).primes == frozenset(V)
    assert pi_of_set([A]).primes == frozenset(V)


@given(st.integers(0, 10**6), st.sampled_from([2, 6, 30, 35]))
def test_level_ideal_matches_pi(seed, d):
    R = Ring(210)
    g = random_sp(3, R, 15, seed)
    A = commutator(g, root_element(3, Long(2), d, R)) @ root_element(3, ShortSum(1, 3), d, R).conj(g)
    ci = level_ideal(A)
    V, Pi = v_of_ideal(ci.ideal), pi_of_set([A])
    assert V.issubset(Pi)
    assert scalar_congruence_failures(A, ci.ideal) == []
    assert ci.budget <= 320 * 3
    x = ci.ideal.canonical * (seed % 7 + 1)
    assert certify_and_check(ci, x, 960)


def test_level_ideal_over_integers():
    A = root_element(3, Long(1), 12, ZZ)
    ci = level_ideal(A)
    assert ci.ideal.canonical != 0 and 12 % ci.ideal.canonical == 0
    assert certify_and_check(ci, ci.ideal.canonical * 2)


def test_split_shape_and_budgets():
    A = random_sp(3, Ring(210), 25, 7)
    split = level_ideal_7n_split(A)
    assert len(split) == 21
    assert all(ci.budget <= 64 for ci in split)
    full = level_ideal(A, short_circuit=False)
    assert stage_totals(full, 3) == {k: v * 3 for k, v in STAGE_BUDGETS.items()}
    assert sum(stage_totals(full, 3).values()) == 320 * 3
    assert full.ideal.canonical == level_ideal(A).ideal.canonical


def test_first_column_ideal_contains_constants():
    A = first_hessenberg(random_sp(3, Ring(210), 20, 2)).form
    ci = first_column_ideal(A)
    c1, c2 = column_constants(A)
    assert ci.ideal.contains(c1) and ci.ideal.contains(c2)
    assert ci.budget == 64
