import pytest
from hypothesis import given, strategies as st

from spbound.rings import Ring
from spbound.symplectic import Long, ShortDiff, identity, random_sp, root_element
from spbound.words import (
    ConjWord,
    Letter,
    RootElem,
    SetElem,
    commutator_with_constant,
    concat,
    conjugate_word,
    empty_word,
    eval_word,
    invert_word,
    reindex,
    root_letter,
    single,
    substitute,
    verify_certificate,
    word_from_json,
    word_to_json,
)

R = Ring(210)
N = 3


def random_word(seed: int, length: int, k: int = 2) -> ConjWord:
    letters = []
    for i in range(length):
        C = random_sp(N, R, 6, seed * 100 + i)
        base = SetElem((seed + i) % k) if i % 3 else RootElem(ShortDiff(1, 2), seed + i)
        letters.append(Letter(C, base, 1 if (seed + i) % 2 else -1))
    return ConjWord(N, R, tuple(letters))


S = [random_sp(N, R, 10, 1), random_sp(N, R, 10, 2)]


def brute_eval(w, S):
    M = identity(N, R)
    for L in w.letters:
        g = S[L.base.index] if isinstance(L.base, SetElem) else root_element(N, L.base.root, L.base.t, R)
        if L.exp == -1:
            g = g.inverse()
        C = L.conj or identity(N, R)
        M = M @ C @ g @ C.inverse()
    return M


@given(st.integers(0, 1000), st.integers(0, 6))
def test_eval_matches_brute_force(seed, length):
    w = random_word(seed, length)
    assert eval_word(w, S) == brute_eval(w, S)


@given(st.integers(0, 1000), st.integers(0, 5), st.integers(0, 5))
def test_concat_is_product(seed, a, b):
    w1, w2 = random_word(seed, a), random_word(seed + 1, b)
    assert eval_word(concat(w1, w2), S) == eval_word(w1, S) @ eval_word(w2, S)
    assert len(w1 + w2) == a + b


@given(st.integers(0, 1000), st.integers(0, 5))
def test_invert_and_conjugate(seed, length):
    w = random_word(seed, length)
    M = random_sp(N, R, 8, seed)
    assert eval_word(invert_word(w), S) == eval_word(w, S).inverse()
    assert eval_word(conjugate_word(w, M), S) == eval_word(w, S).conj(M)
    c = commutator_with_constant(w, M)
    assert len(c) == 2 * len(w)
    W = eval_word(w, S)
    assert eval_word(c, S) == W @ M @ W.inverse() @ M.inverse()


def test_substitute_multiplies_lengths():
    w = concat(single(0, N, R), single(1, N, R, exp=-1), single(0, N, R, conj=S[1]))
    e0, e1 = random_word(3, 4), random_word(4, 2)
    T = [eval_word(e0, S), eval_word(e1, S)]
    sub = substitute(w, [e0, e1])
    assert len(sub) == 4 + 2 + 4
    assert eval_word(sub, S) == eval_word(w, T)


def test_reindex():
    w = concat(single(0, N, R), single(1, N, R))
    assert reindex(w, [1, 0]).set_indices() == {0, 1}
    assert eval_word(reindex(w, {0: 1, 1: 0}), S) == S[1] @ S[0]


def test_root_letter_skips_zero():
    assert len(root_letter(Long(1), 210, N, R)) == 0
    assert eval_word(root_letter(Long(1), 5, N, R)) == root_element(N, Long(1), 5, R)


def test_exponent_validated():
    with pytest.raises(ValueError):
        Letter(None, SetElem(0), 2)


def test_missing_generator():
    with pytest.raises(IndexError):
        eval_word(single(3, N, R), S)


def test_verify_certificate_budget():
    w = random_word(5, 4)
    T = eval_word(w, S)
    assert verify_certificate(w, S, T, 4)
    assert not verify_certificate(w, S, T, 3)
    assert not verify_certificate(w, S, T @ S[0], 4)


def test_json_round_trip():
    w = random_word(7, 5)
    obj = word_to_json(w, eval_word(w, S), 5)
    back = word_from_json(obj)
    assert eval_word(back, S) == eval_word(w, S)
    assert obj["budget"] == 5 and "claimed_target" in obj
    assert len(empty_word(N, R)) == 0
