"""Words in conjugates of generators: the certificates behind every length bound.

A letter is (conjugator C, base g, exponent e) and evaluates to C g^e C^{-1}.
The base is either a member of a generating set S (by index) or a root
element. Length is the number of letters, which is what the conjugation word
norms count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rings import Ring
from .symplectic import RootIndex, SpMatrix, identity, root_element


@dataclass(frozen=True)
class SetElem:
    index: int


@dataclass(frozen=True)
class RootElem:
    root: RootIndex
    t: int


GenRef = SetElem | RootElem


@dataclass(frozen=True)
class Letter:
    conj: SpMatrix | None  # None means the identity
    base: GenRef
    exp: int = 1

    def __post_init__(self):
        if self.exp not in (1, -1):
            raise ValueError("exponent must be +-1")


@dataclass(frozen=True)
class ConjWord:
    n: int
    ring: Ring
    letters: tuple = ()
    bound_set: str | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.letters)

    @property
    def length(self) -> int:
        return len(self.letters)

    def __add__(self, other: "ConjWord") -> "ConjWord":
        return concat(self, other)

    def set_indices(self) -> set[int]:
        return {L.base.index for L in self.letters if isinstance(L.base, SetElem)}


def empty_word(n: int, ring: Ring, bound_set: str | None = None) -> ConjWord:
    return ConjWord(n, ring, (), bound_set)


def single(S_index: int, n: int, ring: Ring, conj: SpMatrix | None = None, exp: int = 1) -> ConjWord:
    return ConjWord(n, ring, (Letter(conj, SetElem(S_index), exp),))


def root_letter(root: RootIndex, t: int, n: int, ring: Ring, conj: SpMatrix | None = None, exp: int = 1) -> ConjWord:
    t = ring.reduce(t)
    if t == 0:
        return empty_word(n, ring)
    return ConjWord(n, ring, (Letter(conj, RootElem(root, t), exp),))


def concat(*words: ConjWord) -> ConjWord:
    if not words:
        raise ValueError("nothing to concatenate")
    n, ring = words[0].n, words[0].ring
    letters = []
    for w in words:
        if (w.n, w.ring) != (n, ring):
            raise ValueError("rank or ring mismatch")
        letters.extend(w.letters)
    return ConjWord(n, ring, tuple(letters), words[0].bound_set)


def _base_matrix(L: Letter, S, n: int, ring: Ring) -> SpMatrix:
    b = L.base
    if isinstance(b, SetElem):
        if not 0 <= b.index < len(S):
            raise IndexError(f"generator {b.index} not in S (|S| = {len(S)})")
        g = S[b.index]
        if g.ring != ring or g.n != n:
            raise ValueError("ring mismatch between word and S")
        return g if L.exp == 1 else g.inverse()
    return root_element(n, b.root, b.t * L.exp, ring)


def letter_value(L: Letter, S, n: int, ring: Ring) -> SpMatrix:
    g = _base_matrix(L, S, n, ring)
    if L.conj is None:
        return g
    return L.conj @ g @ L.conj.inverse()


def eval_word(w: ConjWord, S=()) -> SpMatrix:
    M = identity(w.n, w.ring)
    for L in w.letters:
        M = M @ letter_value(L, S, w.n, w.ring)
    return M


def conjugate_word(w: ConjWord, M: SpMatrix) -> ConjWord:
    """Each conjugator C becomes M C, so eval becomes M eval(w) M^{-1}."""
    if M.is_identity():
        return w
    letters = tuple(Letter(M if L.conj is None else M @ L.conj, L.base, L.exp) for L in w.letters)
    return ConjWord(w.n, w.ring, letters, w.bound_set)


def invert_word(w: ConjWord) -> ConjWord:
    letters = tuple(Letter(L.conj, L.base, -L.exp) for L in reversed(w.letters))
    return ConjWord(w.n, w.ring, letters, w.bound_set)


def power(w: ConjWord, e: int) -> ConjWord:
    return w if e == 1 else invert_word(w)


def commutator_with_constant(w: ConjWord, M: SpMatrix) -> ConjWord:
    """(w, M) = w M w^{-1} M^{-1}, written as w followed by M w^{-1} M^{-1}."""
    return concat(w, conjugate_word(invert_word(w), M))


def substitute(w: ConjWord, expansions: list[ConjWord]) -> ConjWord:
    """Replace generator i by the word expansions[i] (over some other set).

    A letter C s_i^e C^{-1} becomes C expansions[i]^e C^{-1}, so lengths multiply.
    """
    parts = []
    for L in w.letters:
        if isinstance(L.base, SetElem):
            sub = power(expansions[L.base.index], L.exp)
            parts.append(sub if L.conj is None else conjugate_word(sub, L.conj))
        else:
            parts.append(ConjWord(w.n, w.ring, (L,)))
    if not parts:
        ref = expansions[0] if expansions else w
        return ConjWord(ref.n, ref.ring, (), ref.bound_set)
    return concat(*parts)


def reindex(w: ConjWord, mapping, bound_set: str | None = None) -> ConjWord:
    """Rename SetElem indices through `mapping` (a dict or sequence)."""
    letters = tuple(
        Letter(L.conj, SetElem(mapping[L.base.index]), L.exp) if isinstance(L.base, SetElem) else L
        for L in w.letters
    )
    return ConjWord(w.n, w.ring, letters, bound_set if bound_set is not None else w.bound_set)


def verify_certificate(w: ConjWord, S, target: SpMatrix, budget: int) -> bool:
    if len(w) > budget:
        return False
    return eval_word(w, S) == target


# -- JSON ------------------------------------------------------------------


def word_to_json(w: ConjWord, target: SpMatrix | None = None, budget: int | None = None) -> dict:
    letters = []
    for L in w.letters:
        conj = (L.conj or identity(w.n, w.ring)).to_json()
        if isinstance(L.base, SetElem):
            base = {"set": L.base.index}
        else:
            base = {"root": L.base.root.to_json(), "t": L.base.t}
        letters.append({"conj": conj, "base": base, "exp": L.exp})
    out = {"bound_set": w.bound_set, "n": w.n, "ring": w.ring.to_json(), "letters": letters}
    if target is not None:
        out["claimed_target"] = target.to_json()
    if budget is not None:
        out["budget"] = budget
    return out


def word_from_json(obj) -> ConjWord:
    ring = Ring.from_json(obj["ring"])
    n = int(obj["n"])
    letters = []
    for L in obj["letters"]:
        C = SpMatrix.from_json(L["conj"])
        conj = None if C.is_identity() else C
        b = L["base"]
        if "set" in b:
            base = SetElem(int(b["set"]))
        else:
            base = RootElem(RootIndex.from_json(b["root"]), ring.reduce(int(b["t"])))
        letters.append(Letter(conj, base, int(L["exp"])))
    return ConjWord(n, ring, tuple(letters), obj.get("bound_set"))
