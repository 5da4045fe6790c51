"""Hessenberg forms, nested-commutator certificates and level ideals.

Everything produced here is a word over the one-element set {A}. The
certificates are built from a single trick: commutating a word with a fixed
matrix M doubles its length, so four nested commutators starting from
X = (A, I + e_{1,n+1}) (length 2) stay within 16 letters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .rings import IdealRep, Ring, egcd, ideal_sum, v_of_ideal
from .symplectic import (
    J,
    Long,
    RootIndex,
    ShortDiff,
    ShortSum,
    SpMatrix,
    commutator,
    gl_block,
    identity,
    root_element,
    weyl_k,
    weyl_root,
    weyl_transport,
)
from .words import (
    ConjWord,
    commutator_with_constant,
    concat,
    conjugate_word,
    empty_word,
    eval_word,
    single,
    substitute,
)

# Every ideal is certified through this root: x in ideal <=> eps_PHI(x) in B_A(budget).
PHI = ShortDiff(1, 2)


def _require_rank(A: SpMatrix):
    if A.n < 3:
        raise ValueError("this construction needs n >= 3 (Sp_4 behaves differently)")


# ---------------------------------------------------------------------------
# Unimodular 2x2 rotations


def rotation(a: int, b: int, ring: Ring) -> tuple[int, int, int, int] | None:
    """(u, v, x, y) with uy - vx = 1, ua + vb ~ gcd(a, b) and xa + yb = 0.

    Computed on integer lifts so the quotients x = -b/d, y = a/d are exact even
    when the ring has zero divisors. None when b is already zero.
    """
    a, b = ring.reduce(a), ring.reduce(b)
    if b == 0:
        return None
    d, u, v = egcd(a, b)
    x, y = -b // d, a // d
    return u, v, x, y


def _embedded(n: int, p: int, r: int, rot) -> tuple[tuple, tuple]:
    """n x n identity with [[u, v], [x, y]] on 1-based rows/cols p, r; plus inverse."""
    u, v, x, y = rot
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    Mi = [[int(i == j) for j in range(n)] for i in range(n)]
    p, r = p - 1, r - 1
    M[p][p], M[p][r], M[r][p], M[r][r] = u, v, x, y
    Mi[p][p], Mi[p][r], Mi[r][p], Mi[r][r] = y, -v, -x, u
    return tuple(map(tuple, M)), tuple(map(tuple, Mi))


def _transpose(M):
    return tuple(zip(*M))


@dataclass(frozen=True)
class HessenbergResult:
    conjugator: SpMatrix
    form: SpMatrix
    variant: str  # "first" or "second"


def is_first_hessenberg(A: SpMatrix) -> bool:
    n = A.n
    return all(A.rows[i][j] == 0 for j in range(n) for i in range(j + 2, n))


def is_second_hessenberg(A: SpMatrix) -> bool:
    n = A.n
    return all(A.rows[n + i][j] == 0 for j in range(n) for i in range(j + 2, n))


def _hessenberg(A: SpMatrix, second: bool) -> HessenbergResult:
    _require_rank(A)
    n, R = A.n, A.ring
    C = identity(n, R)
    F = A
    off = n if second else 0
    for c in range(1, n - 1):
        p = c + 1
        for r in range(c + 2, n + 1):
            rot = rotation(F.a(off + p, c), F.a(off + r, c), R)
            if rot is None:
                continue
            M, Mi = _embedded(n, p, r, rot)
            if second:
                # lower-right block must be M, so the upper-left is M^{-T}
                T = gl_block((_transpose(Mi), _transpose(M)), R)
            else:
                T = gl_block((M, Mi), R)
            F = T @ F @ T.inverse()
            C = T @ C
    return HessenbergResult(C, F, "second" if second else "first")


def first_hessenberg(A: SpMatrix) -> HessenbergResult:
    """C A C^{-1} with upper-left block upper Hessenberg and (2,1) ~ gcd(a_21..a_n1)."""
    return _hessenberg(A, second=False)


def second_hessenberg(A: SpMatrix) -> HessenbergResult:
    """Same on the lower-left block: (n+2,1) ~ gcd(a_{n+2,1}..a_{2n,1})."""
    return _hessenberg(A, second=True)


# ---------------------------------------------------------------------------
# The nested commutators


def _column_ok(A: SpMatrix) -> bool:
    return all(A.rows[i][0] == 0 for i in range(2, A.n))


def hessenberg_commutator_X(A: SpMatrix) -> SpMatrix:
    """X = (A, I + e_{1,n+1})."""
    _require_rank(A)
    if not is_first_hessenberg(A):
        raise ValueError("A is not in first Hessenberg form")
    return commutator(A, root_element(A.n, Long(1), 1, A.ring))


def column_constants(A: SpMatrix) -> tuple[int, int]:
    """(a11 (b_{n+1,n+1} - b_{n+1,1}) - 1,  a21 (b_{n+1,n+1} - b_{n+1,1})) with B = A^{-1}."""
    n, R = A.n, A.ring
    B = A.inverse()
    b = B.a(n + 1, n + 1) - B.a(n + 1, 1)
    return R.reduce(A.a(1, 1) * b - 1), R.reduce(A.a(2, 1) * b)


# roots of the two closed-form targets
TARGET_ROOTS = (lambda n: ShortSum(2, n, False), lambda n: ShortSum(1, n, False))


class _ColumnCertificates:
    """Certificates for a matrix whose first column vanishes in rows 3..n.

    Only that column pattern matters: A e_{1,n+1} A^{-1} is the outer product of
    the first column of A and row n+1 of A^{-1}, which is itself determined by
    the first column.
    """

    def __init__(self, A: SpMatrix):
        _require_rank(A)
        if not _column_ok(A):
            raise ValueError("first column of A must vanish in rows 3..n")
        n, R = A.n, A.ring
        self.A = A
        self.c1, self.c2 = column_constants(A)
        x_word = commutator_with_constant(single(0, n, R), root_element(n, Long(1), 1, R))
        z_word = commutator_with_constant(x_word, root_element(n, ShortSum(1, n, False), 1, R))
        self._s1 = commutator_with_constant(z_word, root_element(n, Long(1, False), 1, R))
        self._s2 = commutator_with_constant(z_word, root_element(n, Long(2, False), 1, R))

    def first(self, x: int) -> ConjWord:
        """Evaluates to I - c1 x (e_{2n,2} + e_{n+2,n})."""
        n, R = self.A.n, self.A.ring
        return commutator_with_constant(self._s1, root_element(n, ShortDiff(1, 2), x, R))

    def second(self, x: int) -> ConjWord:
        """Evaluates to I - c2 x (e_{2n,1} + e_{n+1,n})."""
        n, R = self.A.n, self.A.ring
        return commutator_with_constant(self._s2, root_element(n, ShortDiff(1, 2, False), x, R))

    def targets(self, x: int) -> tuple[SpMatrix, SpMatrix]:
        n, R = self.A.n, self.A.ring
        return (
            root_element(n, TARGET_ROOTS[0](n), -self.c1 * x, R),
            root_element(n, TARGET_ROOTS[1](n), -self.c2 * x, R),
        )


def lemma16_certificates(A: SpMatrix, x: int) -> tuple[ConjWord, ConjWord]:
    """Two words over {A} of length 16 for A in first Hessenberg form.

    They evaluate to I - (a11(b_{n+1,n+1} - b_{n+1,1}) - 1) x (e_{2n,2} + e_{n+2,n})
    and I - x a21 (b_{n+1,n+1} - b_{n+1,1}) (e_{2n,1} + e_{n+1,n}).
    """
    _require_rank(A)
    if not is_first_hessenberg(A):
        raise ValueError("A is not in first Hessenberg form")
    cc = _ColumnCertificates(A)
    return cc.first(x), cc.second(x)


def lemma16_targets(A: SpMatrix, x: int) -> tuple[SpMatrix, SpMatrix]:
    return _ColumnCertificates(A).targets(x)


def mirror_matrix(n: int, ring: Ring) -> SpMatrix:
    """Product of the long-root Weyl elements w_{2e_i}(1), i = 2..n.

    It sends e_i -> -e_{n+i}, e_{n+i} -> e_i for i >= 2 and fixes e_1, e_{n+1},
    so conjugating a matrix in second Hessenberg form by it moves the
    lower-left column entries into rows 2..n of the first column.
    """
    P = identity(n, ring)
    for i in range(2, n + 1):
        P = P @ weyl_root(n, Long(i), 1, ring)
    return P


@dataclass(frozen=True)
class SecondFormCertificates:
    mirror: SpMatrix  # P with Z = P A P^{-1}
    mirrored: SpMatrix  # Z
    first: ConjWord  # over {A}, evaluates to target_first
    second: ConjWord
    target_first: SpMatrix
    target_second: SpMatrix
    generators: tuple[int, int]  # (a11 b - 1, a_{n+2,1} b)


def lemma32_second_form(A: SpMatrix, x: int) -> SecondFormCertificates:
    """Certificates for the ideal (a_{n+2,1} b, a11 b - 1), b = b_{n+1,n+1} - b_{n+1,1}.

    Each is 16 letters over {A}; the ideal they generate lies in eps_s(A, 32).
    """
    _require_rank(A)
    if not is_second_hessenberg(A):
        raise ValueError("A is not in second Hessenberg form")
    n, R = A.n, A.ring
    P = mirror_matrix(n, R)
    Z = A.conj(P)
    cc = _ColumnCertificates(Z)
    back = [single(0, n, R, conj=P)]
    w1, w2 = substitute(cc.first(x), back), substitute(cc.second(x), back)
    t1, t2 = cc.targets(x)
    return SecondFormCertificates(P, Z, w1, w2, t1, t2, (cc.c1, cc.c2))


# ---------------------------------------------------------------------------
# Certified ideals


@dataclass
class CertPart:
    """word(r) is a word over {A} of length <= budget evaluating to eps_PHI(generator * r)."""

    label: str
    generator: int
    budget: int
    word: Callable[[int], ConjWord] = field(repr=False)


@dataclass
class CertifiedIdeal:
    A: SpMatrix
    parts: list[CertPart]
    ledger: list[tuple[str, IdealRep, int]]
    phi: RootIndex = PHI

    @property
    def ideal(self) -> IdealRep:
        return IdealRep.generated_by(self.A.ring, [p.generator for p in self.parts])

    @property
    def budget(self) -> int:
        return sum(p.budget for p in self.parts)

    @property
    def per_generator_budget(self) -> int:
        return self.budget

    def target(self, x: int) -> SpMatrix:
        return root_element(self.A.n, self.phi, x, self.A.ring)

    def certify(self, x: int) -> ConjWord:
        """A word over {A} evaluating to eps_PHI(x), at most `budget` letters."""
        R = self.A.ring
        I = self.ideal
        if not I.contains(x):
            raise ValueError(f"{x} is not in the ideal {I.canonical}")
        words = [empty_word(self.A.n, R, "A")]
        for r, part in zip(I.express(x), self.parts):
            if R.reduce(r):
                words.append(part.word(r))
        w = concat(*words)
        return ConjWord(w.n, w.ring, w.letters, "A")

    def to_json(self):
        return {
            "ideal": self.ideal.to_json(),
            "budget": self.budget,
            "ledger": [{"label": lab, "ideal": I.to_json(), "budget": b} for lab, I, b in self.ledger],
        }


@dataclass(frozen=True)
class _Derived:
    """A matrix Y together with a word over {A} that evaluates to it."""

    Y: SpMatrix
    expansion: ConjWord

    @property
    def cost(self) -> int:
        return len(self.expansion)


def _transported(cert: Callable[[int], ConjWord], src: RootIndex, n: int, ring: Ring, coeff: int):
    """Move a certificate for eps_src(coeff * x) onto PHI; returns (kappa, word(r))."""
    W, s = weyl_transport(n, src, PHI, ring)
    kappa = ring.reduce(s * coeff)

    def word(r: int) -> ConjWord:
        return conjugate_word(cert(r), W)

    return kappa, word


def _parts_from_column(Z: SpMatrix, expansion_Z: ConjWord, label: str) -> list[CertPart]:
    n, R = Z.n, Z.ring
    cc = _ColumnCertificates(Z)
    cost = 16 * len(expansion_Z)
    parts = []
    for name, cert, coeff, root in (
        ("c1", cc.first, -cc.c1, TARGET_ROOTS[0](n)),
        ("c2", cc.second, -cc.c2, TARGET_ROOTS[1](n)),
    ):
        kappa, w = _transported(cert, root, n, R, coeff)

        def word(r, w=w):
            return substitute(w(r), [expansion_Z])

        parts.append(CertPart(f"{label}.{name}", kappa, cost, word))
    return parts


def _first_form_parts(D: _Derived, label: str) -> list[CertPart]:
    H = first_hessenberg(D.Y)
    return _parts_from_column(H.form, conjugate_word(D.expansion, H.conjugator), label)


def _second_form_parts(D: _Derived, label: str) -> list[CertPart]:
    H = second_hessenberg(D.Y)
    P = mirror_matrix(D.Y.n, D.Y.ring)
    Z = H.form.conj(P)
    return _parts_from_column(Z, conjugate_word(D.expansion, P @ H.conjugator), label)


def _make_ideal(A: SpMatrix, parts: list[CertPart], label: str) -> CertifiedIdeal:
    I = IdealRep.generated_by(A.ring, [p.generator for p in parts])
    return CertifiedIdeal(A, parts, [(label, I, sum(p.budget for p in parts))])


def _base(A: SpMatrix) -> _Derived:
    return _Derived(A, single(0, A.n, A.ring))


def first_column_ideal(A: SpMatrix) -> CertifiedIdeal:
    """I_1(A) = I_1^(1)(A) + I_1^(2)(A), every element certified within 64."""
    _require_rank(A)
    D = _base(A)
    p1 = _first_form_parts(D, "I1(1)")
    p2 = _second_form_parts(D, "I1(2)")
    R = A.ring
    return CertifiedIdeal(
        A,
        p1 + p2,
        [
            ("I1(1)", IdealRep.generated_by(R, [p.generator for p in p1]), 32),
            ("I1(2)", IdealRep.generated_by(R, [p.generator for p in p2]), 32),
        ],
    )


def _conj_derived(D: _Derived, M: SpMatrix) -> _Derived:
    return _Derived(D.Y.conj(M), conjugate_word(D.expansion, M))


def _commutator_derived(D: _Derived, M: SpMatrix) -> _Derived:
    return _Derived(commutator(D.Y, M), commutator_with_constant(D.expansion, M))


def _split_specs(A: SpMatrix):
    """Yield (label, stage, builder) for the 7n ideals, in ledger order."""
    n, R = A.n, A.ring
    base = _base(A)
    Jinv = J(n, R).inverse()
    primed = _conj_derived(base, Jinv)  # A' = J^{-1} A J
    ws = {k: weyl_k(n, k, R) for k in range(2, n + 1)}
    w2 = ws[2]
    E = root_element(n, ShortDiff(1, 2), 1, R)  # I + e_12 - e_{n+2,n+1}

    def k_conj(D, k):
        return D if k == 1 else _conj_derived(D, ws[k])

    # I3': first-column ideals of A_k and A'_k
    for k in range(1, n + 1):
        Ak, Apk = k_conj(base, k), k_conj(primed, k)
        yield f"I1(1)(A_{k})", "I3'", lambda D=Ak, k=k: _first_form_parts(D, f"I1(1)(A_{k})"), 32
        yield f"I1(2)(A_{k})", "I3'", lambda D=Ak, k=k: _second_form_parts(D, f"I1(2)(A_{k})"), 32
        yield f"I1(1)(A'_{k})", "I3'", lambda D=Apk, k=k: _first_form_parts(D, f"I1(1)(A'_{k})"), 32
        yield f"I1(2)(A'_{k})", "I3'", lambda D=Apk, k=k: _second_form_parts(D, f"I1(2)(A'_{k})"), 32
    # I4 stage through A'' = (A_k, E) and its w_2-conjugate
    for k in range(1, n + 1):
        Dpp = _commutator_derived(k_conj(base, k), E)
        yield f"I4(1)(A_{k})", "I4", lambda D=Dpp, k=k: _second_form_parts(D, f"I4(1)(A_{k})"), 64
        yield (
            f"I4(2)(A_{k})",
            "I4",
            lambda D=Dpp, k=k: _first_form_parts(_conj_derived(D, w2), f"I4(2)(A_{k})"),
            64,
        )
    for k in range(1, n + 1):
        Dpp = _commutator_derived(k_conj(primed, k), E)
        yield f"I4(1)(A'_{k})", "I4'", lambda D=Dpp, k=k: _second_form_parts(D, f"I4(1)(A'_{k})"), 64


def level_ideal_7n_split(A: SpMatrix) -> list[CertifiedIdeal]:
    """The 7n ideals J_1(A), ..., J_{7n}(A) whose sum is I(A)."""
    _require_rank(A)
    out = []
    for label, _, build, budget in _split_specs(A):
        ci = _make_ideal(A, build(), label)
        assert ci.budget == budget
        out.append(ci)
    return out


STAGE_BUDGETS = {"I3'": 128, "I4": 128, "I4'": 64}  # times n


def level_ideal(A: SpMatrix, short_circuit: bool = True) -> CertifiedIdeal:
    """I(A), with every element certified in at most 320n letters.

    The ledger lists each sub-ideal with its budget. Once the running sum is the
    unit ideal the remaining sub-ideals are not computed.
    """
    _require_rank(A)
    R = A.ring
    parts: list[CertPart] = []
    ledger = []
    running = IdealRep.zero(R)
    for label, _, build, budget in _split_specs(A):
        if short_circuit and running.is_unit_ideal():
            break
        new = build()
        I = IdealRep.generated_by(R, [p.generator for p in new])
        ledger.append((label, I, budget))
        parts.extend(new)
        running = ideal_sum(running, I)
    return CertifiedIdeal(A, parts, ledger)


def stage_totals(ci: CertifiedIdeal, n: int) -> dict[str, int]:
    """Budget actually used per stage of the ledger."""
    stage_of = {}
    for stage, names in (("I3'", ("I1(",)), ("I4", ("I4(1)(A_", "I4(2)(A_")), ("I4'", ("I4(1)(A'_",))):
        for lab, _, _ in ci.ledger:
            if lab.startswith(names):
                stage_of[lab] = stage
    totals = {s: 0 for s in STAGE_BUDGETS}
    for lab, _, b in ci.ledger:
        totals[stage_of[lab]] += b
    return totals


# ---------------------------------------------------------------------------
# Postconditions


def scalar_congruence_failures(A: SpMatrix, I: IdealRep) -> list[str]:
    """Check that A is congruent to lambda I_n (+) lambda^{-1} I_n modulo I."""
    n, R = A.n, A.ring
    bad = []
    for i in range(2 * n):
        for j in range(2 * n):
            if i != j and not I.contains(A.rows[i][j]):
                bad.append(f"off-diagonal ({i + 1},{j + 1}) not in I(A)")
    a11 = A.rows[0][0]
    for i in range(1, n):
        if not I.contains(A.rows[i][i] - a11):
            bad.append(f"a_{i + 1}{i + 1} != a_11 mod I(A)")
        if not I.contains(A.rows[n + i][n + i] - A.rows[n][n]):
            bad.append(f"lower diagonal entry {n + i + 1} != a_(n+1)(n+1) mod I(A)")
    if not I.contains(a11 * A.rows[n][n] - 1):
        bad.append("halves not inverse mod I(A)")
    if not I.contains(a11 * a11 - 1):
        bad.append("a11^2 - 1 not in I(A)")
    return bad


def v_of_level(ci: CertifiedIdeal):
    return v_of_ideal(ci.ideal)


def certify_and_check(ci: CertifiedIdeal, x: int, budget: int | None = None) -> bool:
    w = ci.certify(x)
    b = ci.budget if budget is None else budget
    return len(w) <= b and eval_word(w, [ci.A]) == ci.target(x)
