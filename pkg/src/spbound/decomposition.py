"""Unipotent decompositions over stable-range-1 rings and the end-to-end word pipeline.

U+ is the group generated by positive root elements: matrices [[U, U S], [0, U^{-T}]]
with U upper unitriangular and S symmetric. U- is its transpose.

The (U+ U-)^2 algorithm works level by level. At level k we use U+ on the left to
make the (k, n+k) entry of the current Levi block a unit, then one negative
long-root element on the right to turn the (k, k) pivot into 1. Once every
pivot is 1 the matrix lies in U- U+, and peeling the levels off gives the
two middle factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rings import Ring, crt, decompose_over_ideals, factorize, IdealRep
from .symplectic import (
    J,
    Long,
    RootIndex,
    ShortDiff,
    ShortSum,
    SpMatrix,
    all_roots,
    commutator_sign_table,
    gl_block,
    identity,
    root_element,
    root_param,
    weyl_transport,
)
from .words import (
    ConjWord,
    Letter,
    RootElem,
    commutator_with_constant,
    concat,
    conjugate_word,
    empty_word,
    eval_word,
    invert_word,
    reindex,
)
from .reduction import PHI, CertifiedIdeal, level_ideal, level_ideal_7n_split, rotation


def is_upper_unipotent(A: SpMatrix) -> bool:
    n, r = A.n, A.rows
    if any(r[n + i][j] for i in range(n) for j in range(n)):
        return False
    return all(r[i][j] == (1 if i == j else 0) for i in range(n) for j in range(i + 1))


def is_lower_unipotent(A: SpMatrix) -> bool:
    return is_upper_unipotent(A.transpose())


def in_c2_corner(A: SpMatrix) -> bool:
    """Identity outside the coordinates n-1, n, 2n-1, 2n."""
    n = A.n
    corner = {n - 2, n - 1, 2 * n - 2, 2 * n - 1}
    d = 2 * n
    return all(
        A.rows[i][j] == (1 if i == j else 0)
        for i in range(d)
        for j in range(d)
        if i not in corner or j not in corner
    )


@dataclass(frozen=True)
class UnipotentFactorization:
    u1p: SpMatrix
    u1m: SpMatrix
    u2p: SpMatrix
    u2m: SpMatrix

    def product(self) -> SpMatrix:
        return self.u1p @ self.u1m @ self.u2p @ self.u2m


def _sr1_shift(a: int, b: int, m: int) -> int:
    """s with gcd(a + s b, m) dividing gcd(a, b, m) up to prime support."""
    primes = sorted(factorize(m))
    res = [1 if a % p == 0 and b % p else 0 for p in primes]
    if not any(res):
        return 0
    return crt(res, primes)


def _peel(W: SpMatrix, k: int):
    """W = L W' U with L in U-, U in U+ and W' trivial on coordinates k, n+k.

    Needs W[k][k] = 1 (1-based) and W trivial on coordinates below k.
    """
    n, R = W.n, W.ring
    left, right = [], []
    for root_of, row in [(lambda j: ShortDiff(k, j, False), lambda j: j)] + [
        (lambda j: ShortSum(k, j, False), lambda j: n + j)
    ]:
        for j in range(k + 1, n + 1):
            s = -W.a(row(j), k)
            if R.reduce(s):
                op = root_element(n, root_of(j), s, R)
                W = op @ W
                left.append((root_of(j), s))
    s = -W.a(n + k, k)
    if R.reduce(s):
        W = root_element(n, Long(k, False), s, R) @ W
        left.append((Long(k, False), s))
    for root_of, col in [(lambda j: ShortDiff(k, j), lambda j: j), (lambda j: ShortSum(k, j), lambda j: n + j)]:
        for j in range(k + 1, n + 1):
            s = -W.a(k, col(j))
            if R.reduce(s):
                W = W @ root_element(n, root_of(j), s, R)
                right.append((root_of(j), s))
    s = -W.a(k, n + k)
    if R.reduce(s):
        W = W @ root_element(n, Long(k), s, R)
        right.append((Long(k), s))
    L = identity(n, R)
    for r, s in left:
        L = L @ root_element(n, r, -s, R)
    U = identity(n, R)
    for r, s in reversed(right):
        U = U @ root_element(n, r, -s, R)
    return L, W, U


def _levi_part(M: SpMatrix, k: int) -> SpMatrix:
    W = M
    for j in range(1, k):
        _, W, _ = _peel(W, j)
    return W


def unipotent_decompose_sr1(A: SpMatrix) -> UnipotentFactorization:
    """A = u1p u1m u2p u2m with u*p in U+ and u*m in U-, over Z/m."""
    m = A.ring.modulus
    if m is None:
        raise ValueError("needs a ring of stable range 1 (Z/m)")
    n, R = A.n, A.ring
    one = identity(n, R)
    if is_upper_unipotent(A):
        return UnipotentFactorization(A, one, one, one)
    if is_lower_unipotent(A):
        return UnipotentFactorization(one, A, one, one)
    P = identity(n, R)  # left factor in U+
    Q = identity(n, R)  # right factor in U-
    M = A
    for k in range(1, n + 1):
        W = _levi_part(M, k)
        rows = [j for j in range(k + 1, n + 1)] + [n + k] + [n + j for j in range(k + 1, n + 1)]
        for _ in range(4 * n + 4):
            if R.is_unit(W.a(k, n + k)):
                break
            for i in rows:
                s = _sr1_shift(W.a(k, n + k), W.a(i, n + k), m)
                if not s:
                    continue
                if i == n + k:
                    op = root_element(n, Long(k), s, R)
                elif i <= n:
                    op = root_element(n, ShortDiff(k, i), s, R)
                else:
                    op = root_element(n, ShortSum(k, i - n), s, R)
                M, P, W = op @ M, op @ P, op @ W
        else:
            raise ArithmeticError("could not make the pivot column a unit")
        s = R.reduce((1 - W.a(k, k)) * R.inverse(W.a(k, n + k)))
        op = root_element(n, Long(k, False), s, R)
        M, Q = M @ op, Q @ op
    Ls, Us = [], []
    W = M
    for k in range(1, n + 1):
        if W.a(k, k) != 1:
            raise ArithmeticError(f"pivot {k} is not 1 after normalization")
        L, W, U = _peel(W, k)
        Ls.append(L)
        Us.append(U)
    if not W.is_identity():
        raise ArithmeticError("peeling did not reach the identity")
    Lm, Um = identity(n, R), identity(n, R)
    for L in Ls:
        Lm = Lm @ L
    for U in reversed(Us):
        Um = Um @ U
    F = UnipotentFactorization(P.inverse(), Lm, Um, Q.inverse())
    if F.product() != A:
        raise ArithmeticError("factorization does not reproduce A")
    for X, up in ((F.u1p, True), (F.u1m, False), (F.u2p, True), (F.u2m, False)):
        if not (is_upper_unipotent(X) if up else is_lower_unipotent(X)):
            raise ArithmeticError("factor outside U+/U-")
    return F


# ---------------------------------------------------------------------------
# Reduction to the C2 corner


def compress(vec, ring: Ring):
    """(H, Hinv, g) with H in SL over the ring and H vec = (g, 0, ..., 0)."""
    k = len(vec)
    H = [[int(i == j) for j in range(k)] for i in range(k)]
    Hi = [[int(i == j) for j in range(k)] for i in range(k)]
    v = [ring.reduce(x) for x in vec]
    for i in range(1, k):
        rot = rotation(v[0], v[i], ring)
        if rot is None:
            continue
        u, vv, x, y = rot
        v[0], v[i] = ring.reduce(u * v[0] + vv * v[i]), ring.reduce(x * v[0] + y * v[i])
        H[0], H[i] = (
            [ring.reduce(u * a + vv * b) for a, b in zip(H[0], H[i])],
            [ring.reduce(x * a + y * b) for a, b in zip(H[0], H[i])],
        )
        # Hi <- Hi * rot^{-1}, rot^{-1} = [[y, -vv], [-x, u]] on columns 0, i
        for row in Hi:
            a, b = row[0], row[i]
            row[0], row[i] = ring.reduce(a * y - b * x), ring.reduce(-a * vv + b * u)
    return H, Hi, v[0]


def _levi_conjugator(n: int, k: int, G, Ginv, ring: Ring) -> SpMatrix:
    """diag(I_k (+) G, I_k (+) G^{-T}) with G acting on coordinates k+1..n."""
    size = n - k
    full = [[int(i == j) for j in range(n)] for i in range(n)]
    fullinv = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(size):
        for j in range(size):
            full[k + i][k + j] = G[i][j]
            fullinv[k + i][k + j] = Ginv[i][j]
    return gl_block((tuple(map(tuple, full)), tuple(map(tuple, fullinv))), ring)


def _tr(M):
    return [list(r) for r in zip(*M)]


def unipotent_reduce_to_c2(u: SpMatrix) -> tuple[SpMatrix, ConjWord]:
    """(u', w) with u' in the C2 corner of U+ and eval(w) = u'^{-1} u, |w| <= 3(n-2)."""
    if not is_upper_unipotent(u):
        raise ValueError("u is not upper unipotent")
    n, R = u.n, u.ring
    cur = u
    pieces = []  # per level: the EL_Q letters of S^{-1} T^{-1}
    for k in range(1, n - 1):
        letters = []
        # T clears row k in columns k+1..n; one conjugate of a root element
        tau = [R.reduce(-cur.a(k, j)) for j in range(k + 1, n + 1)]
        T = identity(n, R)
        for j, t in zip(range(k + 1, n + 1), tau):
            T = T @ root_element(n, ShortDiff(k, j), t, R)
        if any(tau):
            H, Hi, g = compress(tau, R)
            C = _levi_conjugator(n, k, _tr(H), _tr(Hi), R)
            core = T.conj(C.inverse())
            if core != root_element(n, ShortDiff(k, k + 1), g, R):
                raise ArithmeticError("T compression failed")
            t_letters = [Letter(C, RootElem(ShortDiff(k, k + 1), g), -1)]
        else:
            t_letters = []
        B = cur @ T
        # S clears row k in columns n+k..2n; two conjugates of root elements
        b1 = R.reduce(-B.a(k, n + k))
        sig = [R.reduce(-B.a(k, n + j)) for j in range(k + 1, n + 1)]
        S = root_element(n, Long(k), b1, R)
        for j, s in zip(range(k + 1, n + 1), sig):
            S = S @ root_element(n, ShortSum(k, j), s, R)
        s_letters = []
        if any(sig) or b1:
            H, Hi, g = compress(sig, R)
            C = _levi_conjugator(n, k, Hi, H, R)
            core = S.conj(C.inverse())
            if core != root_element(n, Long(k), b1, R) @ root_element(n, ShortSum(k, k + 1), g, R):
                raise ArithmeticError("S compression failed")
            if g:
                s_letters.append(Letter(C, RootElem(ShortSum(k, k + 1), g), -1))
            if b1:
                s_letters.append(Letter(C, RootElem(Long(k), b1), -1))
        cur = B @ S
        letters = s_letters + t_letters
        pieces.append(letters)
    out = []
    for letters in reversed(pieces):
        out.extend(letters)
    w = ConjWord(n, R, tuple(out))
    if not in_c2_corner(cur):
        raise ArithmeticError("remainder is not in the C2 corner")
    return cur, w


def corner_word(V: SpMatrix) -> ConjWord:
    """At most four root elements whose product is V in the C2 corner of U+."""
    n, R = V.n, V.ring
    a, b = n - 1, n
    x = V.a(a, b)
    V2 = V @ root_element(n, ShortDiff(a, b), -x, R)
    terms = [
        (Long(a), V2.a(a, n + a)),
        (ShortSum(a, b), V2.a(a, n + b)),
        (Long(b), V2.a(b, n + b)),
        (ShortDiff(a, b), x),
    ]
    letters = tuple(Letter(None, RootElem(r, t), 1) for r, t in terms if R.reduce(t))
    w = ConjWord(n, R, letters)
    if eval_word(w) != V:
        raise ArithmeticError("corner decomposition failed")
    return w


def upper_word(V: SpMatrix) -> ConjWord:
    """EL_Q word for V in U+, at most 3(n-2) + 4 = 3n-2 letters."""
    Vc, w = unipotent_reduce_to_c2(V)
    return concat(corner_word(Vc), w)


def lower_word(L: SpMatrix) -> ConjWord:
    """EL_Q word for L in U-, through J^{-1} L J in U+."""
    n, R = L.n, L.ring
    Jm = J(n, R)
    return conjugate_word(upper_word(L.conj(Jm.inverse())), Jm)


@dataclass(frozen=True)
class ElqFactorization:
    word: ConjWord
    budget: int


def factor_elq(A: SpMatrix) -> ElqFactorization:
    """A = (u1m)^{u1p} (u1p u2p) u2m, each piece an EL_Q word of at most 3n-2 letters."""
    n, R = A.n, A.ring
    budget = 9 * n - 6
    if A.is_identity():
        return ElqFactorization(empty_word(n, R), budget)
    for r in all_roots(n):
        t = root_param(A, r)
        if t is not None:
            return ElqFactorization(ConjWord(n, R, (Letter(None, RootElem(r, t), 1),)), budget)
    F = unipotent_decompose_sr1(A)
    w = concat(conjugate_word(lower_word(F.u1m), F.u1p), upper_word(F.u1p @ F.u2p), lower_word(F.u2m))
    if len(w) > budget or eval_word(w) != A:
        raise ArithmeticError("EL_Q factorization failed its own check")
    return ElqFactorization(w, budget)


# ---------------------------------------------------------------------------
# Short roots from a normally generating set, and the full pipeline


class RootCertifier:
    """Words over S for arbitrary root elements.

    Short roots cost at most 64 min(q, 5nk): with the q route one sub-ideal per
    maximal ideal, with the 5nk route the level ideals of every member of S.
    Long roots cost three times as much.
    """

    def __init__(self, S: list[SpMatrix], route: str | None = None, splits=None, level=None):
        if not S:
            raise ValueError("S is empty")
        n, R = S[0].n, S[0].ring
        if R.modulus is None:
            raise ValueError("needs Z/m")
        if n < 3:
            raise ValueError("needs n >= 3")
        self.S, self.n, self.ring = list(S), n, R
        q = len(factorize(R.modulus))
        k = len(S)
        self.q, self.k = q, k
        if route is None:
            route = "q" if q <= 5 * n * k else "5nk"
        self.route = route
        self.short_budget = 64 * (q if route == "q" else 5 * n * k)
        self.chosen: list[tuple[int, CertifiedIdeal]] = []
        if route == "q":
            splits = splits if splits is not None else [level_ideal_7n_split(A) for A in S]
            for p in sorted(factorize(R.modulus)):
                pick = next(
                    ((i, ci) for i, sp in enumerate(splits) for ci in sp if ci.ideal.canonical % p),
                    None,
                )
                if pick is None:
                    raise ValueError(f"S reduces to the center modulo {p}")
                if all(pick[1] is not c for _, c in self.chosen):
                    self.chosen.append(pick)
        else:
            level = level if level is not None else [level_ideal(A) for A in S]
            self.chosen = list(enumerate(level))
        total = sum(ci.budget for _, ci in self.chosen)
        if total > self.short_budget:
            raise AssertionError("ledger exceeds the short-root budget")
        self.ideals = [ci.ideal for _, ci in self.chosen]
        if IdealRep.generated_by(R, [I.canonical for I in self.ideals]).canonical != 1:
            raise ValueError("the chosen ideals do not generate the ring")
        self._long_signs = self._long_root_signs()

    def short(self, x: int) -> ConjWord:
        """Word over S evaluating to eps_PHI(x)."""
        n, R = self.n, self.ring
        words = [empty_word(n, R, "S")]
        for idx, xi in decompose_over_ideals(x, self.ideals):
            i, ci = self.chosen[idx]
            words.append(reindex(ci.certify(xi), [i], "S"))
        return concat(*words)

    def _long_root_signs(self):
        # (eps_a(1), eps_b(y)) = eps_{a+b}(s1 y) eps_{2a+b}(s2 y)
        n = self.n
        a, b = ShortDiff(n - 1, n), Long(n)
        (ab, s1, _), (l, s2, _) = commutator_sign_table(n)[(a, b)]
        assert ab == ShortSum(n - 1, n) and l == Long(n - 1)
        return s1, s2

    def root(self, psi: RootIndex, x: int) -> ConjWord:
        n, R = self.n, self.ring
        x = R.reduce(x)
        if x == 0:
            return empty_word(n, R, "S")
        if not psi.is_long:
            W, s = weyl_transport(n, PHI, psi, R)
            return conjugate_word(self.short(s * x), W)
        # eps_{2a+b}(s2 y) = eps_{a+b}(-s1 y) (eps_a(1), eps_b(y)) with a = ShortDiff(n-1, n), b = Long(n)
        W, s = weyl_transport(n, Long(n - 1), psi, R)
        s1, s2 = self._long_signs
        y = s2 * s * x
        comm = commutator_with_constant(self.root(ShortDiff(n - 1, n), 1), root_element(n, Long(n), y, R))
        fix = self.root(ShortSum(n - 1, n), -s1 * y)
        return conjugate_word(concat(fix, comm), W)

    def root_budget(self, psi: RootIndex) -> int:
        return self.short_budget * (3 if psi.is_long else 1)


@dataclass
class PipelineResult:
    word: ConjWord
    bound: int
    q: int
    k: int
    n: int
    route: str

    def report(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "n": self.n,
            "route": self.route,
            "bound": self.bound,
            "actual_length": len(self.word),
        }


def pipeline_bound(n: int, q: int, k: int) -> int:
    return 576 * (3 * n - 2) * min(q, 5 * n * k)


def theorem_b1_pipeline(
    A: SpMatrix,
    S: list[SpMatrix],
    level: list[CertifiedIdeal] | None = None,
    certifier: RootCertifier | None = None,
) -> PipelineResult:
    """Word over conjugates of S^{+-1} evaluating to A, within 576(3n-2) min(q, 5nk).

    `level` optionally supplies the level ideals of the members of S, used when
    the 5nk route is the cheaper one.
    """
    from .bounds import pi_of_set

    n, R = A.n, A.ring
    if n < 3:
        raise ValueError("needs n >= 3")
    if not pi_of_set(S).is_empty():
        raise ValueError("S does not normally generate (Pi(S) is not empty)")
    cert = certifier or RootCertifier(S, level=level)
    F = factor_elq(A)
    parts = [empty_word(n, R, "S")]
    for L in F.word.letters:
        w = cert.root(L.base.root, L.base.t)
        if L.exp == -1:
            w = invert_word(w)
        if L.conj is not None:
            w = conjugate_word(w, L.conj)
        parts.append(w)
    word = concat(*parts)
    bound = pipeline_bound(n, cert.q, cert.k)
    if len(word) > (9 * n - 6) * 3 * cert.short_budget or len(word) > bound:
        raise AssertionError("pipeline word exceeds its budget")
    return PipelineResult(word, bound, cert.q, cert.k, n, cert.route)
