"""The matrix model of Sp_2n(R).

Matrices are 2n x 2n tuples of ints over a `Ring`, with J = [[0, I], [-I, 0]].
Indices in public helpers are 1-based to match the usual e_{ij} notation;
internally everything is 0-based.

Root system C_n is encoded on vectors in Z^n: short roots +-e_i +- e_j, long
roots +-2e_i. Positive roots are realized by block upper triangular matrices:

    ShortDiff(i,j)+  I + t(e_ij - e_{n+j,n+i})
    ShortSum(i,j)+   I + t(e_{i,n+j} + e_{j,n+i})
    Long(i)+         I + t e_{i,n+i}

and negative roots by transposes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from operator import mul

from .rings import MaxIdeal, Ring, ZZ


def _matmul(A, B, m):
    cols = tuple(zip(*B))
    if m is None:
        return tuple(tuple(sum(map(mul, r, c)) for c in cols) for r in A)
    return tuple(tuple(sum(map(mul, r, c)) % m for c in cols) for r in A)


def _identity_rows(d):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


class NotSymplecticError(ValueError):
    pass


class SpMatrix:
    """An element of Sp_2n over `ring`. Checked on construction unless trusted."""

    __slots__ = ("n", "ring", "rows", "_hash")

    def __init__(self, rows, ring: Ring = ZZ, check: bool = True):
        rows = tuple(tuple(ring.reduce(int(x)) for x in r) for r in rows)
        d = len(rows)
        if d == 0 or d % 2 or any(len(r) != d for r in rows):
            raise ValueError("need a square matrix of even size")
        self.n = d // 2
        self.ring = ring
        self.rows = rows
        self._hash = None
        if check and not _is_symplectic(rows, self.n, ring.modulus):
            raise NotSymplecticError("A^T J A != J")

    @classmethod
    def _trusted(cls, rows, ring: Ring) -> "SpMatrix":
        # rows already reduced and known symplectic (products, inverses, ...)
        obj = cls.__new__(cls)
        obj.n = len(rows) // 2
        obj.ring = ring
        obj.rows = rows
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, n: int, ring: Ring = ZZ) -> "SpMatrix":
        return cls._trusted(_identity_rows(2 * n), ring)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def a(self, i: int, j: int) -> int:
        """1-based entry a_{ij}."""
        return self.rows[i - 1][j - 1]

    def __eq__(self, other):
        return isinstance(other, SpMatrix) and self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.rows))
        return self._hash

    def __repr__(self):
        body = "\n ".join(" ".join(f"{x:>3}" for x in r) for r in self.rows)
        return f"SpMatrix over {self.ring}:\n {body}"

    def _check_compatible(self, other: "SpMatrix"):
        if self.ring != other.ring or self.n != other.n:
            raise ValueError("ring or rank mismatch")

    def __matmul__(self, other: "SpMatrix") -> "SpMatrix":
        self._check_compatible(other)
        return SpMatrix._trusted(_matmul(self.rows, other.rows, self.ring.modulus), self.ring)

    def __mul__(self, other):
        return self.__matmul__(other)

    def inverse(self) -> "SpMatrix":
        """A^{-1} = -J A^T J, i.e. blocks (A4^T, -A2^T; -A3^T, A1^T)."""
        n, R = self.n, self.ring
        T = tuple(zip(*self.rows))
        out = []
        for i in range(2 * n):
            if i < n:
                r = T[n + i]
                out.append(r[n:] + tuple(-x for x in r[:n]))
            else:
                r = T[i - n]
                out.append(tuple(-x for x in r[n:]) + r[:n])
        return SpMatrix._trusted(tuple(tuple(R.reduce(x) for x in r) for r in out), R)

    def transpose(self) -> "SpMatrix":
        return SpMatrix._trusted(tuple(zip(*self.rows)), self.ring)

    @property
    def T(self) -> "SpMatrix":
        return self.transpose()

    def conj(self, M: "SpMatrix") -> "SpMatrix":
        """M self M^{-1}."""
        return M @ self @ M.inverse()

    def is_identity(self) -> bool:
        return self.rows == _identity_rows(2 * self.n)

    def blocks(self) -> "BlockView":
        n = self.n
        r = self.rows
        return BlockView(
            tuple(row[:n] for row in r[:n]),
            tuple(row[n:] for row in r[:n]),
            tuple(row[:n] for row in r[n:]),
            tuple(row[n:] for row in r[n:]),
        )

    def with_ring(self, ring: Ring) -> "SpMatrix":
        """Entrywise image in a quotient ring (reduction is a homomorphism)."""
        return SpMatrix._trusted(tuple(tuple(ring.reduce(x) for x in r) for r in self.rows), ring)

    def to_json(self):
        return {"n": self.n, "ring": self.ring.to_json(), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> "SpMatrix":
        M = cls(obj["rows"], Ring.from_json(obj["ring"]))
        if M.n != obj["n"]:
            raise ValueError("n does not match rows")
        return M


@dataclass(frozen=True)
class BlockView:
    A1: tuple
    A2: tuple
    A3: tuple
    A4: tuple

    def assemble(self, ring: Ring) -> SpMatrix:
        top = [a + b for a, b in zip(self.A1, self.A2)]
        bot = [a + b for a, b in zip(self.A3, self.A4)]
        return SpMatrix(top + bot, ring)


def _is_symplectic(rows, n, m) -> bool:
    # J A: row i -> row n+i, row n+i -> -row i
    JA = tuple(rows[n:]) + tuple(tuple(-x for x in r) for r in rows[:n])
    P = _matmul(tuple(zip(*rows)), JA, m)
    d = 2 * n
    for i in range(d):
        for j in range(d):
            want = 1 if j == i + n else (-1 if i == j + n else 0)
            if m is not None:
                want %= m
            if P[i][j] != want:
                return False
    return True


def is_symplectic(A: SpMatrix) -> bool:
    return _is_symplectic(A.rows, A.n, A.ring.modulus)


def from_entries(n: int, ring: Ring, entries: dict, check: bool = True) -> SpMatrix:
    """I + sum of v * e_{ij} for 1-based (i, j) -> v."""
    d = 2 * n
    rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for (i, j), v in entries.items():
        rows[i - 1][j - 1] += v
    return SpMatrix(rows, ring, check=check)


def identity(n: int, ring: Ring = ZZ) -> SpMatrix:
    return SpMatrix.identity(n, ring)


def J(n: int, ring: Ring = ZZ) -> SpMatrix:
    d = 2 * n
    rows = [[0] * d for _ in range(d)]
    for i in range(n):
        rows[i][n + i] = 1
        rows[n + i][i] = -1
    return SpMatrix(rows, ring)


def gl_block(M, ring: Ring, check: bool = True) -> SpMatrix:
    """diag(M, M^{-T}) for an invertible n x n matrix M given with its inverse.

    `M` is a pair (M, Minv) of n x n integer row tuples.
    """
    G, Ginv = M
    n = len(G)
    d = 2 * n
    rows = [[0] * d for _ in range(d)]
    for i in range(n):
        for j in range(n):
            rows[i][j] = G[i][j]
            rows[n + i][n + j] = Ginv[j][i]
    return SpMatrix(rows, ring, check=check)


# ---------------------------------------------------------------------------
# Roots


@dataclass(frozen=True, order=True)
class RootIndex:
    """kind is 'diff', 'sum' or 'long'; j is 0 for long roots; indices 1-based."""

    kind: str
    i: int
    j: int = 0
    positive: bool = True

    def __post_init__(self):
        if self.kind == "long":
            if self.i < 1 or self.j != 0:
                raise ValueError(f"bad long root {self}")
        elif self.kind in ("diff", "sum"):
            if not 1 <= self.i < self.j:
                raise ValueError(f"bad short root {self}")
        else:
            raise ValueError(f"unknown root kind {self.kind!r}")

    @property
    def is_long(self) -> bool:
        return self.kind == "long"

    def check_rank(self, n: int):
        if max(self.i, self.j) > n:
            raise ValueError(f"{self} invalid for n={n}")

    def negate(self) -> "RootIndex":
        return RootIndex(self.kind, self.i, self.j, not self.positive)

    def vector(self, n: int) -> tuple[int, ...]:
        self.check_rank(n)
        v = [0] * n
        s = 1 if self.positive else -1
        if self.kind == "long":
            v[self.i - 1] = 2 * s
        elif self.kind == "sum":
            v[self.i - 1] = s
            v[self.j - 1] = s
        else:
            v[self.i - 1] = s
            v[self.j - 1] = -s
        return tuple(v)

    @classmethod
    def from_vector(cls, v) -> "RootIndex":
        supp = [(k + 1, x) for k, x in enumerate(v) if x]
        if len(supp) == 1 and abs(supp[0][1]) == 2:
            return cls("long", supp[0][0], 0, supp[0][1] > 0)
        if len(supp) == 2 and all(abs(x) == 1 for _, x in supp):
            (i, a), (j, b) = supp
            if a == b:
                return cls("sum", i, j, a > 0)
            return cls("diff", i, j, a > 0)
        raise ValueError(f"{tuple(v)} is not a root of C_n")

    def to_json(self):
        return {"kind": self.kind, "i": self.i, "j": self.j, "positive": self.positive}

    @classmethod
    def from_json(cls, obj) -> "RootIndex":
        return cls(obj["kind"], int(obj["i"]), int(obj.get("j", 0)), bool(obj["positive"]))

    def __str__(self):
        sign = "+" if self.positive else "-"
        if self.kind == "long":
            return f"{sign}Long({self.i})"
        name = "ShortDiff" if self.kind == "diff" else "ShortSum"
        return f"{sign}{name}({self.i},{self.j})"


def ShortDiff(i, j, positive=True):
    return RootIndex("diff", i, j, positive)


def ShortSum(i, j, positive=True):
    return RootIndex("sum", i, j, positive)


def Long(i, positive=True):
    return RootIndex("long", i, 0, positive)


def all_roots(n: int) -> list[RootIndex]:
    out = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for pos in (True, False):
            out.append(ShortDiff(i, j, pos))
            out.append(ShortSum(i, j, pos))
    for i in range(1, n + 1):
        out.append(Long(i, True))
        out.append(Long(i, False))
    return out


def positive_roots(n: int) -> list[RootIndex]:
    return [r for r in all_roots(n) if r.positive]


def simple_roots(n: int) -> list[RootIndex]:
    """alpha_1, ..., alpha_{n-1}, beta with alpha_i = e_{n-i} - e_{n-i+1}, beta = 2e_n."""
    return [ShortDiff(n - i, n - i + 1) for i in range(1, n)] + [Long(n)]


def root_matrix_entries(n: int, r: RootIndex, t: int) -> dict:
    r.check_rank(n)
    i, j = r.i, r.j
    if r.kind == "long":
        e = {(i, n + i): t}
    elif r.kind == "diff":
        e = {(i, j): t, (n + j, n + i): -t}
    else:
        e = {(i, n + j): t, (j, n + i): t}
    if not r.positive:
        e = {(b, a): v for (a, b), v in e.items()}
    return e


def root_element(n: int, r: RootIndex, t: int, ring: Ring = ZZ) -> SpMatrix:
    d = 2 * n
    rows = [[1 if a == b else 0 for b in range(d)] for a in range(d)]
    for (a, b), v in root_matrix_entries(n, r, int(t)).items():
        rows[a - 1][b - 1] = ring.reduce(rows[a - 1][b - 1] + v)
    return SpMatrix._trusted(tuple(tuple(x) for x in rows), ring)


def root_param(A: SpMatrix, r: RootIndex) -> int | None:
    """If A = eps_r(t) for some t, return t, else None."""
    i, j, n = r.i, r.j, A.n
    if r.kind == "long":
        a, b = (i, n + i)
    elif r.kind == "diff":
        a, b = (i, j)
    else:
        a, b = (i, n + j)
    if not r.positive:
        a, b = b, a
    t = A.a(a, b)
    return t if root_element(n, r, t, A.ring) == A else None


def reflect(alpha: RootIndex, phi: RootIndex, n: int) -> RootIndex:
    """s_alpha(phi) computed on vectors, independently of matrices."""
    a, f = alpha.vector(n), phi.vector(n)
    c = 2 * sum(x * y for x, y in zip(a, f)) // sum(x * x for x in a)
    return RootIndex.from_vector(tuple(y - c * x for x, y in zip(a, f)))


def root_sum(a: RootIndex, b: RootIndex, n: int) -> RootIndex | None:
    v = tuple(x + y for x, y in zip(a.vector(n), b.vector(n)))
    try:
        return RootIndex.from_vector(v)
    except ValueError:
        return None


def weyl_root(n: int, r: RootIndex, t: int = 1, ring: Ring = ZZ) -> SpMatrix:
    """w_r(t) = eps_r(t) eps_{-r}(-t^{-1}) eps_r(t)."""
    ti = ring.inverse(t)
    e = root_element(n, r, t, ring)
    return e @ root_element(n, r.negate(), -ti, ring) @ e


def weyl_k(n: int, k: int, ring: Ring = ZZ) -> SpMatrix:
    """e_{1k} - e_{k1} + e_{n+1,n+k} - e_{n+k,n+1} + the identity elsewhere."""
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in 2..{n}")
    d = 2 * n
    rows = [[0] * d for _ in range(d)]
    moved = {0, k - 1, n, n + k - 1}
    for a in range(d):
        if a not in moved:
            rows[a][a] = 1
    rows[0][k - 1] = 1
    rows[k - 1][0] = -1
    rows[n][n + k - 1] = 1
    rows[n + k - 1][n] = -1
    return SpMatrix(rows, ring)


@lru_cache(maxsize=None)
def _weyl_transport_cached(n: int, src: RootIndex, dst: RootIndex):
    # BFS over words in simple reflections, combinatorially; then read the sign
    # off the matrices over Z.
    simples = simple_roots(n)
    seen = {src: ()}
    queue = [src]
    while queue and dst not in seen:
        nxt = []
        for phi in queue:
            for k, a in enumerate(simples):
                psi = reflect(a, phi, n)
                if psi not in seen:
                    seen[psi] = seen[phi] + (k,)
                    nxt.append(psi)
        queue = nxt
    if dst not in seen:
        raise ValueError(f"{src} and {dst} have different lengths")
    word = seen[dst]
    W = identity(n)
    for k in word:
        W = weyl_root(n, simples[k]) @ W
    image = root_element(n, src, 1).conj(W)
    if image == root_element(n, dst, 1):
        sign = 1
    elif image == root_element(n, dst, -1):
        sign = -1
    else:  # pragma: no cover - would contradict Weyl invariance
        raise AssertionError("Weyl conjugate is not a root element")
    return W.rows, sign


def weyl_transport(n: int, src: RootIndex, dst: RootIndex, ring: Ring = ZZ) -> tuple[SpMatrix, int]:
    """(W, s) with W eps_src(t) W^{-1} = eps_dst(s t) for all t."""
    rows, sign = _weyl_transport_cached(n, src, dst)
    return SpMatrix._trusted(tuple(tuple(ring.reduce(x) for x in r) for r in rows), ring), sign


# ---------------------------------------------------------------------------
# Chevalley commutator relations


def commutator(g: SpMatrix, h: SpMatrix) -> SpMatrix:
    """(g, h) = g h g^{-1} h^{-1}."""
    return g @ h @ g.inverse() @ h.inverse()


@lru_cache(maxsize=None)
def commutator_sign_table(n: int) -> dict:
    """Signs in (eps_psi(b), eps_phi(a)) = prod eps_root(sign * coeff(a, b)).

    Keys are ordered pairs (psi, phi) with psi + phi a root. Values are tuples
    of (root, sign, family) where family names the monomial:
    'ab', '2ab', 'a2b' (a^2 b) or 'ab2' (a b^2). The signs are read off the
    matrices over Z at a = b = 1; relation_check then confirms them for
    arbitrary parameters.
    """
    table = {}
    for psi, phi in itertools.product(all_roots(n), repeat=2):
        s = root_sum(psi, phi, n)
        if s is None:
            continue
        c = commutator(root_element(n, psi, 1), root_element(n, phi, 1))
        if not psi.is_long and not phi.is_long and not s.is_long:
            terms = [(s, "ab")]
        elif not psi.is_long and not phi.is_long:
            terms = [(s, "2ab")]
        elif psi.is_long:
            terms = [(s, "ab"), (root_sum(s, phi, n), "a2b")]
        else:
            terms = [(s, "ab"), (root_sum(s, psi, n), "ab2")]
        found = None
        for signs in itertools.product((1, -1), repeat=len(terms)):
            guess = _expected_product(n, terms, signs, 1, 1, ZZ)
            if guess == c:
                found = signs
                break
        if found is None:  # pragma: no cover
            raise AssertionError(f"no sign choice fits ({psi}, {phi})")
        table[(psi, phi)] = tuple((r, sg, fam) for (r, fam), sg in zip(terms, found))
    return table


def _monomial(fam: str, a: int, b: int) -> int:
    return {"ab": a * b, "2ab": 2 * a * b, "a2b": a * a * b, "ab2": a * b * b}[fam]


def _expected_product(n, terms, signs, a, b, ring):
    M = identity(n, ring)
    for (r, fam), s in zip(terms, signs):
        M = M @ root_element(n, r, s * _monomial(fam, a, b), ring)
    return M


def expected_commutator(n: int, psi: RootIndex, phi: RootIndex, a: int, b: int, ring: Ring) -> SpMatrix:
    """Predicted (eps_psi(b), eps_phi(a)) from the sign table."""
    if root_sum(psi, phi, n) is None:
        return identity(n, ring)
    entry = commutator_sign_table(n)[(psi, phi)]
    return _expected_product(n, [(r, fam) for r, _, fam in entry], [s for _, s, _ in entry], a, b, ring)


def relation_check(n: int, ring: Ring, samples: int = 50, seed: int = 0, roots=None) -> list:
    """Check every commutator relation on random (a, b); returns the failures."""
    rng = random.Random(seed)
    roots = all_roots(n) if roots is None else roots
    failures = []
    for psi, phi in itertools.product(roots, repeat=2):
        if psi == phi.negate():
            continue
        for _ in range(samples):
            a, b = _random_param(rng, ring), _random_param(rng, ring)
            got = commutator(root_element(n, psi, b, ring), root_element(n, phi, a, ring))
            if got != expected_commutator(n, psi, phi, a, b, ring):
                failures.append((psi, phi, a, b))
    return failures


def _random_param(rng: random.Random, ring: Ring) -> int:
    if ring.modulus is None:
        return rng.randint(-50, 50)
    return rng.randrange(ring.modulus)


# ---------------------------------------------------------------------------
# Reduction, centrality, sampling, encoding


def reduce_mod(A: SpMatrix, m: MaxIdeal | int) -> SpMatrix:
    p = m.prime if isinstance(m, MaxIdeal) else int(m)
    if A.ring.modulus is not None and A.ring.modulus % p:
        raise ValueError(f"{p} does not divide {A.ring.modulus}")
    return A.with_ring(Ring(p))


def is_central_mod(A: SpMatrix, m: MaxIdeal | int) -> bool:
    B = reduce_mod(A, m)
    p = B.ring.modulus
    d = B.dim
    minus = tuple(tuple((p - 1) if i == j else 0 for j in range(d)) for i in range(d))
    return B.is_identity() or B.rows == minus


def random_sp(n: int, ring: Ring, word_length: int, seed: int) -> SpMatrix:
    """Product of `word_length` random root elements; deterministic in seed."""
    rng = random.Random(seed)
    roots = all_roots(n)
    A = identity(n, ring)
    for _ in range(word_length):
        r = rng.choice(roots)
        if ring.modulus is None:
            t = rng.choice((-2, -1, 1, 2))
        else:
            t = rng.randrange(ring.modulus)
        A = A @ root_element(n, r, t, ring)
    return A


def entry_width(m: int) -> int:
    """ceil(log2 m) bits per residue."""
    return max(1, (m - 1).bit_length())


def encode_int(A: SpMatrix) -> int:
    m = A.ring.modulus
    if m is None:
        raise ValueError("encoding is defined for Z/m only")
    w = entry_width(m)
    code, shift = 0, 0
    for r in A.rows:
        for x in r:
            code |= x << shift
            shift += w
    return code


def encode(A: SpMatrix) -> bytes:
    """Row-major little-endian packing of residues, ceil(log2 m) bits each."""
    bits = entry_width(A.ring.modulus) * A.dim * A.dim
    return encode_int(A).to_bytes((bits + 7) // 8, "little")


def decode(data: bytes | int, n: int, ring: Ring) -> SpMatrix:
    code = int.from_bytes(data, "little") if isinstance(data, (bytes, bytearray)) else int(data)
    w = entry_width(ring.modulus)
    mask = (1 << w) - 1
    d = 2 * n
    rows = []
    for _ in range(d):
        row = []
        for _ in range(d):
            row.append(code & mask)
            code >>= w
        rows.append(row)
    return SpMatrix(rows, ring)
