"""Normal generation via Pi(S), fixed spaces over finite fields, and lower-bound sets.

Over a field K every product of fewer than 2n symplectic transvections fixes a
nonzero vector, since each transvection fixes a hyperplane. An element with no
eigenvalue 1 is therefore at least 2n transvections away from the identity.
The CRT construction spreads this over k residue fields.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .rings import ZZ, MaxIdealSet, Ring, crt, egcd, factorize, is_prime
from .symplectic import (
    Long,
    RootIndex,
    SpMatrix,
    all_roots,
    gl_block,
    is_central_mod,
    root_element,
    root_matrix_entries,
)


def _entry_gcd(rows, shift: int) -> int:
    g = 0
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            g = egcd(g, x - (shift if i == j else 0))[0]
    return g


def pi_of_element(A: SpMatrix) -> MaxIdealSet:
    R = A.ring
    if R.modulus is not None:
        return MaxIdealSet.of(p for p in factorize(R.modulus) if is_central_mod(A, p))
    out = MaxIdealSet.of(())
    for shift in (1, -1):
        g = _entry_gcd(A.rows, shift)
        out = out.union(MaxIdealSet.all() if g == 0 else MaxIdealSet.of(factorize(g)))
    return out


def pi_of_set(S) -> MaxIdealSet:
    """Maximal ideals modulo which every member of S is central (+-I)."""
    out = MaxIdealSet.all()
    for A in S:
        out = out.intersect(pi_of_element(A))
    return out


def normally_generates(S) -> bool:
    S = list(S)
    if not S:
        return False
    if S[0].n < 3:
        raise ValueError("the Pi criterion needs n >= 3; use search.normal_closure_is_whole_group")
    return pi_of_set(S).is_empty()


# ---------------------------------------------------------------------------
# Linear algebra over F_p


def rank_mod_p(rows, p: int) -> int:
    M = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def inverse_mod_p(rows, p: int):
    d = len(rows)
    M = [[x % p for x in r] + [int(i == j) for j in range(d)] for i, r in enumerate(rows)]
    for c in range(d):
        piv = next((i for i in range(c, d) if M[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, p)
        M[c] = [x * inv % p for x in M[c]]
        for i in range(d):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[c])]
    return [r[d:] for r in M]


def _require_prime(A: SpMatrix) -> int:
    p = A.ring.modulus
    if p is None or not is_prime(p):
        raise ValueError("fixed spaces are computed over prime fields only")
    return p


def fixed_space_dim(A: SpMatrix) -> int:
    """dim ker(A - I) over F_p."""
    p = _require_prime(A)
    d = A.dim
    shifted = [[x - (1 if i == j else 0) for j, x in enumerate(r)] for i, r in enumerate(A.rows)]
    return d - rank_mod_p(shifted, p)


def batch_rank_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of square matrices (B, d, d) over F_p."""
    M = np.array(M, dtype=np.int64) % p
    B, d, _ = M.shape
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    rank = np.zeros(B, dtype=np.int64)
    idx = np.arange(B)
    rows = np.arange(d)
    for c in range(d):
        eligible = (M[:, :, c] != 0) & (rows[None, :] >= rank[:, None])
        has = eligible.any(axis=1)
        piv = np.argmax(eligible, axis=1)
        b = idx[has]
        if b.size == 0:
            continue
        r, pv = rank[has], piv[has]
        top, other = M[b, r].copy(), M[b, pv].copy()
        M[b, r], M[b, pv] = other, top
        M[b, r] = (M[b, r] * inv[M[b, r, c]][:, None]) % p
        f = M[b, :, c].copy()
        f[np.arange(b.size), r] = 0
        M[b] = (M[b] - f[:, :, None] * M[b, r][:, None, :]) % p
        rank[has] += 1
    return rank


def batch_fixed_space_dim(M: np.ndarray, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    d = M.shape[-1]
    return d - batch_rank_mod_p(M - np.eye(d, dtype=np.int64), p)


def _nilpotents(n: int) -> tuple[list[RootIndex], np.ndarray]:
    roots = all_roots(n)
    N = np.zeros((len(roots), 2 * n, 2 * n), dtype=np.int64)
    for k, r in enumerate(roots):
        for (i, j), v in root_matrix_entries(n, r, 1).items():
            N[k, i - 1, j - 1] = v
    return roots, N


def batch_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    return np.matmul(A, B) % p


def random_sp_batch(n: int, p: int, count: int, rng: np.random.Generator, length: int = 24) -> np.ndarray:
    """Products of `length` random root elements, as a (count, 2n, 2n) array."""
    _, N = _nilpotents(n)
    d = 2 * n
    out = np.broadcast_to(np.eye(d, dtype=np.int64), (count, d, d)).copy()
    for _ in range(length):
        k = rng.integers(len(N), size=count)
        t = rng.integers(p, size=count)
        step = np.eye(d, dtype=np.int64)[None] + t[:, None, None] * N[k]
        out = batch_matmul(out, step, p)
    return out


def batch_inverse_sp(A: np.ndarray, n: int, p: int) -> np.ndarray:
    """A^{-1} = -J A^T J for symplectic A."""
    Jm = np.zeros((2 * n, 2 * n), dtype=np.int64)
    Jm[:n, n:] = np.eye(n, dtype=np.int64)
    Jm[n:, :n] = -np.eye(n, dtype=np.int64)
    return (-(Jm @ np.swapaxes(A, -1, -2) @ Jm)) % p


class ConjugatorPool:
    """A fixed pool of random group elements with their inverses; draws are indices."""

    def __init__(self, n: int, p: int, rng: np.random.Generator, size: int = 2048):
        self.p = p
        self.g = random_sp_batch(n, p, size, rng)
        self.ginv = batch_inverse_sp(self.g, n, p)

    def conjugate(self, base: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        k = rng.integers(len(self.g), size=len(base))
        return batch_matmul(batch_matmul(self.g[k], base, self.p), self.ginv[k], self.p)


def random_transvection_products(
    n: int, p: int, count: int, factors, rng: np.random.Generator, pool: ConjugatorPool | None = None
) -> np.ndarray:
    """Products of `factors[b]` random conjugates of long root elements (+-1)."""
    d = 2 * n
    E = np.eye(d, dtype=np.int64)
    E[0, n] = 1
    Einv = np.eye(d, dtype=np.int64)
    Einv[0, n] = p - 1
    factors = np.asarray(factors)
    pool = pool or ConjugatorPool(n, p, rng)
    out = np.broadcast_to(np.eye(d, dtype=np.int64), (count, d, d)).copy()
    for step in range(int(factors.max(initial=0))):
        base = np.where(rng.integers(2, size=count)[:, None, None] == 1, E, Einv)
        conj = pool.conjugate(base, rng)
        active = (factors > step)[:, None, None]
        out = np.where(active, batch_matmul(out, conj, p), out)
    return out


def fixed_space_law_violations(n: int, p: int, pairs: int, seed: int = 0) -> dict[str, int]:
    """Check the intersection bound on products and conjugation invariance."""
    rng = np.random.default_rng(seed)
    d = 2 * n
    f1 = rng.integers(0, d + 1, size=pairs)
    f2 = rng.integers(0, d + 1, size=pairs)
    pool = ConjugatorPool(n, p, rng)
    l1 = random_transvection_products(n, p, pairs, f1, rng, pool)
    l2 = random_transvection_products(n, p, pairs, f2, rng, pool)
    d1, d2 = batch_fixed_space_dim(l1, p), batch_fixed_space_dim(l2, p)
    d12 = batch_fixed_space_dim(batch_matmul(l1, l2, p), p)
    g = random_sp_batch(n, p, pairs, rng)
    dconj = batch_fixed_space_dim(batch_matmul(batch_matmul(g, l1, p), batch_inverse_sp(g, n, p), p), p)
    return {
        "product": int(np.sum(d12 < d1 + d2 - d)),
        "conjugation": int(np.sum(dconj != d1)),
        "transvection_count": int(np.sum(d1 < d - f1)),
    }


# ---------------------------------------------------------------------------
# Witnesses and the CRT construction


def companion(coeffs: list[int], p: int):
    """Companion matrix of x^n + c_{n-1} x^{n-1} + ... + c_0, coeffs = [c_0, ..., c_{n-1}]."""
    n = len(coeffs)
    B = [[0] * n for _ in range(n)]
    for i in range(1, n):
        B[i][i - 1] = 1
    for i in range(n):
        B[i][n - 1] = (-coeffs[i]) % p
    return B


def no_eigenvalue_one_witness(n: int, p: int) -> SpMatrix:
    """diag(B, B^{-T}) with B in SL_n(F_p) a companion matrix, and det(A - I) != 0."""
    if n < 2:
        raise ValueError("SL_1 has no element without eigenvalue 1")
    c0 = (-1) ** n % p  # det of the companion matrix is (-1)^n c_0
    for rest in itertools.product(range(p), repeat=n - 1):
        coeffs = [c0, *rest]
        if (1 + sum(coeffs)) % p == 0:  # f(1) = 0 means eigenvalue 1
            continue
        B = companion(coeffs, p)
        Binv = inverse_mod_p(B, p)
        A = gl_block((B, Binv), Ring(p))
        if fixed_space_dim(A) == 0:
            return A
    raise ArithmeticError(f"no witness found for n={n}, p={p}")


@dataclass
class LowerBoundCertificate:
    set: list[SpMatrix]
    ring: Ring
    k: int
    claimed_bound: int
    xs: list[int]
    root: RootIndex
    factor_data: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "ring": self.ring.to_json(),
            "k": self.k,
            "n": self.set[0].n if self.set else None,
            "root": self.root.to_json(),
            "xs": self.xs,
            "claimed_bound": self.claimed_bound,
            "set": [A.to_json() for A in self.set],
            "factor_data": self.factor_data,
        }


def crt_xs(primes: list[int], k: int) -> list[int]:
    """x_j = 1 mod p_j, 0 mod p_i for i != j <= k, 1 mod p_i for i > k."""
    out = []
    for j in range(k):
        res = [1 if (i == j or i >= k) else 0 for i in range(len(primes))]
        out.append(crt(res, primes))
    return out


def crt_generating_set(
    ring: Ring,
    k: int,
    root: RootIndex | None = None,
    n: int = 3,
    s_integers: list[int] | None = None,
) -> LowerBoundCertificate:
    """k root elements whose conjugation diameter is at least 2nk.

    With `s_integers` (a list of k primes) the ring is Z and x_i is the product
    of all the primes except p_i.
    """
    root = root or Long(1)
    if not root.is_long:
        raise ValueError("the construction uses a long root")
    if s_integers is not None:
        ps = [int(p) for p in s_integers]
        if len(ps) != k or not all(is_prime(p) for p in ps) or len(set(ps)) != k:
            raise ValueError("need k distinct primes")
        xs = []
        for i in range(k):
            x = 1
            for l, p in enumerate(ps):
                if l != i:
                    x *= p
            xs.append(x)
        S = [root_element(n, root, x, ZZ) for x in xs]
        data = [{"prime": p, "image_nontrivial": [j for j, x in enumerate(xs) if x % p]} for p in ps]
        return LowerBoundCertificate(S, ZZ, k, 2 * n * k, xs, root, data)
    if ring.modulus is None:
        raise ValueError("use s_integers over Z")
    primes = sorted(factorize(ring.modulus))
    if k > len(primes):
        raise ValueError(f"k = {k} exceeds the number of maximal ideals ({len(primes)})")
    if k < 1:
        raise ValueError("k must be positive")
    xs = crt_xs(primes, k) if all(e == 1 for e in factorize(ring.modulus).values()) else _crt_xs_general(ring.modulus, primes, k)
    S = [root_element(n, root, x, ring) for x in xs]
    data = []
    for i, p in enumerate(primes):
        nontrivial = [j for j, x in enumerate(xs) if x % p]
        data.append(
            {
                "prime": p,
                "field": f"F_{p}",
                "image_nontrivial": nontrivial,
                "image_generator": root_element(n, root, 1, Ring(p)).to_json() if nontrivial else None,
                "per_factor_bound": 2 * n if i < k else None,
            }
        )
    return LowerBoundCertificate(S, ring, k, 2 * n * k, xs, root, data)


def _crt_xs_general(m: int, primes: list[int], k: int) -> list[int]:
    # prime powers: solve modulo each p^e so reductions mod p follow the pattern
    f = factorize(m)
    mods = [p ** f[p] for p in primes]
    return [crt([1 if (i == j or i >= k) else 0 for i in range(len(primes))], mods) for j in range(k)]


def check_x_pattern(cert: LowerBoundCertificate) -> list[str]:
    bad = []
    if cert.ring.modulus is None:
        return bad
    primes = sorted(factorize(cert.ring.modulus))
    for j, x in enumerate(cert.xs):
        for i, p in enumerate(primes):
            want = 1 if (i == j or i >= cert.k) else 0
            if x % p != want:
                bad.append(f"x_{j + 1} mod {p} = {x % p}, expected {want}")
    return bad


def crt_sampling_failures(cert: LowerBoundCertificate, samples: int, seed: int = 0) -> int:
    """Random words of 2nk-1 conjugates of S^{+-1}; count those with no fixed vector in any factor."""
    n, k = cert.set[0].n, cert.k
    length = 2 * n * k - 1
    rng = np.random.default_rng(seed)
    which = rng.integers(k, size=(samples, length))
    found = np.zeros(samples, dtype=bool)
    primes = sorted(factorize(cert.ring.modulus))
    d = 2 * n
    for p in primes:
        gens = np.stack([np.array(A.with_ring(Ring(p)).rows, dtype=np.int64) for A in cert.set])
        ginv = batch_inverse_sp(gens, n, p)
        pool = ConjugatorPool(n, p, rng)
        out = np.broadcast_to(np.eye(d, dtype=np.int64), (samples, d, d)).copy()
        for step in range(length):
            sign = rng.integers(2, size=samples)[:, None, None] == 1
            base = np.where(sign, gens[which[:, step]], ginv[which[:, step]])
            out = batch_matmul(out, pool.conjugate(base, rng), p)
        found |= batch_fixed_space_dim(out, p) >= 1
    return int(np.sum(~found))
