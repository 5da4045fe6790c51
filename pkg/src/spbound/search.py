"""Breadth-first search in small symplectic groups over prime fields.

Elements are packed into int64 codes (row-major, ceil(log2 p) bits per entry,
the same layout as `symplectic.encode_int`). Right multiplication by a fixed
matrix g acts on each row independently, so it is a lookup in a table from
row codes to row codes. A BFS layer is then a handful of vectorized shifts and
gathers, and the visited set is a sorted array.

Groups too large to enumerate are handled by a randomized stabilizer chain
for the action on vectors, which certifies "whole group" by reaching the
known order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .rings import Ring, is_prime
from .symplectic import SpMatrix, decode, encode_int, entry_width, identity, root_element, simple_roots

ENUMERATION_LIMIT = 2_000_000


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WORKER_COUNT", "1")))
    except ValueError:
        return 1


def sp_order(n: int, q: int) -> int:
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


@dataclass(frozen=True)
class GroupSpec:
    n: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError("search works over prime fields")

    @classmethod
    def parse(cls, name: str) -> "GroupSpec":
        """'sp4f2' -> Sp_4(F_2)."""
        s = name.lower()
        if not s.startswith("sp") or "f" not in s:
            raise ValueError(f"bad group name {name!r}")
        dim, p = s[2:].split("f")
        if int(dim) % 2:
            raise ValueError("dimension must be even")
        return cls(int(dim) // 2, int(p))

    @property
    def name(self) -> str:
        return f"sp{2 * self.n}f{self.p}"

    @property
    def ring(self) -> Ring:
        return Ring(self.p)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def order(self) -> int:
        return sp_order(self.n, self.p)

    @property
    def enumerable(self) -> bool:
        return self.order <= ENUMERATION_LIMIT and self.width * self.dim * self.dim <= 63

    @property
    def width(self) -> int:
        return entry_width(self.p)

    def generators(self) -> list[SpMatrix]:
        """Simple root elements with parameter +-1; they generate the group over F_p."""
        R = self.ring
        return [root_element(self.n, r, t, R) for r in simple_roots(self.n) for t in (1, -1)] + [
            root_element(self.n, r.negate(), t, R) for r in simple_roots(self.n) for t in (1, -1)
        ]


# ---------------------------------------------------------------------------
# Codes


class Codec:
    def __init__(self, group: GroupSpec):
        self.group = group
        d, w = group.dim, group.width
        if w * d * d > 63:
            raise ValueError(f"{group.name} does not fit into 64-bit codes")
        self.d, self.w = d, w
        self.row_bits = w * d
        self.row_mask = (1 << self.row_bits) - 1
        self.shifts = np.arange(d, dtype=np.int64) * w
        # every row code, decoded once
        codes = np.arange(1 << self.row_bits, dtype=np.int64)
        self.all_rows = (codes[:, None] >> self.shifts[None, :]) & ((1 << w) - 1)

    def encode(self, A: SpMatrix) -> int:
        return encode_int(A)

    def decode(self, code: int) -> SpMatrix:
        return decode(int(code), self.group.n, self.group.ring)

    def to_arrays(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        d, w = self.d, self.w
        flat = (codes[:, None] >> (np.arange(d * d, dtype=np.int64) * w)[None, :]) & ((1 << w) - 1)
        return flat.reshape(-1, d, d)

    def from_arrays(self, M: np.ndarray) -> np.ndarray:
        d, w = self.d, self.w
        flat = np.asarray(M, dtype=np.int64).reshape(-1, d * d)
        return np.bitwise_or.reduce(flat << (np.arange(d * d, dtype=np.int64) * w)[None, :], axis=1)

    def right_table(self, g: SpMatrix) -> np.ndarray:
        """row code -> code of row * g."""
        G = np.array(g.rows, dtype=np.int64)
        prod = (self.all_rows @ G) % self.group.p
        return np.bitwise_or.reduce(prod << self.shifts[None, :], axis=1)

    def mul_right(self, codes: np.ndarray, table: np.ndarray) -> np.ndarray:
        out = np.zeros_like(codes)
        for i in range(self.d):
            sh = i * self.row_bits
            out |= table[(codes >> sh) & self.row_mask] << sh
        return out


def _expand(codec: Codec, frontier: np.ndarray, tables: list[np.ndarray], workers: int) -> np.ndarray:
    """Unique codes of frontier * g over all tables; independent of the worker count."""

    def run(chunk):
        parts = [np.unique(codec.mul_right(frontier, t)) for t in chunk]
        return np.unique(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)

    if workers <= 1 or len(tables) < 2:
        return run(tables)
    shards = [tables[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(run, shards))
    return np.unique(np.concatenate(results))


def _new_only(candidates: np.ndarray, visited: np.ndarray) -> np.ndarray:
    if visited.size == 0:
        return candidates
    pos = np.searchsorted(visited, candidates)
    pos[pos == visited.size] = 0
    return candidates[visited[pos] != candidates]


def orbit_codes(codec: Codec, start: np.ndarray, tables: list[np.ndarray], workers: int = 1) -> np.ndarray:
    """Closure of `start` under right multiplication by the tables' matrices."""
    visited = np.unique(np.asarray(start, dtype=np.int64))
    frontier = visited
    while frontier.size:
        cand = _expand(codec, frontier, tables, workers)
        frontier = _new_only(cand, visited)
        visited = np.union1d(visited, frontier)
    return visited


# ---------------------------------------------------------------------------
# Conjugacy closure and balls


def _conjugate_codes(codec: Codec, codes: np.ndarray, x: SpMatrix) -> np.ndarray:
    p = codec.group.p
    X = np.array(x.rows, dtype=np.int64)
    Xi = np.array(x.inverse().rows, dtype=np.int64)
    M = codec.to_arrays(codes)
    return codec.from_arrays((X @ M % p) @ Xi % p)


def conjugacy_closure(S, group: GroupSpec, cutoff: int = ENUMERATION_LIMIT) -> list[SpMatrix]:
    """{g s^{+-1} g^{-1}} for s in S and g in the group, deduplicated."""
    codec = Codec(group)
    R = group.ring
    seeds = []
    for s in S:
        s = s.with_ring(R)
        seeds += [codec.encode(s), codec.encode(s.inverse())]
    visited = np.unique(np.array(seeds, dtype=np.int64))
    frontier = visited
    gens = group.generators()
    while frontier.size:
        cand = np.unique(np.concatenate([_conjugate_codes(codec, frontier, x) for x in gens]))
        frontier = _new_only(cand, visited)
        visited = np.union1d(visited, frontier)
        if visited.size > cutoff:
            raise OverflowError(f"conjugacy closure exceeds {cutoff} elements")
    return [codec.decode(c) for c in visited]


@dataclass
class BallReport:
    group: str
    radii: list[tuple[int, int]]
    diameter: int | None  # None: the search stopped before covering the group
    generator_count: int
    order: int
    layers: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def complete(self) -> bool:
        return self.diameter is not None

    def ball_size(self, r: int) -> int:
        return dict(self.radii)[r]

    def ball(self, r: int) -> np.ndarray:
        return np.unique(np.concatenate(self.layers[: r + 1]))

    def distance(self, code: int) -> int | None:
        for r, layer in enumerate(self.layers):
            i = np.searchsorted(layer, code)
            if i < layer.size and layer[i] == code:
                return r
        return None

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "group": self.group,
            "order": self.order,
            "generator_count": self.generator_count,
            "radii": [[r, s] for r, s in self.radii],
            "diameter": self.diameter if self.diameter is not None else "exceeds cutoff",
        }

    def to_csv(self) -> str:
        lines = ["schema_version,radius,ball_size", *(f"1,{r},{s}" for r, s in self.radii)]
        return "\n".join(lines) + "\n"


def bfs_balls(
    S,
    group: GroupSpec,
    cutoff: int | None = None,
    workers: int | None = None,
    closed: bool = False,
) -> BallReport:
    """Ball sizes for the conjugation word norm of S, up to radius `cutoff`.

    With closed=True, S is taken as already conjugation-closed and symmetric.
    """
    codec = Codec(group)
    workers = worker_count() if workers is None else workers
    C = list(S) if closed else conjugacy_closure(S, group)
    tables = [codec.right_table(c.with_ring(group.ring)) for c in C]
    start = np.array([codec.encode(identity(group.n, group.ring))], dtype=np.int64)
    visited = start
    layers = [start]
    radii = [(0, 1)]
    frontier = start
    r = 0
    while True:
        if cutoff is not None and r >= cutoff:
            return BallReport(group.name, radii, None, len(C), group.order, layers)
        cand = _expand(codec, frontier, tables, workers)
        frontier = _new_only(cand, visited)
        if frontier.size == 0:
            return BallReport(group.name, radii, r, len(C), group.order, layers)
        r += 1
        visited = np.union1d(visited, frontier)
        layers.append(frontier)
        radii.append((r, int(visited.size)))


# ---------------------------------------------------------------------------
# Normal closures


def _is_central(A: SpMatrix) -> bool:
    p, d = A.ring.modulus, A.dim
    return A.is_identity() or all(A.rows[i][j] == ((p - 1) if i == j else 0) for i in range(d) for j in range(d))


def normal_closure_bfs(S, group: GroupSpec, workers: int = 1) -> int:
    """Order of the normal closure of S, by repeated enumeration."""
    codec = Codec(group)
    R = group.ring
    gens = [s.with_ring(R) for s in S]
    xs = group.generators()
    ident = np.array([codec.encode(identity(group.n, R))], dtype=np.int64)
    while True:
        tables = [codec.right_table(g) for g in gens] + [codec.right_table(g.inverse()) for g in gens]
        N = orbit_codes(codec, ident, tables, workers)
        added = False
        for x in xs:
            for g in list(gens):
                c = g.conj(x)
                code = codec.encode(c)
                i = np.searchsorted(N, code)
                if i >= N.size or N[i] != code:
                    gens.append(c)
                    added = True
                    break
            if added:
                break
        if not added:
            return int(N.size)


class StabilizerChain:
    """Randomized Schreier-Sims for matrices acting on row vectors.

    The base is the standard basis, so the product of the basic orbit sizes
    of any partial chain is a lower bound on the order of the group. Points are
    vectors coded base p; each generator is stored with its permutation of all
    p^{2n} points, and orbits are Schreier trees.
    """

    def __init__(self, group: GroupSpec):
        self.group = group
        p, d = group.p, group.dim
        self.p, self.d = p, d
        self.weights = p ** np.arange(d, dtype=np.int64)
        codes = np.arange(p**d, dtype=np.int64)
        self.points = (codes[:, None] // self.weights[None, :]) % p
        self.base = [int(self.weights[i]) for i in range(d)]
        self.gens: list[list[tuple]] = [[] for _ in range(d)]
        self.parent: list[np.ndarray] = []
        self.via: list[np.ndarray] = []
        self.sizes = [1] * d
        for b in self.base:
            par = np.full(p**d, -1, dtype=np.int64)
            par[b] = b
            self.parent.append(par)
            self.via.append(np.full(p**d, -1, dtype=np.int64))

    def _perm(self, g: np.ndarray) -> np.ndarray:
        return ((self.points @ g) % self.p) @ self.weights

    def _image(self, pt: int, g: np.ndarray) -> int:
        return int(((self.points[pt] @ g) % self.p) @ self.weights)

    def order_bound(self) -> int:
        out = 1
        for s in self.sizes:
            out *= s
        return out

    def sift(self, g: np.ndarray):
        for i, b in enumerate(self.base):
            pt = self._image(b, g)
            par, via = self.parent[i], self.via[i]
            if par[pt] < 0:
                return i, g
            while pt != b:
                g = (g @ self.gens[i][via[pt]][1]) % self.p
                pt = int(par[pt])
        return None

    def _rebuild(self, i: int):
        par, via = self.parent[i], self.via[i]
        frontier = np.flatnonzero(par >= 0)
        while frontier.size:
            nxt = []
            for k, (_, _, perm) in enumerate(self.gens[i]):
                img = perm[frontier]
                fresh = par[img] < 0
                img, src = img[fresh], frontier[fresh]
                img, first = np.unique(img, return_index=True)
                par[img] = src[first]
                via[img] = k
                nxt.append(img)
            frontier = np.concatenate(nxt) if nxt else np.empty(0, dtype=np.int64)
        self.sizes[i] = int(np.count_nonzero(par >= 0))

    def add(self, level: int, h: np.ndarray):
        entry = (h, _inverse_sp(h, self.group.n, self.p), self._perm(h))
        for j in range(level + 1):
            self.gens[j].append(entry)
            self._rebuild(j)


def _inverse_sp(A: np.ndarray, n: int, p: int) -> np.ndarray:
    Jm = np.zeros((2 * n, 2 * n), dtype=np.int64)
    Jm[:n, n:] = np.eye(n, dtype=np.int64)
    Jm[n:, :n] = -np.eye(n, dtype=np.int64)
    return (-(Jm @ A.T @ Jm)) % p


@dataclass
class ClosureResult:
    whole_group: bool
    order_lower_bound: int
    group_order: int
    method: str
    exact: bool


def normal_closure_chain(S, group: GroupSpec, seed: int = 0, patience: int = 40, max_rounds: int = 5000) -> ClosureResult:
    """Grow a stabilizer chain from random elements of the normal closure of S."""
    rng = np.random.default_rng(seed)
    p, n = group.p, group.n
    R = group.ring
    S = [np.array(s.with_ring(R).rows, dtype=np.int64) for s in S]
    S += [_inverse_sp(s, n, p) for s in S]
    xs = [np.array(x.rows, dtype=np.int64) for x in group.generators()]
    chain = StabilizerChain(group)
    target = group.order
    quiet = 0
    g = np.eye(group.dim, dtype=np.int64)
    for _ in range(max_rounds):
        # a random walk on the group supplies conjugators
        for _ in range(8):
            g = (g @ xs[rng.integers(len(xs))]) % p
        h = np.eye(group.dim, dtype=np.int64)
        for _ in range(int(rng.integers(1, 4))):
            s = S[rng.integers(len(S))]
            h = (h @ g @ s @ _inverse_sp(g, n, p)) % p
            for _ in range(3):
                g = (g @ xs[rng.integers(len(xs))]) % p
        res = chain.sift(h)
        if res is None:
            quiet += 1
            if quiet >= patience:
                break
            continue
        quiet = 0
        chain.add(*res)
        if chain.order_bound() == target:
            return ClosureResult(True, target, target, "stabilizer-chain", True)
    bound = chain.order_bound()
    return ClosureResult(bound == target, bound, target, "stabilizer-chain", bound == target)


def normal_closure_is_whole_group(S, group: GroupSpec, method: str = "auto", seed: int = 0) -> bool:
    return normal_closure(S, group, method, seed).whole_group


def normal_closure(S, group: GroupSpec, method: str = "auto", seed: int = 0) -> ClosureResult:
    """Whether the normal closure of S is the whole group.

    Central S closes to at most the center. 'bfs' enumerates; 'chain' uses the
    stabilizer chain, which proves True by reaching the group order; 'auto'
    tries the chain and falls back to enumeration when it stalls below the
    order on an enumerable group.
    """
    R = group.ring
    S = [s.with_ring(R) for s in S]
    order = group.order
    if method not in ("auto", "bfs", "chain"):
        raise ValueError(f"unknown method {method!r}")
    if method == "bfs":
        if not group.enumerable:
            raise OverflowError(f"{group.name} is too large to enumerate")
        size = normal_closure_bfs(S, group)
        return ClosureResult(size == order, size, order, "bfs", True)
    if all(_is_central(s) for s in S):
        size = len({encode_int(s) for s in S} | {encode_int(identity(group.n, R))})
        size = 2 if size > 1 else 1
        return ClosureResult(False, size, order, "center", True)
    res = normal_closure_chain(S, group, seed)
    if res.whole_group or method == "chain" or not group.enumerable:
        return res
    size = normal_closure_bfs(S, group)
    return ClosureResult(size == order, size, order, "bfs", True)
