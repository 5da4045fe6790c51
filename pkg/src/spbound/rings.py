"""Exact arithmetic over Z and Z/m, principal ideals and maximal ideals.

Ring elements travel through the rest of the package as plain Python ints
(canonical residues in [0, m) for Z/m); `RingElem` exists for callers that
want the value and its ring bundled together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid over Z: returns (g, u, v) with u*a + v*b = g >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -a, -u0, -v0
    return a, u0, v0


def factorize(m: int) -> dict[int, int]:
    """Trial division. Inputs are small."""
    out: dict[int, int] = {}
    m = abs(m)
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def is_prime(p: int) -> bool:
    return p >= 2 and factorize(p) == {p: 1}


def crt(residues: list[int], moduli: list[int]) -> int:
    """Solve x = r_i mod m_i for pairwise coprime moduli; result in [0, prod)."""
    x, M = 0, 1
    for r, m in zip(residues, moduli):
        g, u, _ = egcd(M, m)
        if g != 1:
            raise ValueError("moduli not coprime")
        # x + M*t = r mod m  =>  t = (r - x) * M^{-1} mod m
        t = ((r - x) * u) % m
        x += M * t
        M *= m
    return x % M


@dataclass(frozen=True)
class Ring:
    """Either Z (modulus None) or Z/m with m >= 2."""

    modulus: int | None = None

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    @classmethod
    def integers(cls) -> "Ring":
        return cls(None)

    @classmethod
    def mod(cls, m: int) -> "Ring":
        return cls(int(m))

    @property
    def is_integers(self) -> bool:
        return self.modulus is None

    @property
    def is_field(self) -> bool:
        return self.modulus is not None and is_prime(self.modulus)

    def __repr__(self):
        return "Z" if self.modulus is None else f"Z/{self.modulus}"

    # -- element arithmetic on plain ints --

    def reduce(self, x: int) -> int:
        return x if self.modulus is None else x % self.modulus

    def elem(self, x: int) -> "RingElem":
        return RingElem(self.reduce(x), self)

    def is_unit(self, x: int) -> bool:
        if self.modulus is None:
            return x in (1, -1)
        return egcd(x % self.modulus, self.modulus)[0] == 1

    def inverse(self, x: int) -> int:
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in {self}")
        if self.modulus is None:
            return x
        return pow(x, -1, self.modulus)

    def canonical(self, x: int) -> int:
        """Smallest nonnegative generator of the principal ideal (x)."""
        if self.modulus is None:
            return abs(x)
        g = egcd(x % self.modulus, self.modulus)[0]
        return 0 if g == self.modulus else g

    def gcd_bezout(self, a: int, b: int) -> tuple[int, int, int]:
        """(g, u, v) with u*a + v*b = g and g the canonical generator of (a, b)."""
        if self.modulus is None:
            return egcd(a, b)
        m = self.modulus
        d0, u0, v0 = egcd(a % m, b % m)
        g, s, _ = egcd(d0, m)
        if g == m:
            return 0, 1, 0
        return g, (s * u0) % m, (s * v0) % m

    def divides(self, d: int, x: int) -> bool:
        """x in (d)."""
        c = self.canonical(d)
        if c == 0:
            return self.reduce(x) == 0
        return self.reduce(x) % c == 0

    def exact_div(self, a: int, t: int) -> int:
        """Some q with q*t = a in the ring. Raises if t does not divide a."""
        if self.modulus is None:
            if t == 0:
                if a == 0:
                    return 0
                raise ZeroDivisionError("division by zero")
            q, r = divmod(a, t)
            if r:
                raise ArithmeticError(f"{t} does not divide {a}")
            return q
        m = self.modulus
        a, t = a % m, t % m
        d = egcd(t, m)[0]
        if a % d:
            raise ArithmeticError(f"{t} does not divide {a} in {self}")
        mm = m // d
        if mm == 1:
            return 0
        return ((a // d) * pow((t // d) % mm, -1, mm)) % mm

    def maximal_ideals(self) -> list["MaxIdeal"]:
        if self.modulus is None:
            raise ValueError("Z has infinitely many maximal ideals")
        return [MaxIdeal(p) for p in sorted(factorize(self.modulus))]

    def residue_field(self, p: int) -> "Ring":
        return Ring(p)

    def to_json(self):
        if self.modulus is None:
            return {"kind": "Integers"}
        return {"kind": "IntegersMod", "m": self.modulus}

    @classmethod
    def from_json(cls, obj) -> "Ring":
        if obj["kind"] == "Integers":
            return cls(None)
        return cls(int(obj["m"]))


ZZ = Ring(None)


@dataclass(frozen=True)
class RingElem:
    value: int
    ring: Ring

    def __post_init__(self):
        m = self.ring.modulus
        if m is not None and not 0 <= self.value < m:
            raise ValueError("residue out of canonical range")

    def _other(self, o) -> int:
        if isinstance(o, RingElem):
            if o.ring != self.ring:
                raise ValueError("ring mismatch")
            return o.value
        return int(o)

    def __add__(self, o):
        return self.ring.elem(self.value + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return self.ring.elem(self.value - self._other(o))

    def __rsub__(self, o):
        return self.ring.elem(self._other(o) - self.value)

    def __mul__(self, o):
        return self.ring.elem(self.value * self._other(o))

    __rmul__ = __mul__

    def __neg__(self):
        return self.ring.elem(-self.value)

    def __int__(self):
        return self.value


def gcd_bezout(a: RingElem, b: RingElem) -> tuple[RingElem, RingElem, RingElem]:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    R = a.ring
    g, u, v = R.gcd_bezout(a.value, b.value)
    return R.elem(g), R.elem(u), R.elem(v)


@dataclass(frozen=True, order=True)
class MaxIdeal:
    prime: int

    def __post_init__(self):
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")


@dataclass(frozen=True)
class MaxIdealSet:
    """Either every maximal ideal (`everything=True`) or a finite set of primes."""

    primes: frozenset = frozenset()
    everything: bool = False

    @classmethod
    def all(cls) -> "MaxIdealSet":
        return cls(frozenset(), True)

    @classmethod
    def of(cls, primes) -> "MaxIdealSet":
        return cls(frozenset(int(p) for p in primes), False)

    def intersect(self, other: "MaxIdealSet") -> "MaxIdealSet":
        if self.everything:
            return other
        if other.everything:
            return self
        return MaxIdealSet.of(self.primes & other.primes)

    def union(self, other: "MaxIdealSet") -> "MaxIdealSet":
        if self.everything or other.everything:
            return MaxIdealSet.all()
        return MaxIdealSet.of(self.primes | other.primes)

    def issubset(self, other: "MaxIdealSet") -> bool:
        if other.everything:
            return True
        if self.everything:
            return False
        return self.primes <= other.primes

    def is_empty(self) -> bool:
        return not self.everything and not self.primes

    def __contains__(self, p) -> bool:
        p = p.prime if isinstance(p, MaxIdeal) else p
        return self.everything or p in self.primes

    def to_json(self):
        if self.everything:
            return "All"
        return sorted(self.primes)

    def __repr__(self):
        return "All" if self.everything else "{" + ", ".join(map(str, sorted(self.primes))) + "}"


@dataclass(frozen=True)
class IdealRep:
    """A finitely generated ideal with its canonical principal generator.

    `coeffs` are Bezout witnesses: sum(c * g for c, g in zip(coeffs, generators))
    equals `canonical` in the ring.
    """

    ring: Ring
    generators: tuple[int, ...]
    canonical: int
    coeffs: tuple[int, ...] = field(repr=False)

    @classmethod
    def generated_by(cls, ring: Ring, generators) -> "IdealRep":
        gens = tuple(ring.reduce(int(g)) for g in generators)
        g, coeffs = 0, []
        for x in gens:
            g2, u, v = ring.gcd_bezout(g, x)
            coeffs = [ring.reduce(c * u) for c in coeffs] + [ring.reduce(v)]
            g = g2
        return cls(ring, gens, g, tuple(coeffs))

    @classmethod
    def zero(cls, ring: Ring) -> "IdealRep":
        return cls(ring, (), 0, ())

    def contains(self, x: int) -> bool:
        return self.ring.divides(self.canonical, x)

    def is_unit_ideal(self) -> bool:
        return self.canonical == 1

    def express(self, x: int) -> tuple[int, ...]:
        """Coefficients r_i with sum r_i * generators[i] = x."""
        q = self.ring.exact_div(self.ring.reduce(x), self.canonical)
        return tuple(self.ring.reduce(q * c) for c in self.coeffs)

    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "generators": list(self.generators),
            "canonical": self.canonical,
        }


def ideal_sum(I: IdealRep, J: IdealRep) -> IdealRep:
    if I.ring != J.ring:
        raise ValueError("ring mismatch")
    R = I.ring
    g, u, v = R.gcd_bezout(I.canonical, J.canonical)
    coeffs = tuple(R.reduce(u * c) for c in I.coeffs) + tuple(R.reduce(v * c) for c in J.coeffs)
    return IdealRep(R, I.generators + J.generators, g, coeffs)


def v_of_ideal(I: IdealRep) -> MaxIdealSet:
    R = I.ring
    c = I.canonical
    if R.is_integers:
        if c == 0:
            return MaxIdealSet.all()
        return MaxIdealSet.of(factorize(c))
    return MaxIdealSet.of(p for p in factorize(R.modulus) if c % p == 0)


def maximal_ideals(ring: Ring) -> list[MaxIdeal]:
    return ring.maximal_ideals()


def decompose_over_ideals(x: int, ideals: list[IdealRep]) -> list[tuple[int, int]]:
    """Split x into parts x_i in ideals[i] with sum x_i = x. Zero parts are dropped."""
    if not ideals:
        if x:
            raise ValueError("x is not in the zero ideal")
        return []
    R = ideals[0].ring
    x = R.reduce(x)
    if x == 0:
        return []
    canon = IdealRep.generated_by(R, [I.canonical for I in ideals])
    if not canon.contains(x):
        raise ValueError(f"{x} is not in the sum of the ideals")
    parts = []
    for i, (r, I) in enumerate(zip(canon.express(x), ideals)):
        xi = R.reduce(r * I.canonical)
        if xi:
            parts.append((i, xi))
    return parts


def sum_ideals(ring: Ring, ideals) -> IdealRep:
    return reduce(ideal_sum, ideals, IdealRep.zero(ring))
