"""Finite abelian groups Z_{m_1} x ... x Z_{m_r}.

Elements (and characters, which are identified with elements) are plain
tuples of residues. Linear indices use little-endian mixed radix:
coordinate 0 varies fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError

MAX_ORDER = 2**40

Element = tuple


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple
    exponent: int = field(init=False, compare=False)
    order: int = field(init=False, compare=False)

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise PreconditionError("a group needs at least one modulus")
        if any(m < 2 for m in moduli):
            raise PreconditionError(f"moduli must be >= 2, got {list(moduli)}")
        order = math.prod(moduli)
        if order > MAX_ORDER:
            raise PreconditionError(f"group order {order} exceeds 2^40")
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "exponent", reduce(math.lcm, moduli))
        object.__setattr__(self, "order", order)

    @property
    def r(self) -> int:
        return len(self.moduli)

    def __repr__(self):
        return f"GroupSpec({list(self.moduli)})"

    def check(self, x: Sequence[int]) -> Element:
        if len(x) != self.r:
            raise PreconditionError(f"element {tuple(x)} has wrong length for {self}")
        for xi, m in zip(x, self.moduli):
            if not 0 <= xi < m:
                raise PreconditionError(f"coordinate {xi} out of range [0, {m})")
        return tuple(int(v) for v in x)

    def reduce(self, x: Sequence[int]) -> Element:
        return tuple(int(v) % m for v, m in zip(x, self.moduli))

    @property
    def zero(self) -> Element:
        return (0,) * self.r

    def add(self, x, y) -> Element:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def sub(self, x, y) -> Element:
        return tuple((a - b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x) -> Element:
        return tuple((-a) % m for a, m in zip(x, self.moduli))

    def elements(self) -> list:
        """All elements in index order."""
        return [tuple(reversed(x)) for x in product(*(range(m) for m in reversed(self.moduli)))]

    def coords_array(self) -> np.ndarray:
        """(order, r) int64 array; row k holds element_of(k)."""
        idx = np.arange(self.order, dtype=np.int64)
        out = np.empty((self.order, self.r), dtype=np.int64)
        for i, m in enumerate(self.moduli):
            out[:, i] = idx % m
            idx //= m
        return out

    def weights(self) -> np.ndarray:
        w = [1]
        for m in self.moduli[:-1]:
            w.append(w[-1] * m)
        return np.array(w, dtype=np.int64)

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli)}

    @classmethod
    def from_json(cls, obj: dict) -> "GroupSpec":
        return cls(tuple(obj["moduli"]))


def index_of(spec: GroupSpec, x: Sequence[int]) -> int:
    x = spec.check(x)
    idx = 0
    for xi, m in zip(reversed(x), reversed(spec.moduli)):
        idx = idx * m + xi
    return idx


def element_of(spec: GroupSpec, idx: int) -> Element:
    if not 0 <= idx < spec.order:
        raise PreconditionError(f"index {idx} out of range [0, {spec.order})")
    out = []
    for m in spec.moduli:
        idx, rem = divmod(idx, m)
        out.append(rem)
    return tuple(out)


@dataclass(frozen=True)
class PointSet:
    spec: GroupSpec
    kind: str
    elements: tuple

    def __post_init__(self):
        if not self.elements or any(v != 0 for v in self.elements[0]):
            raise PreconditionError("point set must start with the zero element")
        if len(set(self.elements)) != len(self.elements):
            raise PreconditionError("point set contains duplicates")
        object.__setattr__(self, "_members", frozenset(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return tuple(x) in self._members

    def indices(self) -> list:
        return [index_of(self.spec, x) for x in self.elements]

    def to_json(self) -> list:
        return [list(x) for x in self.elements]


POINT_SET_KINDS = ("hypercube", "pm_cube", "full", "custom")


def point_set(spec: GroupSpec, kind: str, custom: Iterable | None = None) -> PointSet:
    """Build B with the zero element first and the rest in index order."""
    if kind == "hypercube":
        pts = [tuple(reversed(x)) for x in product((0, 1), repeat=spec.r)]
    elif kind == "pm_cube":
        if any(m < 3 for m in spec.moduli):
            raise PreconditionError("pm_cube needs every modulus >= 3 (1 and -1 collide mod 2)")
        pts = [spec.reduce(tuple(reversed(x))) for x in product((0, 1, -1), repeat=spec.r)]
    elif kind == "full":
        pts = spec.elements()
    elif kind == "custom":
        if custom is None:
            raise PreconditionError("custom point set needs explicit elements")
        pts = list(dict.fromkeys(spec.check(tuple(x)) for x in custom))
        if spec.zero not in pts:
            raise PreconditionError("custom point set must contain 0")
    else:
        raise PreconditionError(f"unknown point set kind {kind!r}")
    pts = sorted(set(pts), key=lambda x: index_of(spec, x))
    return PointSet(spec, kind, tuple(pts))


def _check_same(spec: GroupSpec, *sets):
    for s in sets:
        for x in s:
            spec.check(x)


def sumset(spec: GroupSpec, A: Iterable, B: Iterable) -> set:
    A, B = list(A), list(B)
    _check_same(spec, A, B)
    return {spec.add(a, b) for a in A for b in B}


def difference_set(spec: GroupSpec, D: Iterable) -> set:
    D = list(D)
    _check_same(spec, D)
    return {spec.sub(a, b) for a in D for b in D}


# --- Chinese remainder isomorphism Z_m -> prod Z_{p_i} -------------------


def factorize(n: int) -> dict:
    """Prime factorization by trial division; n is small here."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(m: int) -> bool:
    return m >= 1 and all(k == 1 for k in factorize(m).values())


@dataclass(frozen=True)
class CRTSplit:
    m: int
    primes: tuple
    spec: GroupSpec
    # idempotent basis: a = sum coords[i] * basis[i] mod m
    basis: tuple

    def map(self, a: int) -> Element:
        return tuple(a % p for p in self.primes)

    def unmap(self, coords: Sequence[int]) -> int:
        return sum(c * b for c, b in zip(coords, self.basis)) % self.m


def crt_split(m: int) -> CRTSplit:
    if m < 2 or not is_squarefree(m):
        raise PreconditionError(f"{m} is not a squarefree integer >= 2")
    primes = tuple(sorted(factorize(m)))
    return CRTSplit(m, primes, GroupSpec(primes), _crt_basis(primes))


def _crt_basis(moduli) -> tuple:
    M = math.prod(moduli)
    return tuple((M // p) * pow(M // p, -1, p) % M for p in moduli)


def crt_map(m: int, a: int) -> Element:
    return crt_split(m).map(a)


def crt_unmap(spec: GroupSpec, coords: Sequence[int]) -> int:
    if len(set(spec.moduli)) != spec.r:
        raise PreconditionError("crt_unmap needs distinct moduli")
    for i, p in enumerate(spec.moduli):
        for q in spec.moduli[i + 1:]:
            if math.gcd(p, q) != 1:
                raise PreconditionError("crt_unmap needs pairwise coprime moduli")
    coords = spec.check(coords)
    return sum(c * b for c, b in zip(coords, _crt_basis(spec.moduli))) % spec.order
