"""Explicit hypercube-delta constructions and closed-form lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional, Sequence

from .errors import PreconditionError
from .fields import Field, is_prime
from .fourier import DenseFunction, Spectrum, spectrum_mul
from .groups import GroupSpec


def expand_roots(F: Field, roots) -> list:
    """Coefficients (low degree first) of prod_i (z - roots[i])."""
    coeffs = [F.one]
    for rt in roots:
        nr = F.neg(rt)
        out = [F.zero] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            out[k + 1] = F.add(out[k + 1], c)
            out[k] = F.add(out[k], F.mul(c, nr))
        coeffs = out
    return coeffs


def _linear_form_spectrum(spec: GroupSpec, F: Field, weights: dict, d: int, coeffs) -> Spectrum:
    """Spectrum of x -> sum_k coeffs[k] * omega_d^(k * sum_j weights[j] x_j).

    ``weights`` maps coordinate -> integer weight so that omega_d^(w x_j)
    is a character of Z_{m_j} (d must divide w * m_j).
    """
    out = {}
    for k, c in enumerate(coeffs):
        a = [0] * spec.r
        for j, w in weights.items():
            m = spec.moduli[j]
            a[j] = (k * w * (m // d)) % m
        a = tuple(a)
        out[a] = F.add(out.get(a, F.zero), c)
    return Spectrum(spec, F, out)


def _block_factor(spec: GroupSpec, F: Field, block: Sequence[int]) -> Spectrum:
    """Normalised prod_{i=1..|A|} (omega_d^(sum_A x) - omega_d^i) for d = gcd of block moduli."""
    d = reduce(math.gcd, (spec.moduli[j] for j in block))
    size = len(block)
    if d <= size:
        raise PreconditionError(
            f"block {list(block)} has size {size} but its moduli only share the factor {d}")
    w = F.root_of_unity(d)
    roots = [F.power(w, i) for i in range(1, size + 1)]
    coeffs = expand_roots(F, roots)
    at_zero = F.sum(coeffs)
    scale = F.inv(at_zero)
    coeffs = [F.mul(c, scale) for c in coeffs]
    return _linear_form_spectrum(spec, F, {j: 1 for j in block}, d, coeffs)


def _check_partition(r: int, blocks) -> list:
    blocks = [tuple(int(j) for j in b) for b in blocks]
    flat = sorted(j for b in blocks for j in b)
    if flat != list(range(r)) or any(not b for b in blocks):
        raise PreconditionError(f"blocks {blocks} do not partition coordinates 0..{r - 1}")
    return blocks


def block_delta(spec: GroupSpec, blocks, F: Field) -> Spectrum:
    """Product of one single-block delta per block; works for mixed moduli."""
    F.check_group(spec)
    blocks = _check_partition(spec.r, blocks)
    out = None
    for b in blocks:
        part = _block_factor(spec, F, b)
        out = part if out is None else spectrum_mul(out, part)
    return out


def single_block(m: int, r: int, F: Field) -> Spectrum:
    if m <= r:
        raise PreconditionError(f"single block needs m > r (got m={m}, r={r})")
    return block_delta(GroupSpec((m,) * r), [range(r)], F)


def partitioned(m: int, r: int, blocks, F: Field) -> Spectrum:
    blocks = _check_partition(r, blocks)
    for b in blocks:
        if len(b) >= m:
            raise PreconditionError(f"block {list(b)} has size {len(b)} >= m={m}")
    return block_delta(GroupSpec((m,) * r), blocks, F)


def consecutive_blocks(sizes: Sequence[int]) -> list:
    out, start = [], 0
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def aux_g(spec: GroupSpec, F: Field):
    """The auxiliary g = prod_i h_i(x_i), supported on the hypercube.

    Returns (dense g, its spectrum); the spectrum is built from the
    polynomial expansion, the dense values by direct evaluation.
    """
    F.check_group(spec)
    factors = []
    dense_factors = []
    for i, m in enumerate(spec.moduli):
        w = F.root_of_unity(m)
        roots = [F.power(w, j) for j in range(2, m)]
        coeffs = [F.zero] + expand_roots(F, roots)  # times z
        factors.append(_linear_form_spectrum(spec, F, {i: 1}, m, coeffs))
        vals = []
        for x in range(m):
            wx = F.power(w, x)
            h = wx
            for rt in roots:
                h = F.mul(h, F.sub(wx, rt))
            vals.append(h)
        dense_factors.append(vals)
    spec_g = reduce(spectrum_mul, factors)
    values = []
    for x in spec.elements():
        v = F.one
        for i, xi in enumerate(x):
            v = F.mul(v, dense_factors[i][xi])
        values.append(v)
    return DenseFunction(spec, F, values), spec_g


# --- lower bounds --------------------------------------------------------


@lru_cache(maxsize=None)
def covering_recursion(moduli: tuple) -> int:
    """Best lower bound on F(moduli) from peeling one modulus at a time.

    F(empty) = 1 and F(S) >= ceil(m/(m-1) * F(S - m)); maximised over the
    choice of m at each step (moduli is a sorted tuple).
    """
    if not moduli:
        return 1
    best = 0
    for i, m in enumerate(moduli):
        if i and moduli[i - 1] == m:
            continue
        rest = moduli[:i] + moduli[i + 1:]
        sub = covering_recursion(rest)
        best = max(best, -(-m * sub // (m - 1)))
    return best


def product_bound(moduli) -> int:
    q = Fraction(1)
    for m in moduli:
        q *= Fraction(m, m - 1)
    return math.ceil(q)


@dataclass
class BoundReport:
    spec: GroupSpec
    linear_bound: int
    product_bound: int
    covering_bound: int
    best_known_upper: Optional[int] = None
    best_known_construction: Optional[str] = None
    best_known_blocks: list = dc_field(default_factory=list)

    @property
    def best_lower(self) -> int:
        return max(self.linear_bound, self.product_bound, self.covering_bound)

    def to_json(self) -> dict:
        return {
            "moduli": list(self.spec.moduli),
            "linear_bound": self.linear_bound,
            "product_bound": self.product_bound,
            "covering_bound": self.covering_bound,
            "best_lower": self.best_lower,
            "best_known_upper": self.best_known_upper,
            "best_known_construction": self.best_known_construction,
            "best_known_blocks": self.best_known_blocks,
        }


def best_block_partition(spec: GroupSpec):
    """Cheapest partition for block_delta: minimise prod (|A| + 1) subject to gcd(A) > |A|."""
    r = spec.r
    if r > 14:
        # group equal moduli, blocks of size m - 1 inside each class
        blocks = []
        by_mod = {}
        for j, m in enumerate(spec.moduli):
            by_mod.setdefault(m, []).append(j)
        for m, idx in sorted(by_mod.items()):
            for s in range(0, len(idx), m - 1):
                blocks.append(idx[s:s + m - 1])
        return math.prod(len(b) + 1 for b in blocks), blocks
    full = (1 << r) - 1
    best = {0: (1, ())}

    def ok(mask):
        mods = [spec.moduli[j] for j in range(r) if mask >> j & 1]
        return reduce(math.gcd, mods) > len(mods)

    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        cands = []
        sub = rest
        while True:
            block = sub | low
            if ok(block):
                val, parts = best[mask ^ block]
                cands.append((val * (bin(block).count("1") + 1), parts + (block,)))
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = min(cands, key=lambda t: t[0])
    val, parts = best[full]
    blocks = sorted([j for j in range(r) if b >> j & 1] for b in parts)
    return val, blocks


def lower_bounds(spec: GroupSpec) -> BoundReport:
    upper, blocks = best_block_partition(spec)
    if len(blocks) == 1 and spec.r > 1:
        name = "single_block"
    elif all(len(b) == 1 for b in blocks):
        name = "product_of_singletons"
    else:
        name = "partitioned"
    return BoundReport(
        spec=spec,
        linear_bound=spec.r + 1,
        product_bound=product_bound(spec.moduli),
        covering_bound=covering_recursion(tuple(sorted(spec.moduli))),
        best_known_upper=upper,
        best_known_construction=name,
        best_known_blocks=blocks,
    )


# --- covering the punctured cube by hyperplanes over F_p -----------------


@dataclass(frozen=True)
class HyperplaneClasses:
    """Parallel classes of affine hyperplanes {x : c.x = d}, d in offsets."""

    p: int
    r: int
    classes: tuple  # of (normal tuple, offsets tuple)

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"{self.p} is not prime")
        norm = []
        for normal, offsets in self.classes:
            normal = tuple(int(c) % self.p for c in normal)
            offsets = tuple(sorted({int(d) % self.p for d in offsets}))
            if len(normal) != self.r or not any(normal):
                raise PreconditionError(f"bad normal vector {list(normal)}")
            if 0 in offsets:
                raise PreconditionError("a hyperplane passes through 0 (offset 0)")
            if not offsets:
                raise PreconditionError("empty parallel class")
            norm.append((normal, offsets))
        for i, (c1, _) in enumerate(norm):
            for c2, _ in norm[i + 1:]:
                if any(all((k * a - b) % self.p == 0 for a, b in zip(c1, c2))
                       for k in range(1, self.p)):
                    raise PreconditionError(f"normals {c1} and {c2} are proportional")
        object.__setattr__(self, "classes", tuple(norm))

    @property
    def spec(self) -> GroupSpec:
        return GroupSpec((self.p,) * self.r)

    def class_sizes(self) -> list:
        return [len(d) for _, d in self.classes]

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r,
                "classes": [{"normal": list(c), "offsets": list(d)} for c, d in self.classes]}

    @classmethod
    def from_json(cls, obj) -> "HyperplaneClasses":
        return cls(int(obj["p"]), int(obj["r"]),
                   tuple((tuple(c["normal"]), tuple(c["offsets"])) for c in obj["classes"]))


def covering_from_partitioned(spec: GroupSpec, blocks) -> HyperplaneClasses:
    p, r = spec.moduli[0], spec.r
    if any(m != p for m in spec.moduli) or not is_prime(p):
        raise PreconditionError("hyperplane covers live in Z_p^r for a prime p")
    blocks = _check_partition(r, blocks)
    classes = []
    for b in blocks:
        if len(b) >= p:
            raise PreconditionError(f"block {list(b)} has size {len(b)} >= p={p}")
        normal = tuple(1 if j in b else 0 for j in range(r))
        classes.append((normal, tuple(range(1, len(b) + 1))))
    return HyperplaneClasses(p, r, tuple(classes))


def delta_from_covering(hc: HyperplaneClasses, F: Field) -> Spectrum:
    """prod over classes of prod_{d} (omega^(c.x) - omega^d), scaled to 1 at 0."""
    spec = hc.spec
    F.check_group(spec)
    w = F.root_of_unity(hc.p)
    out = None
    for normal, offsets in hc.classes:
        coeffs = expand_roots(F, [F.power(w, d) for d in offsets])
        part = _linear_form_spectrum(spec, F, dict(enumerate(normal)), hc.p, coeffs)
        out = part if out is None else spectrum_mul(out, part)
    at_zero = F.sum(out.coeffs.values())
    return out.scale(F.inv(at_zero))


def verify_cover(hc: HyperplaneClasses) -> bool:
    """Every nonzero Boolean point lies on some hyperplane."""
    from itertools import product

    for x in product((0, 1), repeat=hc.r):
        if not any(x):
            continue
        if not any(sum(c * xi for c, xi in zip(normal, x)) % hc.p in offsets
                   for normal, offsets in hc.classes):
            return False
    return True


def covering_bound_check(hc: HyperplaneClasses) -> bool:
    """prod (|H_i| + 1) >= max(r + 1, (p/(p-1))^r), in exact arithmetic."""
    total = math.prod(s + 1 for s in hc.class_sizes())
    return total >= hc.r + 1 and total >= Fraction(hc.p, hc.p - 1) ** hc.r
