"""F-valued Fourier analysis on prod Z_{m_i}.

The character for a = (a_1, ..., a_r) is

    psi_a(x) = prod_i omega_{m_i}^(a_i x_i) = omega_e^(sum_i (e/m_i) a_i x_i)

so every character value is a power of the field's fixed omega_e. The
transform is f^(a) = |G|^-1 sum_x f(x) psi_a(-x).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import PreconditionError
from .fields import Field, field_from_json
from .groups import GroupSpec, PointSet, element_of, index_of


def char_exponent(spec: GroupSpec, e: int, a, x) -> int:
    """k with psi_a(x) = omega_e^k."""
    return sum((e // m) * ai * xi for ai, xi, m in zip(a, x, spec.moduli)) % e


def character_eval(spec: GroupSpec, field: Field, a, x):
    spec.check(a)
    spec.check(x)
    if field.e % spec.exponent:
        raise PreconditionError("field lacks the needed roots of unity")
    return field.zeta_pow(char_exponent(spec, field.e, a, x))


def _pair(spec: GroupSpec, field: Field):
    field.check_group(spec)


@dataclass
class DenseFunction:
    spec: GroupSpec
    field: Field
    values: list

    def __post_init__(self):
        if len(self.values) != self.spec.order:
            raise PreconditionError(
                f"expected {self.spec.order} values, got {len(self.values)}")

    def __call__(self, x):
        return self.values[index_of(self.spec, x)]

    def equals(self, other: "DenseFunction") -> bool:
        return (self.spec == other.spec and self.field == other.field
                and all(self.field.eq(a, b) for a, b in zip(self.values, other.values)))

    def to_json(self) -> dict:
        return {"moduli": list(self.spec.moduli), "field": self.field.descriptor(),
                "values": [self.field.to_json(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj) -> "DenseFunction":
        spec = GroupSpec(tuple(obj["moduli"]))
        field = field_from_json(obj["field"])
        return cls(spec, field, [field.from_json(v) for v in obj["values"]])


class Spectrum:
    """Sparse map character -> nonzero coefficient."""

    def __init__(self, spec: GroupSpec, field: Field, coeffs=None):
        self.spec = spec
        self.field = field
        self.coeffs = {}
        for a, c in (coeffs or {}).items():
            a = spec.check(tuple(a))
            if not field.is_zero(c):
                self.coeffs[a] = c

    @property
    def sparsity(self) -> int:
        return len(self.coeffs)

    def support(self) -> set:
        return set(self.coeffs)

    def sorted_items(self) -> list:
        return sorted(self.coeffs.items(), key=lambda kv: index_of(self.spec, kv[0]))

    def evaluate(self, x):
        F, e = self.field, self.field.e
        out = F.zero
        for a, c in self.coeffs.items():
            out = F.add(out, F.mul(c, F.zeta_pow(char_exponent(self.spec, e, a, x))))
        return out

    def scale(self, c) -> "Spectrum":
        F = self.field
        return Spectrum(self.spec, F, {a: F.mul(v, c) for a, v in self.coeffs.items()})

    def equals(self, other: "Spectrum") -> bool:
        if self.spec != other.spec or self.field != other.field:
            return False
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.field.eq(c, other.coeffs[a]) for a, c in self.coeffs.items())

    def __repr__(self):
        return f"Spectrum({list(self.spec.moduli)}, sparsity={self.sparsity})"

    def to_json(self) -> dict:
        return {
            "moduli": list(self.spec.moduli),
            "field": self.field.descriptor(),
            "coeffs": [{"a": list(a), "c": self.field.to_json(c)} for a, c in self.sorted_items()],
        }

    @classmethod
    def from_json(cls, obj) -> "Spectrum":
        spec = GroupSpec(tuple(obj["moduli"]))
        field = field_from_json(obj["field"])
        return cls(spec, field, {tuple(t["a"]): field.from_json(t["c"]) for t in obj["coeffs"]})


def _tensor_dft(spec: GroupSpec, field: Field, values: list, sign: int) -> list:
    """out[a] = sum_x values[x] omega_e^(sign * E(a, x)), one axis at a time."""
    F, e, Z = field, field.e, field.zeta_table()
    n = spec.order
    vals = list(values)
    stride = 1
    for m in spec.moduli:
        step = e // m
        block = stride * m
        new = [F.zero] * n
        for start in range(0, n, block):
            for base in range(start, start + stride):
                col = [vals[base + stride * x] for x in range(m)]
                nz = [(x, v) for x, v in enumerate(col) if not F.is_zero(v)]
                for a in range(m):
                    acc = F.zero
                    for x, v in nz:
                        acc = F.add(acc, F.mul(v, Z[(sign * a * x * step) % e]))
                    new[base + stride * a] = acc
        vals = new
        stride = block
    return vals


def forward(f: DenseFunction) -> Spectrum:
    _pair(f.spec, f.field)
    F = f.field
    raw = _tensor_dft(f.spec, F, f.values, -1)
    scale = F.inv(F.from_int(f.spec.order))
    coeffs = {}
    for k, v in enumerate(raw):
        if not F.is_zero(v):
            coeffs[element_of(f.spec, k)] = F.mul(v, scale)
    return Spectrum(f.spec, F, coeffs)


def inverse(s: Spectrum) -> DenseFunction:
    spec, F = s.spec, s.field
    if F.e % spec.exponent:
        raise PreconditionError("field lacks the needed roots of unity")
    if s.sparsity <= sum(spec.moduli):
        values = [s.evaluate(x) for x in spec.elements()]
    else:
        dense = [F.zero] * spec.order
        for a, c in s.coeffs.items():
            dense[index_of(spec, a)] = c
        values = _tensor_dft(spec, F, dense, +1)
    return DenseFunction(spec, F, values)


def total_delta(spec: GroupSpec, field: Field) -> Spectrum:
    _pair(spec, field)
    c = field.inv(field.from_int(spec.order))
    return Spectrum(spec, field, {a: c for a in spec.elements()})


def indicator(spec: GroupSpec, field: Field, x) -> DenseFunction:
    vals = [field.zero] * spec.order
    vals[index_of(spec, x)] = field.one
    return DenseFunction(spec, field, vals)


def constant(spec: GroupSpec, field: Field, c=None) -> DenseFunction:
    return DenseFunction(spec, field, [field.one if c is None else c] * spec.order)


def character_function(spec: GroupSpec, field: Field, a) -> DenseFunction:
    return DenseFunction(spec, field, [character_eval(spec, field, a, x) for x in spec.elements()])


def _same(f, g):
    if f.spec != g.spec or f.field != g.field:
        raise PreconditionError("functions live on different groups or fields")


def pointwise_mul(f: DenseFunction, g: DenseFunction) -> DenseFunction:
    _same(f, g)
    F = f.field
    return DenseFunction(f.spec, F, [F.mul(a, b) for a, b in zip(f.values, g.values)])


def spectrum_mul(s: Spectrum, t: Spectrum) -> Spectrum:
    """Spectrum of the pointwise product: the convolution of the two spectra."""
    _same(s, t)
    F, spec = s.field, s.spec
    out = {}
    for a, c in s.coeffs.items():
        for b, d in t.coeffs.items():
            k = spec.add(a, b)
            out[k] = F.add(out.get(k, F.zero), F.mul(c, d))
    return Spectrum(spec, F, out)


def _delta_values(F, zero_value, others) -> bool:
    return F.eq(zero_value, F.one) and all(F.is_zero(v) for v in others)


def is_delta_on(f: DenseFunction, B: PointSet) -> bool:
    if B.spec != f.spec:
        raise PreconditionError("point set belongs to another group")
    return _delta_values(f.field, f(B.elements[0]), (f(b) for b in B.elements[1:]))


def spectrum_is_delta_on(s: Spectrum, B: PointSet) -> bool:
    """is_delta_on without materialising the dense function."""
    if B.spec != s.spec:
        raise PreconditionError("point set belongs to another group")
    return _delta_values(s.field, s.evaluate(B.elements[0]),
                         (s.evaluate(b) for b in B.elements[1:]))


def hypercube_identity(field: Field, terms, T) -> bool:
    """sum_j b_j prod_i (1 + T_i alpha_i(j)) == sum_j b_j for one assignment T.

    ``terms`` is a list of (b_j, [alpha_1(j), ..., alpha_r(j)]).
    """
    F = field
    lhs = F.zero
    rhs = F.zero
    for b, alphas in terms:
        prod = b
        for t, al in zip(T, alphas):
            prod = F.mul(prod, F.add(F.one, F.mul(t, al)))
        lhs = F.add(lhs, prod)
        rhs = F.add(rhs, b)
    return F.eq(lhs, rhs)


def delta_identity_check(s: Spectrum, trials: int = 50, seed: int = 0) -> bool:
    """Randomised check of the polynomial identity satisfied by hypercube deltas.

    Each T_i is drawn from {0} and the e-th roots of unity of the field.
    """
    spec, F = s.spec, s.field
    roots = [F.root_of_unity(m) for m in spec.moduli]
    terms = [(c, [F.power(w, ai) for w, ai in zip(roots, a)]) for a, c in s.sorted_items()]
    pool = [F.zero] + F.zeta_table()
    rng = random.Random(seed)
    for _ in range(trials):
        T = [rng.choice(pool) for _ in range(spec.r)]
        if not hypercube_identity(F, terms, T):
            return False
    return True
