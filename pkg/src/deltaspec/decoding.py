"""Canonical sets and S-decoding polynomials for squarefree m.

A polynomial P over a field with a primitive m-th root gamma is
S-decoding when P(1) = 1 and P(gamma^s) = 0 for s in S - {0}. Through
the CRT split Z_m = prod Z_{p_i} the idempotents S become {0,1}^r and P
becomes a hypercube delta on prod Z_{p_i} with the same sparsity.

gamma is omega_m^u for a unit u (``gamma_power``, default 1). The term
map sends exponent a to the character c with c_i = a u (m/p_i)^-1 mod p_i;
when gamma = prod omega_{p_i} (u = sum m/p_i) this is plain reduction
a -> (a mod p_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .constructions import expand_roots
from .errors import PreconditionError, VerificationError
from .fields import Field, field_from_json
from .fourier import Spectrum
from .groups import crt_split, factorize, is_squarefree, point_set
from .search import SearchProblem, SearchResult, min_sparsity


@dataclass(frozen=True)
class CanonicalSet:
    m: int
    primes: tuple
    elements: tuple

    def to_json(self) -> list:
        return list(self.elements)


def _check_m(m: int):
    if m < 2 or not is_squarefree(m):
        raise PreconditionError(f"m must be a squarefree integer >= 2, got {m}")


def canonical_set(m: int) -> CanonicalSet:
    _check_m(m)
    primes = tuple(sorted(factorize(m)))
    els = tuple(x for x in range(m) if x * x % m == x)
    if len(els) != 2 ** len(primes):
        raise VerificationError(f"found {len(els)} idempotents mod {m}")
    return CanonicalSet(m, primes, els)


def product_gamma_power(m: int) -> int:
    """u with omega_m^u = prod_i omega_{p_i}."""
    _check_m(m)
    return sum(m // p for p in factorize(m)) % m


class DecodingPolynomial:
    def __init__(self, m: int, field: Field, terms: dict, gamma_power: int = 1):
        _check_m(m)
        if field.e % m:
            raise PreconditionError(f"field has no primitive {m}-th root of unity")
        if math.gcd(gamma_power, m) != 1:
            raise PreconditionError("gamma_power must be a unit mod m")
        self.m = m
        self.field = field
        self.gamma_power = gamma_power % m
        self.terms = {}
        for a, c in terms.items():
            a = int(a) % m
            self.terms[a] = field.add(self.terms.get(a, field.zero), c)
        self.terms = {a: c for a, c in self.terms.items() if not field.is_zero(c)}

    @property
    def gamma(self):
        return self.field.power(self.field.root_of_unity(self.m), self.gamma_power)

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    def evaluate_at_power(self, s: int):
        """P(gamma^s)."""
        F = self.field
        w = F.root_of_unity(self.m)
        return F.sum(F.mul(c, F.power(w, a * s * self.gamma_power % self.m))
                     for a, c in self.terms.items())

    def equals(self, other: "DecodingPolynomial") -> bool:
        return (self.m == other.m and self.field == other.field
                and self.gamma_power == other.gamma_power
                and set(self.terms) == set(other.terms)
                and all(self.field.eq(c, other.terms[a]) for a, c in self.terms.items()))

    def to_json(self) -> dict:
        out = {"m": self.m, "field": self.field.descriptor()}
        if self.gamma_power != 1:
            out["gamma_power"] = self.gamma_power
        out["terms"] = [{"e": a, "c": self.field.to_json(c)} for a, c in sorted(self.terms.items())]
        return out

    @classmethod
    def from_json(cls, obj) -> "DecodingPolynomial":
        F = field_from_json(obj["field"])
        terms = {int(t["e"]): F.from_json(t["c"]) for t in obj["terms"]}
        return cls(int(obj["m"]), F, terms, int(obj.get("gamma_power", 1)))

    def __repr__(self):
        return f"DecodingPolynomial(m={self.m}, sparsity={self.sparsity})"


def verify_decoding(P: DecodingPolynomial, S: Optional[CanonicalSet] = None) -> bool:
    S = S or canonical_set(P.m)
    if S.m != P.m:
        raise PreconditionError("polynomial and canonical set use different m")
    F = P.field
    for s in S.elements:
        v = P.evaluate_at_power(s)
        if s == 0:
            if not F.eq(v, F.one):
                return False
        elif not F.is_zero(v):
            return False
    return True


def trivial_decoding(m: int, F: Field, gamma_power: int = 1) -> DecodingPolynomial:
    """prod over s in S - {0} of (Z - gamma^s) / (1 - gamma^s)."""
    S = canonical_set(m)
    P0 = DecodingPolynomial(m, F, {}, gamma_power)
    g = P0.gamma
    roots = [F.power(g, s) for s in S.elements if s]
    coeffs = expand_roots(F, roots)
    scale = F.inv(F.sum(coeffs))
    return DecodingPolynomial(m, F, {k: F.mul(c, scale) for k, c in enumerate(coeffs)},
                              gamma_power)


def exponent_to_character(m: int, a: int, gamma_power: int = 1) -> tuple:
    split = crt_split(m)
    return tuple(a * gamma_power * pow(m // p, -1, p) % p for p in split.primes)


def character_to_exponent(m: int, c, gamma_power: int = 1) -> int:
    split = crt_split(m)
    u_inv = pow(gamma_power, -1, m)
    resid = [ci * (m // p) * u_inv % p for ci, p in zip(c, split.primes)]
    return split.unmap(resid)


def poly_to_delta(P: DecodingPolynomial) -> Spectrum:
    split = crt_split(P.m)
    coeffs = {exponent_to_character(P.m, a, P.gamma_power): c for a, c in P.terms.items()}
    return Spectrum(split.spec, P.field, coeffs)


def delta_to_poly(s: Spectrum, gamma_power: int = 1) -> DecodingPolynomial:
    mods = s.spec.moduli
    if len(set(mods)) != len(mods) or list(mods) != sorted(mods):
        raise PreconditionError("spectrum must live on prod Z_p over distinct sorted primes")
    m = math.prod(mods)
    _check_m(m)
    if tuple(sorted(factorize(m))) != tuple(mods):
        raise PreconditionError("moduli must be primes")
    terms = {character_to_exponent(m, a, gamma_power): c for a, c in s.coeffs.items()}
    return DecodingPolynomial(m, s.field, terms, gamma_power)


@dataclass
class DecodingSearch:
    result: SearchResult
    polynomial: Optional[DecodingPolynomial]
    r: int

    def to_json(self, timing: bool = False) -> dict:
        out = self.result.to_json(timing)
        out["r"] = self.r
        out["polynomial"] = self.polynomial.to_json() if self.polynomial else None
        return out


def min_decoding_sparsity(m: int, F: Field, budget: Optional[int] = None, workers: int = 1,
                          gamma_power: int = 1) -> DecodingSearch:
    split = crt_split(m)
    spec = split.spec
    r = spec.r
    prob = SearchProblem(spec, F, point_set(spec, "hypercube"), budget=budget, workers=workers)
    res = min_sparsity(prob)
    poly = None
    if res.status == "found":
        if res.min_t < r + 1:
            raise VerificationError(f"decoding sparsity {res.min_t} below the r+1 = {r + 1} bound")
        poly = delta_to_poly(res.witness, gamma_power)
        if not verify_decoding(poly):
            raise VerificationError("converted witness is not S-decoding")
    return DecodingSearch(res, poly, r)
