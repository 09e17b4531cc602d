"""Fields containing e-th roots of unity.

Each field object is a small "domain" in the sympy sense: elements are raw
Python values (int, tuple of Fractions, complex) and all arithmetic goes
through methods on the field. Three backends:

* ``PrimeField``: F_p with p the smallest prime = 1 (mod e).
* ``CyclotomicField``: Q(zeta_e) as Q[x]/Phi_e(x), exact rationals.
* ``ComplexField``: complex doubles with an equality tolerance. Never used
  for certificates.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import PreconditionError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def euler_phi(n: int) -> int:
    out = n
    for q in _prime_factors(n):
        out -= out // q
    return out


class Field:
    """Operations shared by every backend. Subclasses set ``e``."""

    exact = True
    backend = ""

    def __init__(self, e: int):
        if e < 1:
            raise PreconditionError("e must be >= 1")
        self.e = e
        self._zeta = None

    # identity and equality of fields is by descriptor
    def __eq__(self, other):
        return isinstance(other, Field) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(tuple(sorted(self.descriptor().items())))

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.descriptor().items() if k != "backend")
        return f"{type(self).__name__}({args})"

    # --- arithmetic (overridden) ---
    zero = None
    one = None

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        out = self.one
        while k:
            if k & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            k >>= 1
        return out

    def sum(self, items):
        out = self.zero
        for x in items:
            out = self.add(out, x)
        return out

    # --- roots of unity ---
    def zeta_table(self) -> list:
        """[omega_e^0, ..., omega_e^(e-1)]."""
        if self._zeta is None:
            w = self.omega_e()
            table = [self.one]
            for _ in range(self.e - 1):
                table.append(self.mul(table[-1], w))
            self._zeta = table
        return self._zeta

    def zeta_pow(self, k: int):
        return self.zeta_table()[k % self.e]

    def root_of_unity(self, n: int):
        """Primitive n-th root omega_e^(e/n); n must divide e."""
        if n < 1 or self.e % n:
            raise PreconditionError(f"{n} does not divide e={self.e}")
        return self.zeta_pow(self.e // n)

    def is_order_invertible(self, order: int) -> bool:
        return not self.is_zero(self.from_int(order))

    def check_group(self, spec) -> None:
        """Reject groups whose exponent does not divide e or whose order vanishes."""
        if self.e % spec.exponent:
            raise PreconditionError(
                f"field has e={self.e}; group exponent {spec.exponent} does not divide it")
        if not self.is_order_invertible(spec.order):
            raise PreconditionError("characteristic divides the group order")


class PrimeField(Field):
    backend = "fp"

    def __init__(self, p: int, e: int):
        super().__init__(e)
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        if (p - 1) % e:
            raise PreconditionError(f"p={p} is not 1 mod e={e}")
        self.p = p
        self.generator = smallest_primitive_root(p)
        self.omega = pow(self.generator, (p - 1) // e, p)
        self.zero, self.one = 0, 1

    def descriptor(self) -> dict:
        return {"backend": "fp", "p": self.p, "e": self.e}

    def omega_e(self):
        return self.omega

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, -1, self.p)

    def power(self, a, k):
        return pow(a, k, self.p)

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def is_zero(self, a):
        return a % self.p == 0

    def to_json(self, a):
        return a

    def from_json(self, v):
        return int(v) % self.p

    def random(self, rng):
        return rng.randrange(self.p)


def make_prime_field(e: int) -> PrimeField:
    if e < 1:
        raise PreconditionError("e must be >= 1")
    p = e + 1
    while not is_prime(p):
        p += e
    return PrimeField(p, e)


# --- integer polynomial helpers (coefficient lists, low degree first) -------


def _poly_divexact(num: list, den: list) -> list:
    """Exact quotient of integer polynomials; den is monic."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    if any(num[: len(den) - 1]):
        raise AssertionError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(e: int) -> tuple:
    """Coefficients of Phi_e, lowest degree first."""
    num = [-1] + [0] * (e - 1) + [1]
    for d in range(1, e):
        if e % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _qpoly_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _qpoly_divmod(a: list, b: list):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for k in range(len(q) - 1, -1, -1):
        c = a[k + len(b) - 1] / lead
        q[k] = c
        if c:
            for j, d in enumerate(b):
                a[k + j] -= c * d
    return _qpoly_trim(q), _qpoly_trim(a[: len(b) - 1])


class CyclotomicField(Field):
    """Q(zeta_e); elements are length-phi(e) tuples of Fractions."""

    backend = "cyclo"

    def __init__(self, e: int):
        super().__init__(e)
        self.phi = cyclotomic_poly(e)
        self.degree = len(self.phi) - 1
        d = self.degree
        z = Fraction(0)
        self.zero = (z,) * d
        self.one = (Fraction(1),) + (z,) * (d - 1)
        # x^k mod Phi_e for d <= k <= 2d - 2
        self._red = {}
        cur = [Fraction(-c) for c in self.phi[:d]]  # x^d
        for k in range(d, 2 * d - 1):
            self._red[k] = tuple(cur)
            top = cur[-1]
            cur = [z] + cur[:-1]
            if top:
                cur = [c - top * p for c, p in zip(cur, self.phi[:d])]

    def descriptor(self) -> dict:
        return {"backend": "cyclo", "e": self.e}

    def omega_e(self):
        if self.degree == 1:
            # e in {1, 2}: zeta is the rational root of Phi_e
            return (Fraction(-self.phi[0]),)
        return self.element([0, 1])

    def element(self, coeffs) -> tuple:
        """Reduce an arbitrary rational coefficient list mod Phi_e."""
        coeffs = [Fraction(c) for c in coeffs]
        d = self.degree
        if len(coeffs) <= d:
            return tuple(coeffs) + (Fraction(0),) * (d - len(coeffs))
        _, rem = _qpoly_divmod(coeffs, [Fraction(c) for c in self.phi])
        return tuple(rem) + (Fraction(0),) * (d - len(rem))

    def from_int(self, n):
        return (Fraction(n),) + self.zero[1:]

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        d = self.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        low = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                low = [u + c * v for u, v in zip(low, self._red[k])]
        return tuple(low)

    def scale(self, a, c):
        return tuple(x * c for x in a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of 0 in Q(zeta)")
        # extended Euclid on (Phi, a); track the cofactor of a only
        r0, r1 = [Fraction(c) for c in self.phi], _qpoly_trim(list(a))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _qpoly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _qpoly_sub(s0, _qpoly_mul(q, s1))
        c = r1[0]
        return self.element([x / c for x in s1])

    def eq(self, a, b):
        return a == b

    def is_zero(self, a):
        return not any(a)

    def to_json(self, a):
        return [_frac_json(x) for x in a]

    def from_json(self, v):
        if isinstance(v, (int, str)):
            v = [v]
        return self.element([Fraction(x) for x in v])

    def random(self, rng, bound=5):
        return tuple(Fraction(rng.randint(-bound, bound)) for _ in range(self.degree))


def _qpoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _qpoly_trim(out)


def _qpoly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _qpoly_trim([x - y for x, y in zip(a, b)])


def _frac_json(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def make_cyclotomic(e: int) -> CyclotomicField:
    return CyclotomicField(e)


class ComplexField(Field):
    backend = "complex"
    exact = False

    def __init__(self, e: int, tolerance: float = 1e-9):
        super().__init__(e)
        if not tolerance > 0:
            raise PreconditionError("tolerance must be positive")
        self.tolerance = tolerance
        self.zero, self.one = 0j, 1 + 0j

    def descriptor(self) -> dict:
        return {"backend": "complex", "e": self.e, "tolerance": self.tolerance}

    def omega_e(self):
        return cmath.exp(2j * math.pi / self.e)

    def zeta_table(self):
        if self._zeta is None:
            self._zeta = [cmath.exp(2j * math.pi * k / self.e) for k in range(self.e)]
        return self._zeta

    def from_int(self, n):
        return complex(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if abs(a) <= self.tolerance:
            raise ZeroDivisionError("inverse of (numerically) zero")
        return 1 / a

    def eq(self, a, b):
        return abs(a - b) <= self.tolerance

    def is_zero(self, a):
        return abs(a) <= self.tolerance

    def to_json(self, a):
        return [a.real, a.imag]

    def from_json(self, v):
        return complex(v[0], v[1])

    def random(self, rng):
        return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


def make_complex(e: int, tolerance: float = 1e-9) -> ComplexField:
    return ComplexField(e, tolerance)


def field_from_json(obj: dict) -> Field:
    backend = obj.get("backend")
    if backend == "fp":
        f = PrimeField(int(obj["p"]), int(obj["e"]))
    elif backend == "cyclo":
        f = CyclotomicField(int(obj["e"]))
    elif backend == "complex":
        f = ComplexField(int(obj["e"]), float(obj.get("tolerance", 1e-9)))
    else:
        raise PreconditionError(f"unknown field backend {backend!r}")
    return f


def field_for(e: int, backend: str, tolerance: float = 1e-9) -> Field:
    """The canonical field of each backend for exponent e."""
    if backend == "fp":
        return make_prime_field(e)
    if backend == "cyclo":
        return make_cyclotomic(e)
    if backend == "complex":
        return make_complex(e, tolerance)
    raise PreconditionError(f"unknown backend {backend!r}")
