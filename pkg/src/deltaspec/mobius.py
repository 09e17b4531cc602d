"""Sparsity >= 4 on Z_{m1} x Z_{m2} (coprime) for hypercube deltas.

A 3-character support {(a_i, b_i)} admits a hypercube delta iff every
multilinear P(X, Y) = v_1 + v_X X + v_Y Y + v_XY XY vanishing at the
three points (alpha_i, beta_i) = (omega_{m1}^a_i, omega_{m2}^b_i) also
vanishes at (0, 0). ``mobius_multilinear`` builds a P that does not,
following the three-case argument; ``verify_r2_lower`` checks the bound
by exhaustive exact search.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .errors import BudgetExceededError, PreconditionError
from .fields import CyclotomicField, Field, make_cyclotomic
from .groups import GroupSpec, point_set
from .linalg import nullspace
from .search import SearchProblem, min_sparsity


@dataclass
class MultilinearCertificate:
    field: Field
    v: Optional[tuple]  # (v_1, v_X, v_Y, v_XY), None when construction failed
    case: int
    hypothesis_ok: bool  # gcd(m1, m2) == 1

    @property
    def ok(self) -> bool:
        return self.v is not None

    def evaluate(self, X, Y):
        F = self.field
        v1, vx, vy, vxy = self.v
        return F.sum([v1, F.mul(vx, X), F.mul(vy, Y), F.mul(vxy, F.mul(X, Y))])

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "hypothesis_ok": self.hypothesis_ok,
            "v": None if self.v is None else [self.field.to_json(c) for c in self.v],
        }


def _roots(F, m, exps):
    w = F.root_of_unity(m)
    return [F.power(w, int(a) % m) for a in exps]


def mobius_multilinear(m1: int, m2: int, a_exps, b_exps, F: Optional[Field] = None
                       ) -> MultilinearCertificate:
    """P with P(alpha_i, beta_i) = 0 and P(0, 0) != 0.

    alpha_i = omega_{m1}^a_exps[i], beta_i = omega_{m2}^b_exps[i].
    """
    if len(a_exps) != 3 or len(b_exps) != 3:
        raise PreconditionError("need exactly three points")
    if F is None:
        F = make_cyclotomic(math.lcm(m1, m2))
    if not isinstance(F, CyclotomicField):
        raise PreconditionError("the construction is stated over characteristic 0")
    coprime = math.gcd(m1, m2) == 1
    al = _roots(F, m1, a_exps)
    be = _roots(F, m2, b_exps)
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if F.eq(al[i], al[j]):
            # (X - alpha_i)(Y - beta_k)
            v = (F.mul(al[i], be[k]), F.neg(be[k]), F.neg(al[i]), F.one)
            return MultilinearCertificate(F, v, 1, coprime)
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if F.eq(be[i], be[j]):
            # (X - alpha_k)(Y - beta_i)
            v = (F.mul(al[k], be[i]), F.neg(be[i]), F.neg(al[k]), F.one)
            return MultilinearCertificate(F, v, 2, coprime)
    rows = [[F.one, al[i], be[i], F.mul(al[i], be[i])] for i in range(3)]
    for vec in nullspace(F, rows):
        if not F.is_zero(vec[0]):
            return MultilinearCertificate(F, tuple(vec), 3, coprime)
    return MultilinearCertificate(F, None, 3, coprime)


def check_certificate(cert: MultilinearCertificate, m1, m2, a_exps, b_exps) -> bool:
    if not cert.ok:
        return False
    F = cert.field
    al = _roots(F, m1, a_exps)
    be = _roots(F, m2, b_exps)
    if F.is_zero(cert.v[0]):
        return False
    return all(F.is_zero(cert.evaluate(x, y)) for x, y in zip(al, be))


def random_triples(m1: int, m2: int, count: int, seed: int = 0) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        out.append(([rng.randrange(m1) for _ in range(3)], [rng.randrange(m2) for _ in range(3)]))
    return out


def verify_r2_lower(m1: int, m2: int, budget: Optional[int] = None, workers: int = 1) -> bool:
    """True iff no support of size <= 3 carries a hypercube delta over Q(zeta)."""
    if math.gcd(m1, m2) != 1:
        raise PreconditionError(f"gcd({m1}, {m2}) > 1: outside the coprime hypothesis")
    spec = GroupSpec((m1, m2))
    F = make_cyclotomic(math.lcm(m1, m2))
    prob = SearchProblem(spec, F, point_set(spec, "hypercube"), t_min=1, t_max=min(3, spec.order),
                         budget=budget, workers=workers)
    res = min_sparsity(prob)
    if res.status == "aborted":
        raise BudgetExceededError("verify_r2_lower ran out of budget", res.progress)
    return res.status == "exhausted"
