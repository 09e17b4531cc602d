"""Matching-vector PIR parameter shapes.

Every constant hidden inside Theta/O is set to 1, so the numbers describe
the shape of the trade-off and nothing more; each report carries the
label "shape-only".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError

LABEL = "shape-only"


def _sig(x: float, digits: int = 6) -> float:
    return float(f"{x:.{digits}g}")


def _solve_log_dimension(r: int, log_n: float) -> tuple:
    """L = ln k with L^r / (ln L)^(r-1) = ln n, searched on L >= e.

    On [e, inf) the left side increases from e^r, so bisection applies.
    Returns (L, clamped) where clamped means ln n < e^r and L = e.
    """
    target = math.log(log_n)

    def g(ell):  # log of the left side, in ell = ln L
        return r * ell - (r - 1) * math.log(ell)

    if target <= g(1.0):
        return math.e, True
    lo, hi = 1.0, 2.0
    while g(hi) < target:
        lo, hi = hi, hi * 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    return math.exp((lo + hi) / 2), False


def lower_bound_communication(n: int, t: int) -> float:
    """exp((ln n)^(1/t))."""
    return math.exp(math.log(n) ** (1.0 / t))


@dataclass
class PirReport:
    r: int
    n: int
    t: int
    log_k: float
    dimension_clamped: bool
    required_servers: int
    lower_bound: float

    @property
    def feasible(self) -> bool:
        return self.t >= self.required_servers

    @property
    def dimension(self):
        # k itself, when it fits in a float
        return _sig(math.exp(self.log_k)) if self.log_k < 700 else None

    def to_json(self) -> dict:
        return {
            "label": LABEL,
            "r": self.r,
            "n": str(self.n) if self.n >= 1 << 53 else self.n,
            "t": self.t,
            "servers": self.t,
            "log_k": _sig(self.log_k),
            "k": self.dimension,
            "dimension_clamped": self.dimension_clamped,
            "communication": "O(k)",
            "required_servers": self.required_servers,
            "feasible": self.feasible,
            "lower_bound_communication": _sig(self.lower_bound),
        }


def pir_params(r: int, n: int, t=None) -> PirReport:
    """Shape of the parameters for a t-sparse decoding polynomial (t defaults to r + 1)."""
    if r < 2:
        raise PreconditionError("r must be at least 2")
    if n < 2:
        raise PreconditionError("n must be at least 2")
    if t is None:
        t = r + 1
    if t < 1:
        raise PreconditionError("t must be positive")
    log_n = math.log(n)
    if log_n <= 1:
        # ln ln n <= 0: below the range of the dimension formula
        L, clamped = math.e, True
    else:
        L, clamped = _solve_log_dimension(r, log_n)
    return PirReport(r, n, t, L, clamped, r + 1, lower_bound_communication(n, t))


def pir_table(r: int, n: int, ts) -> list:
    return [pir_params(r, n, t) for t in ts]
