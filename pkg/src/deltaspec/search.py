"""Exhaustive search for the sparsest delta function on a point set B.

A support T (a set of characters) is *feasible* when some f with
Supp(f^) inside T has f(0) = 1 and f = 0 on B - {0}. Feasibility is a
linear system, and we enumerate supports one symmetry orbit at a time:

* translations: T -> T - c keeps feasibility for every B (multiply f by a
  character), so only supports containing 0 are enumerated;
* monomial maps a_i -> k_i a_sigma(i) whose transpose fixes B;
* Galois scaling a -> k a for units k mod e (cyclotomic backend only).

A support is canonical when it is the lexicographically least (sorted
index tuple) member of its orbit that contains 0.

Supports are tested in batches with numpy elimination over prime fields.
A prime-field problem is decided by its own field. For the cyclotomic
backend ranks are taken modulo enough split primes q = 1 (mod e) that a
Hadamard bound on the norms of the minors rules out a simultaneous rank
drop (see ``_Context.rank_fields``). The first feasible support is then
solved exactly for the witness.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional

import numpy as np

from .errors import BudgetExceededError, PreconditionError, VerificationError
from .fields import Field, PrimeField, euler_phi, field_from_json, is_prime
from .fourier import Spectrum, char_exponent, inverse, is_delta_on
from .groups import GroupSpec, PointSet, element_of, index_of, point_set
from .linalg import solve_linear

DEFAULT_BUDGET = 10**8
# soft cap on the size of the symmetry group used for pruning
SYM_GROUP_CAP = 2048
# elements (group size x batch x t) materialised per canonical-check step
_CANON_CELLS = 1 << 22
# canonical filtering touches raw * |group| * t^2 cells; the precheck allows
# this many cells per unit of feasibility budget
CELLS_PER_TEST = 1000
# cyclotomic ranks are computed modulo split primes above this (q^2 fits int64)
CERT_PRIME_FLOOR = 1 << 24


def default_budget() -> int:
    env = os.environ.get("DELTASPEC_BUDGET")
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise PreconditionError(f"DELTASPEC_BUDGET={env!r} is not a number")
    return DEFAULT_BUDGET


# --- direct feasibility ---------------------------------------------------


def _char_matrix(spec, F, rows, cols):
    return [[F.zeta_pow(char_exponent(spec, F.e, a, b)) for a in cols] for b in rows]


def feasible_support(spec: GroupSpec, F: Field, T: Iterable, B: PointSet) -> Optional[Spectrum]:
    """Spectrum supported inside T that is a delta on B, or None."""
    T = [spec.check(tuple(a)) for a in T]
    if not T or len(set(T)) != len(T):
        raise PreconditionError("support must be nonempty and without repeats")
    if B.spec != spec:
        raise PreconditionError("point set belongs to another group")
    F.check_group(spec)
    M = _char_matrix(spec, F, B.elements, T)
    rhs = [F.one] + [F.zero] * (len(B) - 1)
    sol = solve_linear(F, M, rhs)
    if not sol.feasible:
        return None
    return Spectrum(spec, F, dict(zip(T, sol.solution)))


# --- translate bound --------------------------------------------------------


class DifferenceSetViolation(PreconditionError):
    def __init__(self, pair, difference):
        self.pair = pair
        self.difference = difference
        super().__init__(f"D - D is not inside B: {list(pair[0])} - {list(pair[1])} "
                         f"= {list(difference)}")


def translate_bound(spec: GroupSpec, B: PointSet, D: Iterable) -> int:
    """|D| when D - D lies inside B; a certified sparsity lower bound."""
    if spec.zero not in B:
        raise PreconditionError("B must contain 0")
    D = sorted({spec.check(tuple(d)) for d in D}, key=lambda x: index_of(spec, x))
    for x in D:
        for y in D:
            d = spec.sub(x, y)
            if d not in B:
                raise DifferenceSetViolation((x, y), d)
    return len(D)


# --- problem / result -------------------------------------------------------


@dataclass
class SearchProblem:
    spec: GroupSpec
    field: Field
    B: PointSet
    t_min: int = 1
    t_max: Optional[int] = None
    coordinate_permutations: bool = True
    coordinate_scaling: bool = True
    galois_scaling: Optional[bool] = None
    translations: bool = True
    budget: Optional[int] = None
    workers: int = 1
    resume: Optional[dict] = None
    # abort up front when the orbit-count estimate for a level exceeds the budget
    precheck: bool = True

    def __post_init__(self):
        if self.t_max is None:
            self.t_max = self.spec.order
        if self.galois_scaling is None:
            self.galois_scaling = self.field.backend == "cyclo"
        if self.budget is None:
            self.budget = default_budget()
        if not 1 <= self.t_min <= self.t_max <= self.spec.order:
            raise PreconditionError(
                f"need 1 <= t_min <= t_max <= {self.spec.order}, got {self.t_min}, {self.t_max}")
        if self.B.spec != self.spec or self.spec.zero not in self.B:
            raise PreconditionError("B must be a point set of this group containing 0")
        if not self.field.exact:
            raise PreconditionError("searches need an exact backend (fp or cyclo)")
        self.field.check_group(self.spec)

    def to_json(self) -> dict:
        return {
            "moduli": list(self.spec.moduli),
            "field": self.field.descriptor(),
            "set": self.B.kind,
            "B": self.B.to_json() if self.B.kind == "custom" else None,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "pruning": {
                "coordinate_permutations": self.coordinate_permutations,
                "coordinate_scaling": self.coordinate_scaling,
                "galois_scaling": self.galois_scaling,
                "translations": self.translations,
            },
        }

    @classmethod
    def from_json(cls, obj: dict, **kw) -> "SearchProblem":
        """Rebuild from ``to_json`` output; budget, workers and resume come from ``kw``."""
        spec = GroupSpec(tuple(obj["moduli"]))
        B = point_set(spec, obj["set"], obj.get("B"))
        return cls(spec, field_from_json(obj["field"]), B, t_min=int(obj["t_min"]),
                   t_max=int(obj["t_max"]), **obj.get("pruning", {}), **kw)


@dataclass
class SearchResult:
    status: str  # found | exhausted | aborted
    min_t: Optional[int] = None
    witness: Optional[Spectrum] = None
    refuted_canonical_subsets: dict = dc_field(default_factory=dict)
    tests: int = 0
    symmetry_group_size: int = 1
    progress: Optional[dict] = None
    wall_time: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "status": self.status,
            "min_t": self.min_t,
            "refuted_canonical_subsets": {str(t): c for t, c in
                                          sorted(self.refuted_canonical_subsets.items())},
            "feasibility_tests": self.tests,
            "symmetry_group_size": self.symmetry_group_size,
            "witness": self.witness.to_json() if self.witness is not None else None,
        }
        if self.progress is not None:
            out["progress"] = self.progress
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


# --- symmetry group ---------------------------------------------------------


def _units(m):
    return [k for k in range(1, m) if math.gcd(k, m) == 1] if m > 1 else [0]


def _perm_blocks(classes: list, cap: int) -> list:
    """Split equal-moduli classes into blocks whose symmetric groups multiply to <= cap."""
    blocks = [list(c) for c in classes if len(c) > 1]
    while blocks and math.prod(math.factorial(len(b)) for b in blocks) > cap:
        blocks.sort(key=len, reverse=True)
        big = blocks.pop(0)
        half = len(big) // 2
        blocks += [b for b in (big[:half], big[half:]) if len(b) > 1]
    return sorted(blocks)


def _fixes(spec: GroupSpec, in_b: np.ndarray, bc: np.ndarray, sigma, k) -> bool:
    # transpose action on points: (M^T b)_sigma(i) = k_i b_i
    img = np.empty_like(bc)
    img[:, list(sigma)] = bc * np.array(k, dtype=np.int64) % np.array(spec.moduli)
    return bool(in_b[img @ spec.weights()].all())


def symmetry_maps(problem: SearchProblem) -> list:
    """Monomial maps a'_i = k_i * a_sigma(i) that preserve feasibility.

    The group used is P.K: permutations P (inside a capped product of
    symmetric groups on equal moduli) and diagonal unit multipliers K, each
    fixing B, times Galois scalars for the cyclotomic backend. K is
    normalised by P, so P.K is a group. Returned as (sigma, k) pairs, the
    identity first.
    """
    spec, B = problem.spec, problem.B
    r, mods = spec.r, spec.moduli
    bc = np.array(B.elements, dtype=np.int64)
    in_b = np.zeros(spec.order, dtype=bool)
    in_b[B.indices()] = True
    ident_s, ident_k = tuple(range(r)), (1,) * r

    perms = [ident_s]
    if problem.coordinate_permutations:
        classes = {}
        for i, m in enumerate(mods):
            classes.setdefault(m, []).append(i)
        blocks = _perm_blocks(list(classes.values()), SYM_GROUP_CAP)
        perms = []
        for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
            sigma = list(range(r))
            for src, img in zip(blocks, choice):
                for a, b in zip(src, img):
                    sigma[a] = b
            perms.append(tuple(sigma))
        perms = [p for p in perms if _fixes(spec, in_b, bc, p, ident_k)]

    mults = [ident_k]
    if problem.coordinate_scaling:
        cap = max(1, SYM_GROUP_CAP // len(perms))
        opts = [_units(m) for m in mods]
        if math.prod(len(o) for o in opts) > 50 * cap:
            opts = [sorted({1, m - 1}) for m in mods]
        if math.prod(len(o) for o in opts) <= 50 * cap:
            mults = [k for k in itertools.product(*opts) if _fixes(spec, in_b, bc, ident_s, k)]
        if len(mults) > cap:
            mults = [ident_k]

    scalars = [1]
    if problem.galois_scaling and problem.field.backend == "cyclo":
        scalars = _units(problem.field.e)
    maps = set()
    for g in scalars:
        for s_ in perms:
            for k in mults:
                # sigma then k, then the scalar g
                maps.add((s_, tuple(g * ki % m for ki, m in zip(k, mods))))
    maps.discard((ident_s, ident_k))
    return [(ident_s, ident_k)] + sorted(maps)


def _map_tables(spec: GroupSpec, maps) -> np.ndarray:
    coords = spec.coords_array()
    mods = np.array(spec.moduli, dtype=np.int64)
    w = spec.weights()
    out = np.empty((len(maps), spec.order), dtype=np.int64)
    for g, (sigma, k) in enumerate(maps):
        new = coords[:, list(sigma)] * np.array(k, dtype=np.int64) % mods
        out[g] = new @ w
    return out


# --- batched elimination mod p ---------------------------------------------


def _inv_mod(x: np.ndarray, p: int) -> np.ndarray:
    """Elementwise x^(p-2) mod p (Fermat); x nonzero."""
    out = np.ones_like(x)
    base = x % p
    k = p - 2
    while k:
        if k & 1:
            out = out * base % p
        base = base * base % p
        k >>= 1
    return out


def certificate_prime_field(e: int, after: Optional[int] = None) -> PrimeField:
    """F_q for the least prime q = 1 (mod e) above 2^24 (or above ``after``)."""
    floor = max(CERT_PRIME_FLOOR, after or 0)
    q = (floor // e + 1) * e + 1
    while not is_prime(q):
        q += e
    return PrimeField(q, e)


def batch_rank_test(A: np.ndarray, p: int):
    """Row-reduce a stack (N, R, C+1) of augmented systems over F_p.

    Returns (rank of the first C columns, whether the last column carries a pivot).
    """
    A = A % p
    N, R, C1 = A.shape
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(R)
    rhs_pivot = np.zeros(N, dtype=bool)
    for j in range(C1):
        if R == 0:
            break
        mask = (A[:, :, j] != 0) & (rows[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if j == C1 - 1:
            rhs_pivot = has
            break
        idx = np.nonzero(has)[0]
        if idx.size == 0:
            continue
        piv = mask[idx].argmax(axis=1)
        rr = rank[idx]
        sub = A[idx]
        ar = np.arange(idx.size)
        top = sub[ar, rr].copy()
        sub[ar, rr] = sub[ar, piv]
        sub[ar, piv] = top
        prow = sub[ar, rr] * _inv_mod(sub[ar, rr, j], p)[:, None] % p
        sub[ar, rr] = prow
        fac = sub[:, :, j].copy()
        fac[ar, rr] = 0
        sub[:, :, j:] = (sub[:, :, j:] - fac[:, :, None] * prow[:, None, j:]) % p
        A[idx] = sub
        rank[idx] += 1
    return rank, rhs_pivot


# --- search context (built once per process) -------------------------------


class _Context:
    def __init__(self, problem: SearchProblem):
        spec, F = problem.spec, problem.field
        self.problem = problem
        self.spec = spec
        self.n = spec.order
        self.coords = spec.coords_array()
        self.mods = np.array(spec.moduli, dtype=np.int64)
        self.weights = spec.weights()
        self.maps = symmetry_maps(problem)
        self.tables = _map_tables(spec, self.maps)
        self.cyclo = F.backend == "cyclo"
        self.phi = euler_phi(F.e)
        self._rank_fields = [F] if not self.cyclo else []
        b_idx = np.array(problem.B.indices(), dtype=np.int64)
        self.b_idx = b_idx
        not_b = np.setdiff1d(np.arange(self.n), b_idx)
        self.not_b = not_b
        e = F.e
        scale = np.array([e // m for m in spec.moduli], dtype=np.int64)
        # character exponents: psi_a(x) = omega_e^E with E = sum (e/m_i) a_i x_i
        self.primal_exp = (self.coords[b_idx] * scale) @ self.coords.T % e  # |B| x n
        self._cx_not_b = (self.coords * scale)[not_b]
        self._dual_exp = None

    @property
    def dual_exp(self):
        # n x |G - B| exponents of psi_a(-x), built on first use
        if self._dual_exp is None:
            e = self.problem.field.e
            self._dual_exp = (-(self.coords @ self._cx_not_b.T)) % e
        return self._dual_exp

    def rank_fields(self, rho: int) -> list:
        """Prime fields whose joint rank decides rank over the problem's field.

        fp: the field itself. cyclo: every rho x rho minor d lies in Z[zeta]
        and all its conjugates satisfy |d| <= rho^(rho/2) (Hadamard, entries
        are roots of unity, 0 or +-1), so |N(d)| <= rho^(rho phi(e) / 2). A
        nonzero d vanishes modulo split primes q_1..q_K only if their product
        divides N(d), so once prod q_i exceeds the bound the largest modular
        rank equals the rank over Q(zeta_e).
        """
        if not self.cyclo:
            return self._rank_fields
        bits = rho * self.phi * math.log2(rho) / 2 if rho > 1 else 0.0
        need = int(bits // math.log2(CERT_PRIME_FLOOR)) + 1
        while len(self._rank_fields) < need:
            prev = self._rank_fields[-1].p if self._rank_fields else None
            self._rank_fields.append(certificate_prime_field(self.problem.field.e, after=prev))
        return self._rank_fields[:need]

    def mode(self, t: int) -> str:
        nb = len(self.b_idx)
        k = self.n - nb
        primal = nb * t * min(nb, t + 1)
        dual = (self.n - t) * (k + 1) * min(self.n - t, k + 1)
        return "dual" if dual < primal else "primal"

    def canonical_mask(self, T: np.ndarray, translations: bool) -> np.ndarray:
        """True where the row (a sorted index tuple) is its orbit's representative."""
        N, t = T.shape
        G = self.tables.shape[0]
        keep = np.ones(N, dtype=bool)
        if G == 1 and not translations:
            return keep
        step = max(1, _CANON_CELLS // max(1, G * t))
        shifts = range(t) if translations else [None]
        for s0 in range(0, N, step):
            live = np.arange(s0, min(N, s0 + step))
            for j in shifts:
                # survivors shrink quickly, so recompute on the live rows only
                Ts = T[live]
                if j is None:
                    D = Ts
                else:
                    Cs = self.coords[Ts]
                    D = ((Cs - Cs[:, j:j + 1, :]) % self.mods) @ self.weights
                X = self.tables[:, D]  # G x live x t
                X.sort(axis=2)
                diff = X != Ts[None]
                first = diff.argmax(axis=2)
                anyd = diff.any(axis=2)
                xv = np.take_along_axis(X, first[:, :, None], axis=2)[:, :, 0]
                tv = np.take_along_axis(np.broadcast_to(Ts[None], X.shape), first[:, :, None],
                                        axis=2)[:, :, 0]
                less = (anyd & (xv < tv)).any(axis=0)
                keep[live[less]] = False
                live = live[~less]
                if live.size == 0:
                    break
        return keep

    def batch_feasible(self, T: np.ndarray) -> np.ndarray:
        """Exact feasibility of each support row over the problem's field."""
        N, t = T.shape
        if self.mode(t) == "primal":
            E = self.primal_exp[:, T].transpose(1, 0, 2)  # N x |B| x t
            rhs = np.zeros((N, E.shape[1], 1), dtype=np.int64)
            rhs[:, 0, 0] = 1
        else:
            mask = np.ones((N, self.n), dtype=bool)
            mask[np.arange(N)[:, None], T] = False
            U = np.nonzero(mask)[1].reshape(N, self.n - t)
            E = self.dual_exp[U]  # N x (n - t) x k
            rhs = -np.ones((N, E.shape[1], 1), dtype=np.int64)
        rows, cols = E.shape[1], E.shape[2]
        rho = min(rows, cols + 1)
        rank_m = np.zeros(N, dtype=np.int64)
        rank_a = np.zeros(N, dtype=np.int64)
        for Fq in self.rank_fields(rho):
            zeta = np.array(Fq.zeta_table(), dtype=np.int64)
            A = np.concatenate([zeta[E], rhs % Fq.p], axis=2)
            rk, piv = batch_rank_test(A, Fq.p)
            rank_m = np.maximum(rank_m, rk)
            rank_a = np.maximum(rank_a, rk + piv)
        return rank_a == rank_m

    def exact_feasible(self, row) -> Optional[Spectrum]:
        pr = self.problem
        T = [element_of(self.spec, int(i)) for i in row]
        return feasible_support(self.spec, pr.field, T, pr.B)


_CTX_CACHE = {}


def _context(problem: SearchProblem) -> _Context:
    # workers receive a fresh copy of the problem per chunk, so key by content
    key = json.dumps(problem.to_json(), sort_keys=True)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        _CTX_CACHE.clear()
        ctx = _Context(problem)
        _CTX_CACHE[key] = ctx
    return ctx


# --- enumeration --------------------------------------------------------------


def _level_layout(n: int, t: int, translations: bool):
    """(pool start, number of free elements k, leading fixed elements) for level t."""
    if translations:
        return 1, t - 1, (0,)
    return 0, t, ()


def _first_offsets(n: int, start: int, k: int) -> list:
    """offsets[j - start] = lex rank of the first combo whose first element is j."""
    out, acc = [], 0
    for j in range(start, n):
        out.append(acc)
        acc += math.comb(n - 1 - j, k - 1)
    out.append(acc)
    return out


def _iter_chunk(n, start, k, j0, j1, block):
    """Yield (rank0, array of combos) in lex order for first element in [j0, j1)."""
    if k == 0:
        yield 0, np.zeros((1, 0), dtype=np.int64)
        return

    def gen():
        for j in range(j0, j1):
            for rest in itertools.combinations(range(j + 1, n), k - 1):
                yield (j,) + rest

    it = gen()
    pos = 0
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, block)),
                           dtype=np.int64)
        if flat.size == 0:
            return
        arr = flat.reshape(-1, k)
        yield pos, arr
        pos += arr.shape[0]


@dataclass
class _ChunkOutcome:
    status: str  # witness | done | limit
    tests: int
    witness_row: Optional[tuple] = None
    witness_rank: Optional[int] = None
    last_rank: int = -1
    spectrum: Optional[Spectrum] = None


def _scan_chunk(problem: SearchProblem, t: int, j0: int, j1: int, base_rank: int,
                limit: int, skip_through: int = -1) -> _ChunkOutcome:
    ctx = _context(problem)
    n = ctx.n
    start, k, lead = _level_layout(n, t, problem.translations)
    tests = 0
    last_rank = -1
    block = 8192
    for pos, combos in _iter_chunk(n, start, k, j0, j1, block):
        ranks = base_rank + pos + np.arange(combos.shape[0])
        T = np.concatenate([np.zeros((combos.shape[0], len(lead)), dtype=np.int64), combos], axis=1)
        sel = ranks > skip_through
        if not sel.all():
            T, ranks = T[sel], ranks[sel]
            if T.shape[0] == 0:
                continue
        canon = ctx.canonical_mask(T, problem.translations)
        T, ranks = T[canon], ranks[canon]
        if T.shape[0] == 0:
            continue
        over = False
        if tests + T.shape[0] > limit:
            cut = limit - tests
            T, ranks = T[:cut], ranks[:cut]
            over = True
        if T.shape[0]:
            feas = ctx.batch_feasible(T)
            hits = np.nonzero(feas)[0]
            if hits.size:
                i = int(hits[0])
                spec_w = ctx.exact_feasible(T[i])
                if spec_w is None:
                    raise VerificationError("modular rank test and exact solve disagree")
                return _ChunkOutcome("witness", tests + i + 1, tuple(int(v) for v in T[i]),
                                     int(ranks[i]), int(ranks[i]), spec_w)
            tests += T.shape[0]
            last_rank = int(ranks[-1])
        if over:
            return _ChunkOutcome("limit", tests, last_rank=last_rank)
    return _ChunkOutcome("done", tests, last_rank=last_rank)


def _chunk_plan(n: int, t: int, translations: bool, target: int) -> list:
    """Contiguous ranges [j0, j1) of the first free element, with rank offsets."""
    start, k, _ = _level_layout(n, t, translations)
    if k == 0:
        return [(start, start + 1, 0)]
    offs = _first_offsets(n, start, k)
    out = []
    j0 = start
    while j0 < n - k + 1:
        j1 = j0 + 1
        while j1 < n - k + 1 and offs[j1 - start] - offs[j0 - start] < target:
            j1 += 1
        out.append((j0, j1, offs[j0 - start]))
        j0 = j1
    return out


def _worker_scan(args):
    problem, t, j0, j1, base, limit, skip = args
    return _scan_chunk(problem, t, j0, j1, base, limit, skip)


def level_size(n: int, t: int, translations: bool) -> int:
    _, k, _ = _level_layout(n, t, translations)
    start = 1 if translations else 0
    return math.comb(n - start, k)


def estimate_tests(problem: SearchProblem, t: int, group_size: int) -> int:
    """Rough count of canonical supports at level t (orbit count heuristic)."""
    raw = level_size(problem.spec.order, t, problem.translations)
    div = group_size * (t if problem.translations else 1)
    return -(-raw // div)


def level_cells(problem: SearchProblem, t: int, group_size: int) -> int:
    raw = level_size(problem.spec.order, t, problem.translations)
    shifts = t if problem.translations else 1
    return raw * group_size * shifts * t


# --- driver -----------------------------------------------------------------


def min_sparsity(problem: SearchProblem) -> SearchResult:
    t0 = time.perf_counter()
    ctx = _context(problem)
    n = ctx.n
    G = len(ctx.maps)
    result = SearchResult("exhausted", symmetry_group_size=G)
    used = 0
    resume_t, resume_rank = -1, -1
    if problem.resume:
        resume_t = int(problem.resume["t"])
        resume_rank = int(problem.resume["last_rank"])

    pool = None
    try:
        for t in range(problem.t_min, problem.t_max + 1):
            if t < resume_t:
                continue
            skip = resume_rank if t == resume_t else -1
            if problem.precheck:
                if used + estimate_tests(problem, t, G) > problem.budget:
                    return _abort(result, problem, t, skip, used, t0,
                                  "estimated enumeration exceeds the budget")
                if level_cells(problem, t, G) > CELLS_PER_TEST * problem.budget:
                    return _abort(result, problem, t, skip, used, t0,
                                  "canonical filtering work exceeds the budget")
            plan = _chunk_plan(n, t, problem.translations, target=50000)
            tests_t = 0
            outcome = None
            if pool is None and problem.workers > 1 and len(plan) > 1:
                # started on first need, so workers fork with the context already built
                import multiprocessing as mp

                if any(ctx.mode(u) == "dual" for u in range(t, problem.t_max + 1)):
                    _ = ctx.dual_exp
                pool = ProcessPoolExecutor(max_workers=problem.workers,
                                           mp_context=mp.get_context("fork"))
            if pool is None or len(plan) == 1:
                for j0, j1, base in plan:
                    oc = _scan_chunk(problem, t, j0, j1, base, problem.budget - used, skip)
                    used += oc.tests
                    tests_t += oc.tests
                    if oc.status != "done":
                        outcome = oc
                        break
            else:
                outcome, used, tests_t = _parallel_level(pool, problem, t, plan, used, skip)
            if outcome is not None and outcome.status == "limit":
                result.refuted_canonical_subsets[t] = tests_t
                result.tests = used
                return _abort(result, problem, t, outcome.last_rank, used, t0,
                              "feasibility-test budget exhausted")
            if outcome is not None and outcome.status == "witness":
                result.refuted_canonical_subsets[t] = tests_t - 1
                result.tests = used
                w = outcome.spectrum
                if not is_delta_on(inverse(w), problem.B):
                    raise VerificationError("witness failed re-verification")
                result.status = "found"
                result.witness = w
                result.min_t = w.sparsity
                result.wall_time = time.perf_counter() - t0
                return result
            result.refuted_canonical_subsets[t] = tests_t
        result.tests = used
        result.wall_time = time.perf_counter() - t0
        return result
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _parallel_level(pool, problem, t, plan, used, skip):
    """Run a level's chunks on the pool and merge them in rank order."""
    window = 2 * problem.workers
    futures = {}
    tests_t = 0
    nxt = 0
    i = 0
    while i < len(plan):
        while nxt < len(plan) and nxt < i + window:
            j0, j1, base = plan[nxt]
            futures[nxt] = pool.submit(_worker_scan, (problem, t, j0, j1, base, problem.budget, skip))
            nxt += 1
        oc = futures.pop(i).result()
        remaining = problem.budget - used
        if oc.tests > remaining or oc.status == "limit":
            # rerun with the exact remaining allowance to locate the abort rank
            j0, j1, base = plan[i]
            oc = _scan_chunk(problem, t, j0, j1, base, remaining, skip)
        used += oc.tests
        tests_t += oc.tests
        if oc.status != "done":
            for f in futures.values():
                f.cancel()
            return oc, used, tests_t
        i += 1
    return None, used, tests_t


def _abort(result, problem, t, last_rank, used, t0, why):
    result.status = "aborted"
    result.tests = used
    result.progress = {"problem": problem.to_json(), "t": t, "last_rank": int(last_rank),
                       "reason": why}
    result.wall_time = time.perf_counter() - t0
    return result


def run_or_raise(problem: SearchProblem) -> SearchResult:
    res = min_sparsity(problem)
    if res.status == "aborted":
        raise BudgetExceededError(res.progress["reason"], res.progress)
    return res


def hypercube_problem(moduli, F: Field, kind: str = "hypercube", **kw) -> SearchProblem:
    spec = GroupSpec(tuple(moduli))
    return SearchProblem(spec, F, point_set(spec, kind), **kw)
