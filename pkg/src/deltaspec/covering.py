"""Exact covering number F(m_1, ..., m_r) by branch and bound.

F is the least |S| with S + H = G where H = prod (Z_{m_i} - {0}). Point
sets are Python ints used as bitsets over the index encoding.
"""

from __future__ import annotations

import numpy as np

from .constructions import covering_recursion
from .errors import BudgetExceededError, PreconditionError
from .groups import GroupSpec, element_of

DEFAULT_ORDER_CAP = 4096
DEFAULT_NODE_BUDGET = 2_000_000


def punctured_box(spec: GroupSpec) -> np.ndarray:
    """Indices of H = prod (Z_m - {0})."""
    coords = spec.coords_array()
    return np.nonzero((coords != 0).all(axis=1))[0]


def _rows_to_ints(bits: np.ndarray) -> list:
    packed = np.packbits(bits, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _translate_masks(spec: GroupSpec, H: np.ndarray) -> list:
    """masks[s] = bitset of s + H."""
    coords = spec.coords_array()
    mods = np.array(spec.moduli, dtype=np.int64)
    w = spec.weights()
    n = spec.order
    idx = ((coords[:, None, :] + coords[H][None, :, :]) % mods) @ w  # n x |H|
    bits = np.zeros((n, n), dtype=np.uint8)
    bits[np.arange(n)[:, None], idx] = 1
    return _rows_to_ints(bits)


def covering_number_exact(spec: GroupSpec, order_cap: int = DEFAULT_ORDER_CAP,
                          node_budget: int = DEFAULT_NODE_BUDGET):
    """(F, witness S as a sorted list of elements)."""
    n = spec.order
    if n > order_cap:
        raise PreconditionError(f"order {n} exceeds the covering cap {order_cap}")
    H = punctured_box(spec)
    h = len(H)
    masks = _translate_masks(spec, H)
    full = (1 << n) - 1
    lower = covering_recursion(tuple(sorted(spec.moduli)))

    # x lies in s + H exactly when s lies in x - H, so the owner sets of x
    # are the columns of the translate matrix; by symmetry owners(x) = x - H
    coords = spec.coords_array()
    mods = np.array(spec.moduli, dtype=np.int64)
    w = spec.weights()
    neg_h = (-coords[H]) % mods
    own = ((coords[:, None, :] + neg_h[None, :, :]) % mods) @ w
    obits = np.zeros((n, n), dtype=np.uint8)
    obits[np.arange(n)[:, None], own] = 1
    owner_bits = _rows_to_ints(obits)

    # greedy incumbent, starting from 0 (any cover can be translated to contain 0)
    covered, chosen = masks[0], [0]
    while covered != full:
        free = full & ~covered
        best_s = max(range(n), key=lambda s: ((masks[s] & free).bit_count(), -s))
        chosen.append(best_s)
        covered |= masks[best_s]
    best = [len(chosen), sorted(chosen)]
    nodes = [0]

    def dfs(cov, sel, banned):
        # banned: translates already explored by an earlier sibling branch
        if best[0] == lower:
            return
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetExceededError(
                "covering search exceeded its node budget",
                {"moduli": list(spec.moduli), "nodes": node_budget, "incumbent": best[0],
                 "lower_bound": lower})
        if cov == full:
            if len(sel) < best[0]:
                best[0], best[1] = len(sel), sorted(sel)
            return
        free = full & ~cov
        if len(sel) + 1 >= best[0]:
            return
        # most constrained uncovered point, and the best single-step gain
        x_best, x_opts = -1, None
        gain = 0
        f = free
        while f:
            low = f & -f
            x = low.bit_length() - 1
            f ^= low
            opts = owner_bits[x] & ~banned
            c = opts.bit_count()
            if c == 0:
                return
            if x_opts is None or c < x_opts.bit_count():
                x_best, x_opts = x, opts
        a = ~banned & ((1 << n) - 1)
        while a:
            low = a & -a
            s = low.bit_length() - 1
            a ^= low
            g = (masks[s] & free).bit_count()
            if g > gain:
                gain = g
        if len(sel) + -(-free.bit_count() // gain) >= best[0]:
            return
        cands = []
        o = x_opts
        while o:
            low = o & -o
            s = low.bit_length() - 1
            o ^= low
            cands.append((-(masks[s] & free).bit_count(), s))
        cands.sort()
        ban = banned
        for _, s in cands:
            dfs(cov | masks[s], sel + [s], ban)
            if best[0] == lower:
                return
            ban |= 1 << s

    # 0 is in the cover; translating by -s maps any cover onto one containing 0
    dfs(masks[0], [0], 1)
    witness = [element_of(spec, s) for s in best[1]]
    return best[0], witness


def covers(spec: GroupSpec, S) -> bool:
    """sumset(S, H) == G, checked directly."""
    H = [element_of(spec, int(i)) for i in punctured_box(spec)]
    got = {spec.add(s, x) for s in S for x in H}
    return len(got) == spec.order
