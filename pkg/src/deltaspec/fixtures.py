"""Deterministic fixture grid.

``run_fixtures`` recomputes a fixed set of small results and returns them
as one JSON-ready dict. The output depends only on the seed: worker count
and timing never leak into it.
"""

from __future__ import annotations

import json
import math
import os
from functools import reduce

from .constructions import consecutive_blocks, lower_bounds, partitioned, single_block
from .covering import covering_number_exact
from .decoding import canonical_set, min_decoding_sparsity, trivial_decoding, verify_decoding
from .fields import PrimeField, field_for, make_prime_field
from .fourier import delta_identity_check, inverse, is_delta_on
from .groups import GroupSpec, point_set
from .mobius import check_certificate, mobius_multilinear, random_triples
from .pir import pir_table
from .search import SearchProblem, min_sparsity

BOUNDS = [(7,), (3, 3), (3, 3, 3), (2, 3, 5), (4, 4, 4), (5, 5)]
SINGLE = [(3, 2), (4, 3), (5, 2), (7, 3)]
PARTITIONED = [(3, 4, [2, 2]), (3, 6, [2, 2, 2]), (4, 6, [3, 3])]
COVERING = [(3,), (3, 3), (3, 3, 3), (2, 3), (4, 4), (2, 3, 5)]
SEARCH = [
    ((2, 2), "hypercube", "fp"),
    ((2, 2, 2), "hypercube", "fp"),
    ((3, 3), "hypercube", "cyclo"),
    ((2, 3), "hypercube", "cyclo"),
    ((2, 5), "hypercube", "cyclo"),
    ((3, 5), "hypercube", "cyclo"),
    ((3, 3, 3), "hypercube", "fp"),
    ((2, 3, 5), "hypercube", "fp"),
    ((5, 5), "pm_cube", "fp"),
    ((5, 5), "pm_cube", "cyclo"),
    ((7, 7), "pm_cube", "fp"),
]
DECODING_M = [6, 15, 30]


def _field(moduli, backend):
    return field_for(reduce(math.lcm, moduli), backend)


def _construction_entry(s, seed):
    return {
        "sparsity": s.sparsity,
        "verified": is_delta_on(inverse(s), point_set(s.spec, "hypercube")),
        "identity_check": delta_identity_check(s, trials=20, seed=seed),
        "spectrum": s.to_json(),
    }


def run_fixtures(seed: int = 0, workers: int = 1) -> dict:
    out = {"seed": seed}
    out["bounds"] = [lower_bounds(GroupSpec(m)).to_json() for m in BOUNDS]

    cons = []
    for m, r in SINGLE:
        s = single_block(m, r, make_prime_field(m))
        cons.append({"method": "single", "m": m, "r": r, **_construction_entry(s, seed)})
    for m, r, sizes in PARTITIONED:
        s = partitioned(m, r, consecutive_blocks(sizes), make_prime_field(m))
        cons.append({"method": "partition", "m": m, "r": r, "blocks": sizes,
                     **_construction_entry(s, seed)})
    out["constructions"] = cons

    cov = []
    for mods in COVERING:
        F, S = covering_number_exact(GroupSpec(mods))
        cov.append({"moduli": list(mods), "F": F, "witness": [list(x) for x in S]})
    out["covering"] = cov

    res = []
    for mods, kind, backend in SEARCH:
        spec = GroupSpec(mods)
        prob = SearchProblem(spec, _field(mods, backend), point_set(spec, kind), workers=workers)
        res.append({"moduli": list(mods), "set": kind, "backend": backend,
                    "result": min_sparsity(prob).to_json()})
    out["search"] = res

    dec = []
    for m in DECODING_M:
        P = trivial_decoding(m, make_prime_field(m))
        dec.append({"m": m, "canonical": canonical_set(m).to_json(),
                    "trivial": P.to_json(), "trivial_verified": verify_decoding(P)})
    out["decoding"] = dec
    out["min_decoding"] = [
        min_decoding_sparsity(6, field_for(6, "cyclo"), workers=workers).to_json(),
        min_decoding_sparsity(15, PrimeField(31, 15), workers=workers).to_json(),
    ]

    certs = []
    for a, b in random_triples(3, 5, 20, seed):
        c = mobius_multilinear(3, 5, a, b)
        certs.append({"a": a, "b": b, "case": c.case, "ok": check_certificate(c, 3, 5, a, b)})
    out["mobius"] = certs

    out["pir"] = [p.to_json() for p in pir_table(2, 10 ** 6, range(1, 5))]
    out["pir"] += [p.to_json() for p in pir_table(3, 2 ** 64, range(1, 6))]
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_fixtures(data: dict, directory: str) -> list:
    """One file per section; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for key in sorted(data):
        if key == "seed":
            continue
        path = os.path.join(directory, f"{key}.json")
        with open(path, "w") as fh:
            fh.write(dumps({"seed": data["seed"], key: data[key]}))
        paths.append(path)
    return paths
