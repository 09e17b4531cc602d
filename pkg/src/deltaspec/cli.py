"""deltaspec command line.

JSON (sorted keys) is the canonical output; ``--format text`` renders a
short summary from the same data and ``--format csv`` is available for
the tabular commands (bounds, pir). Exit codes: 0 ok, 2 precondition,
3 budget exceeded, 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from functools import reduce

from . import fixtures as fx
from .constructions import (best_block_partition, block_delta, consecutive_blocks, lower_bounds,
                            partitioned, single_block)
from .covering import covering_number_exact
from .decoding import (DecodingPolynomial, canonical_set, delta_to_poly, min_decoding_sparsity,
                       poly_to_delta, trivial_decoding, verify_decoding)
from .errors import DeltaError, PreconditionError
from .fields import PrimeField, field_for
from .fourier import Spectrum, delta_identity_check, inverse, is_delta_on
from .groups import POINT_SET_KINDS, GroupSpec, point_set
from .mobius import check_certificate, mobius_multilinear, random_triples, verify_r2_lower
from .pir import pir_table
from .search import SearchProblem, min_sparsity

TABULAR = ("bounds", "pir")


class UsageError(PreconditionError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the precondition exit code instead of argparse's default 2 + exit
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _big_int(text: str) -> int:
    """Integers as 1000000, 10^6, 2**64 or 1e6."""
    t = text.replace("**", "^").strip()
    try:
        if "^" in t:
            b, k = t.split("^")
            return int(b) ** int(k)
        if "e" in t.lower():
            b, k = t.lower().split("e")
            return int(b) * 10 ** int(k)
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def _global_options(p, suppress=False):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("json", "text", "csv"), default=d("json"))
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized trials")
    p.add_argument("--workers", type=int, default=d(1), help="search worker processes")
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="include wall-clock times (breaks byte-identical output)")


def _field_options(p, default="fp"):
    p.add_argument("--backend", choices=("fp", "cyclo"), default=default)
    p.add_argument("--p", type=int, default=None, help="prime for the fp backend")


def _make_field(args, e: int):
    if args.backend == "fp" and args.p is not None:
        return PrimeField(args.p, e)
    if args.p is not None:
        raise UsageError("--p only applies to the fp backend")
    return field_for(e, args.backend)


def _moduli(args) -> tuple:
    m, r = getattr(args, "m", None), getattr(args, "r", None)
    if args.moduli is not None:
        if m is not None or r is not None:
            raise UsageError("give either --moduli or --m/--r, not both")
        mods = tuple(args.moduli)
    elif m is not None and r is not None:
        mods = (m,) * r
    else:
        raise UsageError("--moduli is required")
    if not mods:
        raise UsageError("--moduli is empty")
    return mods


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltaspec", description="Fourier-sparse delta functions on prod Z_m")
    _global_options(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    _global_options(common, suppress=True)

    p = sub.add_parser("bounds", parents=[common], help="lower bounds and best construction")
    p.add_argument("--moduli", type=_int_list, action="append", required=True,
                   help="repeat for a sweep")
    p.add_argument("--exact-covering", action="store_true",
                   help="also compute the covering number by branch and bound")

    p = sub.add_parser("construct", parents=[common], help="build and verify a delta")
    p.add_argument("--moduli", type=_int_list)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--method", choices=("single", "partition", "best"), required=True)
    p.add_argument("--blocks", type=_int_list, help="block sizes for --method partition")
    _field_options(p)

    p = sub.add_parser("search", parents=[common], help="exhaustive minimum sparsity")
    p.add_argument("--moduli", type=_int_list)
    p.add_argument("--set", choices=POINT_SET_KINDS, default="hypercube")
    p.add_argument("--points", help="JSON list of elements for --set custom")
    _field_options(p, default="cyclo")
    p.add_argument("--min-t", type=int, default=1)
    p.add_argument("--max-t", type=int)
    p.add_argument("--budget", type=int, help="feasibility-test cap (default DELTASPEC_BUDGET)")
    p.add_argument("--no-permutations", action="store_true")
    p.add_argument("--no-scaling", action="store_true")
    p.add_argument("--no-galois", action="store_true")
    p.add_argument("--no-translations", action="store_true")
    p.add_argument("--no-precheck", action="store_true",
                   help="enumerate even when the estimate exceeds the budget")
    p.add_argument("--resume", help="progress file from an aborted run")
    p.add_argument("--progress-file", help="where to write progress on abort")

    p = sub.add_parser("covering", parents=[common], help="exact covering number F")
    p.add_argument("--moduli", type=_int_list, required=True)
    p.add_argument("--node-budget", type=int, default=2_000_000)
    p.add_argument("--order-cap", type=int, default=4096)

    p = sub.add_parser("decode", parents=[common], help="S-decoding polynomials")
    dsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = dsub.add_parser("canonical", parents=[common])
    d.add_argument("--m", type=int, required=True)
    d = dsub.add_parser("trivial", parents=[common])
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--gamma-power", type=int, default=1)
    _field_options(d)
    d = dsub.add_parser("verify", parents=[common])
    d.add_argument("--file", required=True, help="polynomial JSON ('-' for stdin)")
    d = dsub.add_parser("convert", parents=[common])
    d.add_argument("--file", required=True, help="polynomial or spectrum JSON ('-' for stdin)")
    d.add_argument("--gamma-power", type=int, default=1)
    d = dsub.add_parser("min-sparsity", parents=[common])
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--budget", type=int)
    d.add_argument("--gamma-power", type=int, default=1)
    _field_options(d, default="cyclo")

    p = sub.add_parser("mobius", parents=[common], help="sparsity >= 4 on Z_m1 x Z_m2")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--budget", type=int)

    p = sub.add_parser("pir", parents=[common], help="PIR parameter shapes")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=_big_int, required=True)
    p.add_argument("--t", type=_int_list, help="server counts (default 1..r+2)")

    p = sub.add_parser("fixtures", parents=[common], help="deterministic fixture grid")
    fsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    f = fsub.add_parser("run", parents=[common])
    f.add_argument("--out", help="directory for one JSON file per section")
    return parser


# --- commands -----------------------------------------------------------------


def cmd_bounds(args):
    rows = []
    for mods in args.moduli:
        if not mods:
            raise UsageError("--moduli is empty")
        rep = lower_bounds(GroupSpec(tuple(mods))).to_json()
        if args.exact_covering:
            rep["covering_exact"] = covering_number_exact(GroupSpec(tuple(mods)))[0]
        rows.append(rep)
    return rows[0] if len(rows) == 1 else rows


def cmd_construct(args):
    mods = _moduli(args)
    spec = GroupSpec(mods)
    F = _make_field(args, reduce(math.lcm, mods))
    if args.method == "partition" and not args.blocks:
        raise UsageError("--method partition needs --blocks")
    if args.method != "partition" and args.blocks:
        raise UsageError("--blocks only applies to --method partition")
    if args.method in ("single", "partition") and len(set(mods)) != 1:
        raise UsageError(f"--method {args.method} needs equal moduli; use --method best")
    m, r = mods[0], len(mods)
    if args.method == "single":
        s = single_block(m, r, F)
        blocks = [list(range(r))]
    elif args.method == "partition":
        blocks = consecutive_blocks(args.blocks)
        s = partitioned(m, r, blocks, F)
    else:
        _, blocks = best_block_partition(spec)
        s = block_delta(spec, blocks, F)
    ok = is_delta_on(inverse(s), point_set(spec, "hypercube"))
    ident = delta_identity_check(s, seed=args.seed)
    return {"method": args.method, "blocks": [list(b) for b in blocks], "sparsity": s.sparsity,
            "verified": ok and ident, "spectrum": s.to_json()}


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise PreconditionError(f"cannot read {path}: {exc}") from exc


def _load_object(path: str):
    """A polynomial or spectrum, also unwrapped from our own command outputs."""
    obj = _load_json(path)
    if isinstance(obj, dict):
        for key in ("polynomial", "spectrum", "witness"):
            if isinstance(obj.get(key), dict):
                return obj[key]
    return obj


def _parse(loader, obj, what):
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise PreconditionError(f"malformed {what} JSON: {exc!r}") from exc


def _write_json(path: str, obj):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(json.dumps(obj, sort_keys=True) + "\n")
    os.replace(tmp, path)


def cmd_search(args):
    budget = args.budget
    if args.resume:
        prog = _load_json(args.resume)
        if args.moduli is not None:
            raise UsageError("--resume takes the problem from the progress file")
        if isinstance(prog, dict) and isinstance(prog.get("progress"), dict):
            prog = prog["progress"]  # the aborted result itself
        prob = _parse(lambda o: SearchProblem.from_json(
            o["problem"], budget=budget, workers=args.workers, resume=o,
            precheck=not args.no_precheck), prog, "progress")
    else:
        if args.moduli is None:
            raise UsageError("--moduli is required")
        spec = GroupSpec(tuple(args.moduli))
        custom = None
        if args.set == "custom":
            if not args.points:
                raise UsageError("--set custom needs --points")
            custom = [tuple(x) for x in json.loads(args.points)]
        elif args.points:
            raise UsageError("--points only applies to --set custom")
        F = _make_field(args, reduce(math.lcm, spec.moduli))
        prob = SearchProblem(spec, F, point_set(spec, args.set, custom),
                             t_min=args.min_t, t_max=args.max_t,
                             coordinate_permutations=not args.no_permutations,
                             coordinate_scaling=not args.no_scaling,
                             galois_scaling=False if args.no_galois else None,
                             translations=not args.no_translations,
                             budget=budget, workers=args.workers,
                             precheck=not args.no_precheck)
    res = min_sparsity(prob)
    out = res.to_json(args.timing)
    if res.status == "aborted":
        if args.progress_file:
            _write_json(args.progress_file, res.progress)
        return out, 3
    if res.witness is not None:
        # round trip through the file format before reporting
        back = Spectrum.from_json(json.loads(json.dumps(out["witness"])))
        if not (back.equals(res.witness) and is_delta_on(inverse(back), prob.B)):
            from .errors import VerificationError
            raise VerificationError("witness did not survive the JSON round trip")
    return out, 0


def cmd_covering(args):
    spec = GroupSpec(tuple(args.moduli))
    F, S = covering_number_exact(spec, order_cap=args.order_cap, node_budget=args.node_budget)
    return {"moduli": list(spec.moduli), "F": F, "witness": [list(x) for x in S],
            "recursion_bound": lower_bounds(spec).covering_bound}


def cmd_decode(args):
    act = args.action
    if act == "canonical":
        return canonical_set(args.m).to_json()
    if act == "trivial":
        P = trivial_decoding(args.m, _make_field(args, args.m), args.gamma_power)
        return {"polynomial": P.to_json(), "sparsity": P.sparsity, "verified": verify_decoding(P)}
    if act == "verify":
        P = _parse(DecodingPolynomial.from_json, _load_object(args.file), "polynomial")
        return {"m": P.m, "sparsity": P.sparsity, "verified": verify_decoding(P)}
    if act == "convert":
        obj = _load_object(args.file)
        if isinstance(obj, dict) and "terms" in obj:
            P = _parse(DecodingPolynomial.from_json, obj, "polynomial")
            s = poly_to_delta(P)
            hyper = is_delta_on(inverse(s), point_set(s.spec, "hypercube"))
            return {"spectrum": s.to_json(), "sparsity": s.sparsity, "hypercube_delta": hyper,
                    "decoding": verify_decoding(P)}
        s = _parse(Spectrum.from_json, obj, "spectrum")
        P = delta_to_poly(s, args.gamma_power)
        hyper = is_delta_on(inverse(s), point_set(s.spec, "hypercube"))
        return {"polynomial": P.to_json(), "sparsity": P.sparsity, "hypercube_delta": hyper,
                "decoding": verify_decoding(P)}
    res = min_decoding_sparsity(args.m, _make_field(args, args.m), budget=args.budget,
                                workers=args.workers, gamma_power=args.gamma_power)
    return res.to_json(args.timing), (3 if res.result.status == "aborted" else 0)


def cmd_mobius(args):
    exhausted = verify_r2_lower(args.m1, args.m2, budget=args.budget, workers=args.workers)
    passed = 0
    cases = {1: 0, 2: 0, 3: 0}
    for a, b in random_triples(args.m1, args.m2, args.trials, args.seed):
        c = mobius_multilinear(args.m1, args.m2, a, b)
        cases[c.case] += 1
        passed += check_certificate(c, args.m1, args.m2, a, b)
    ok = exhausted and passed == args.trials
    return {
        "m1": args.m1, "m2": args.m2,
        "exhaustive_no_3_sparse": exhausted,
        "trials": args.trials, "certificates_passed": passed,
        "cases": {str(k): v for k, v in cases.items()},
        "verdict": "no 3-sparse delta: verified" if ok else "FAILED",
    }, (0 if ok else 4)


def cmd_pir(args):
    ts = args.t or list(range(1, args.r + 3))
    return [p.to_json() for p in pir_table(args.r, args.n, ts)]


def cmd_fixtures(args):
    data = fx.run_fixtures(seed=args.seed, workers=args.workers)
    if args.out:
        fx.write_fixtures(data, args.out)
    return data


COMMANDS = {
    "bounds": cmd_bounds, "construct": cmd_construct, "search": cmd_search,
    "covering": cmd_covering, "decode": cmd_decode, "mobius": cmd_mobius, "pir": cmd_pir,
    "fixtures": cmd_fixtures,
}


# --- rendering ----------------------------------------------------------------


def _flat(d: dict, prefix="") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flat(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def render_csv(obj) -> str:
    rows = obj if isinstance(obj, list) else [obj]
    rows = [_flat(r) for r in rows]
    cols = sorted({k for r in rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _text_one(command, obj) -> str:
    if command == "bounds":
        s = (f"{obj['moduli']}: linear {obj['linear_bound']}, product {obj['product_bound']}, "
             f"covering {obj['covering_bound']}, max {obj['best_lower']}; "
             f"best known upper {obj['best_known_upper']} ({obj['best_known_construction']})")
        if "covering_exact" in obj:
            s += f"; exact covering number {obj['covering_exact']}"
        return s
    if command == "construct":
        return f"sparsity {obj['sparsity']}, {'verified' if obj['verified'] else 'NOT verified'}"
    if command == "mobius":
        return obj["verdict"]
    if command == "pir":
        return (f"t={obj['t']} servers, r={obj['r']}: needs >= {obj['required_servers']} "
                f"({'feasible' if obj['feasible'] else 'infeasible'}); ln k ~ {obj['log_k']}; "
                f"communication O(k), lower bound exp((ln n)^(1/t)) = "
                f"{obj['lower_bound_communication']} [{obj['label']}]")
    if command == "search" or (command == "decode" and "status" in obj):
        s = f"status {obj['status']}, min_t {obj['min_t']}"
        if obj.get("progress"):
            s += f", stopped at t={obj['progress']['t']} rank {obj['progress']['last_rank']}"
        return s
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(obj.items()))
    return json.dumps(obj, sort_keys=True)


def render(command, obj, fmt) -> str:
    if fmt == "json":
        if command == "fixtures":
            return fx.dumps(obj)
        return json.dumps(obj, sort_keys=True) + "\n"
    if fmt == "csv":
        if command not in TABULAR:
            raise UsageError(f"csv output is only available for {', '.join(TABULAR)}")
        return render_csv(obj)
    if isinstance(obj, list) and command in TABULAR:
        return "\n".join(_text_one(command, o) for o in obj) + "\n"
    return _text_one(command, obj) + "\n"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be positive")
        out = COMMANDS[args.command](args)
        code = 0
        if isinstance(out, tuple):
            out, code = out
        if args.format == "csv" and args.command not in TABULAR:
            raise UsageError(f"csv output is only available for {', '.join(TABULAR)}")
        sys.stdout.write(render(args.command, out, args.format))
        return code
    except DeltaError as exc:
        print(f"deltaspec: error: {exc}", file=sys.stderr)
        progress = getattr(exc, "progress", None)
        if progress is not None:
            print(json.dumps(progress, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except ZeroDivisionError as exc:
        print(f"deltaspec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
