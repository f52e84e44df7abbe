"""``abext`` command line.

Exit codes: 0 success, 1 error, 2 inconclusive interval verdict.
Reports go to stdout as JSON (sorted keys) or TSV for bulk enumeration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import asymptotics, stats, viability
from .counting import CountingFunctionError, counting_by_name, fairness
from .enumeration import EnumerationBudgetError, EnumerationQuery, enumeration_rows, fast_count
from .groups import FiniteAbelianGroup, GroupSizeError, parse_group
from .units import INF, LocalSpec, level_cap, local_characters

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class SpecFileError(ValueError):
    pass


# --- argument helpers -----------------------------------------------------------


def parse_bound(text: str) -> int:
    """'1e5', '100000', '1.6e6' -> exact positive integer."""
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if d != d.to_integral_value() or d < 1:
        raise argparse.ArgumentTypeError(f"bounds must be positive integers, got {text!r}")
    return int(d)


def parse_bounds(text: str) -> list:
    return [parse_bound(t) for t in text.split(",") if t.strip()]


def thread_count(args) -> int:
    """Accepted for interface stability; work runs serially and output never depends on it."""
    n = args.threads if getattr(args, "threads", None) else int(os.environ.get("ABEXT_THREADS", "1") or 1)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    return n


# --- spec files -----------------------------------------------------------------

_ELEMENT = {"type": "array", "items": {"type": "integer"}}
SPEC_FILE_SCHEMA = {
    "type": "object",
    "properties": {
        "group": _ELEMENT,
        "specs": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "p": {"type": "integer", "minimum": 2},
                    "infinity": _ELEMENT,
                    "level": {"type": "integer", "minimum": 0},
                    "images": {"type": "array", "items": _ELEMENT},
                    "frob": _ELEMENT,
                    "event": {"enum": ["ramified", "unramified", "split"]},
                },
                "additionalProperties": False,
            },
        },
    },
    "required": ["specs"],
    "additionalProperties": False,
}


def spec_to_json(s: LocalSpec) -> dict:
    return s.to_json()


def _spec_from_entry(G: FiniteAbelianGroup, d: dict, where: str):
    if "infinity" in d:
        extra = set(d) - {"infinity"}
        if extra:
            raise SpecFileError(f"{where}: the infinite place takes no {sorted(extra)}")
        x = _element(G, d["infinity"], f"{where}.infinity")
        if G.element_order(x) > 2:
            raise SpecFileError(f"{where}.infinity: the value at -1 must have order <= 2")
        return LocalSpec(G, INF, None, x)
    if "p" not in d:
        raise SpecFileError(f"{where}: needs 'p' or 'infinity'")
    p = d["p"]
    from .primes import is_prime

    if not is_prime(p):
        raise SpecFileError(f"{where}.p: {p} is not prime")
    if "event" in d:
        extra = set(d) - {"p", "event"}
        if extra:
            raise SpecFileError(f"{where}: an event entry takes no {sorted(extra)}")
        return {"ramified": stats.ramified_at, "unramified": stats.unramified_at,
                "split": stats.split_completely}[d["event"]](p)
    if "frob" not in d:
        raise SpecFileError(f"{where}: missing 'frob'")
    frob = _element(G, d["frob"], f"{where}.frob")
    level = d.get("level", 0)
    images = d.get("images", [])
    if level == 0:
        if images:
            raise SpecFileError(f"{where}.images: must be empty at level 0")
        return LocalSpec(G, p, None, frob)
    cap = level_cap(G, p)
    if level > cap:
        raise SpecFileError(f"{where}.level: {level} exceeds the largest possible conductor exponent {cap}")
    imgs = tuple(_element(G, a, f"{where}.images[{i}]") for i, a in enumerate(images))
    for c in local_characters(G, p, level):
        if c.images == imgs:
            return LocalSpec(G, p, c, frob)
    raise SpecFileError(f"{where}.images: not a character of conductor exponent {level} at {p}")


def _element(G: FiniteAbelianGroup, v, where: str):
    if len(v) != G.rank:
        raise SpecFileError(f"{where}: expected {G.rank} coordinates, got {len(v)}")
    return G.reduce(v)


def parse_spec_text(text: str, G: FiniteAbelianGroup | None = None, source: str = "<spec>") -> tuple:
    """-> (group, [LocalSpec | PlaceEvent, ...]) with places distinct."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFileError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if isinstance(data, list):
        data = {"specs": data}
    err = next(iter(sorted(jsonschema.Draft7Validator(SPEC_FILE_SCHEMA).iter_errors(data),
                           key=lambda e: list(e.absolute_path))), None)
    if err is not None:
        path = ".".join(str(x) for x in err.absolute_path) or "<root>"
        raise SpecFileError(f"{source}: {path}: {err.message}")
    if "group" in data:
        FG = FiniteAbelianGroup(tuple(data["group"]))
        if G is not None and FG != G:
            raise SpecFileError(f"{source}: group {list(FG.factors)} differs from --group {list(G.factors)}")
        G = FG
    if G is None:
        raise SpecFileError(f"{source}: no group given (use --group or a 'group' field)")
    out, seen = [], set()
    for i, d in enumerate(data["specs"]):
        where = f"{source}: specs[{i}]"
        s = _spec_from_entry(G, d, where)
        if s.place in seen:
            raise SpecFileError(f"{where}: duplicate place {s.place}")
        seen.add(s.place)
        out.append(s)
    return G, out


def parse_spec_file(path, G: FiniteAbelianGroup | None = None) -> tuple:
    p = Path(path)
    if not p.exists():
        raise SpecFileError(f"{path}: no such file")
    return parse_spec_text(p.read_text(), G, str(path))


def specs_only(items, what: str) -> dict:
    out = {}
    for s in items:
        if not isinstance(s, LocalSpec):
            raise SpecFileError(f"{what} needs full local specs, not event shorthands")
        out[s.place] = s
    return out


# --- output ---------------------------------------------------------------------


def schema(name: str) -> dict:
    return json.loads(resources.files("abext").joinpath("schemas", f"{name}.json").read_text())


def emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _fmt(x):
    return str(x) if isinstance(x, Fraction) else x


# --- subcommands ----------------------------------------------------------------


def _counting(args):
    G = parse_group(args.group)
    return G, counting_by_name(G, args.counting)


def _require_fair(C, args) -> None:
    rep = fairness(C)
    if not rep.fair and not getattr(args, "allow_unfair", False):
        raise ValueError(f"{C.name} is unfair on {list(C.group.factors)} (witness r={rep.witness}); "
                         "theory targets do not apply. Pass --allow-unfair for empirical output")


def cmd_enumerate(args, out) -> int:
    G, C = _counting(args)
    rows = enumeration_rows(EnumerationQuery(G, C, args.bound), args.budget)
    if args.format == "tsv":
        out.write("C\tconductor\tdiscriminant\tsupport\tcharacter\n")
        for v, f, d, supp, ser, _ in rows:
            out.write(f"{v}\t{f}\t{d}\t{','.join(map(str, supp))}\t{ser}\n")
    else:
        emit({"group": list(G.factors), "counting": C.name, "bound": args.bound, "total": len(rows),
              "characters": [{"C": v, "conductor": f, "discriminant": d, "support": list(supp), "character": ser}
                             for v, f, d, supp, ser, _ in rows]}, out)
    return EXIT_OK


def cmd_count(args, out) -> int:
    G, C = _counting(args)
    t = fast_count(EnumerationQuery(G, C, args.bound), bucket_width=args.bucket)
    d = {"group": list(G.factors), "counting": C.name, "bound": args.bound, "total": t.total}
    if args.tally:
        d["tally"] = [[v, c] for v, c in t.as_dict().items()]
        d["bucket_width"] = args.bucket
    emit(d, out)
    return EXIT_OK


def _place_target(C, ev):
    allw = stats.event_weight(C, stats.PlaceEvent(ev.place, "all", lambda u, f: True))
    return stats.event_weight(C, ev) / allw


def probability_target(C, events, given):
    """Product of per-place weight shares; None when the place 2 carries the obstruction."""
    if stats._s0_flag(C, events) or (given and stats._s0_flag(C, given)):
        return None
    t = Fraction(1)
    for e in events:
        t = t * _place_target(C, e)
    return t


def cmd_probs(args, out) -> int:
    G, C = _counting(args)
    _require_fair(C, args)
    G, ev = parse_spec_file(args.spec, G)
    given = parse_spec_file(args.given, G)[1] if args.given else []
    bounds = sorted(set(args.bounds))
    est = stats.conditional_probability(C, bounds[-1], ev, given, bounds)
    target = probability_target(C, stats.as_event(ev), given) if fairness(C).fair else None
    rows, errs = [], []
    for X, a, b in est.schedule:
        val = Fraction(a, b) if b else None
        rows.append({"bound": X, "numerator": a, "denominator": b, "probability": _fmt(val)})
        errs.append(None if target is None else stats._rel(val, target))
    emit({"kind": "probability", "group": list(G.factors), "counting": C.name, "fair": fairness(C).fair,
          "empirical": rows, "target": None if target is None else _fmt(target),
          "relative_error": errs, "trend": stats._trend(errs) if target is not None else "no-target"}, out)
    return EXIT_OK


def cmd_cheb(args, out) -> int:
    G, C = _counting(args)
    _require_fair(C, args)
    emit(stats.chebotarev_report(C, args.bounds, args.prime), out)
    return EXIT_OK


def cmd_indep(args, out) -> int:
    G, C = _counting(args)
    _require_fair(C, args)
    _, e1 = parse_spec_file(args.spec1, G)
    _, e2 = parse_spec_file(args.spec2, G)
    emit(stats.independence_report(C, args.bounds, e1, e2), out)
    return EXIT_OK


def cmd_ratio(args, out) -> int:
    G, C = _counting(args)
    _require_fair(C, args)
    _, e1 = parse_spec_file(args.spec1, G)
    _, e2 = parse_spec_file(args.spec2, G)
    emit(stats.ratio_report(C, args.bounds, e1, e2), out)
    return EXIT_OK


def cmd_constant(args, out) -> int:
    G, C = _counting(args)
    rep = asymptotics.leading_constant(C, args.truncation, mode=args.mode)
    emit(rep.to_json(), out)
    return EXIT_OK


def cmd_discprob(args, out) -> int:
    res = asymptotics.disc_prob_s1(args.p, args.q, args.truncation, wild=args.wild)
    d = res.to_json()
    d["tail_enclosure"] = asymptotics.tail_enclosure(args.p, args.truncation).to_json()
    d["verdict_text"] = {"below": f"below 1/{args.p ** 2}", "above": f"above 1/{args.p ** 2}",
                         "inconclusive": "inconclusive"}[res.verdict]
    if args.empirical_bound:
        est = asymptotics.empirical_disc_prob(args.p, args.q, args.empirical_bound)
        d["empirical"] = {"bound": est.bound, "numerator": est.numerator, "denominator": est.denominator,
                          "probability": str(est.value), "scaled": float(est.value * args.p ** 2)}
    emit(d, out)
    return EXIT_INCONCLUSIVE if res.verdict == "inconclusive" else EXIT_OK


def cmd_viability(args, out) -> int:
    G = parse_group(args.group)
    if args.list_at_2:
        rows = viability.viable_specs_at_2(G, args.search_bound)
        emit({"group": list(G.factors), "search_bound": args.search_bound,
              "obstruction": viability.e_group(G).to_json(), "Sp": viability.sp(G),
              "specs": [r.to_json() for r in rows]}, out)
        return EXIT_OK
    if not args.spec:
        raise ValueError("--spec or --list-at-2 is required")
    G, items = parse_spec_file(args.spec, G)
    specs = specs_only(items, "viability")
    d = {"group": list(G.factors), "specs": [s.to_json() for s in specs.values()],
         "obstruction": viability.e_group(G).to_json()}
    if args.exact:
        d["exact"] = "viable" if viability.viable_partial(G, specs) else "inviable"
    d["search"] = viability.viability_search(G, specs, args.search_bound).to_json()
    emit(d, out)
    return EXIT_OK


def cmd_fairness(args, out) -> int:
    if args.max_order:
        rows = []
        for G in groups_up_to(args.max_order):
            row = {"group": list(G.factors), "exponent": G.exponent}
            for name in ("conductor", "radical", "discriminant"):
                row[name] = fairness(counting_by_name(G, name)).verdict
            rows.append(row)
        emit({"max_order": args.max_order, "table": rows}, out)
        return EXIT_OK
    G, C = _counting(args)
    rep = fairness(C)
    emit({"group": list(G.factors), "counting": C.name, "verdict": rep.verdict, "m": rep.m,
          "witness": rep.witness, "minimal_weight_elements": sorted(list(g) for g in rep.frakM)}, out)
    return EXIT_OK


def groups_up_to(n: int) -> list:
    """Every finite abelian group of order <= n, in invariant-factor form n1 | n2 | ..."""
    out = []

    def chains(left, prev, prefix):
        if left == 1:
            out.append(FiniteAbelianGroup(tuple(prefix)))
            return
        for d in range(2, left + 1):
            # later factors are multiples of d, so d must divide what is left after it
            if left % d == 0 and d % prev == 0 and (left // d) % d == 0 or d == left and d % prev == 0:
                chains(left // d, d, prefix + [d])

    for order in range(2, n + 1):
        chains(order, 1, [])
    return out


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abext", description="Abelian extensions of Q as characters: "
                                 "enumeration, local statistics, constants, viability.")
    ap.add_argument("--threads", type=int, default=None, help="worker count (default $ABEXT_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    def group_counting(p, counting=True):
        p.add_argument("--group", required=True, help="comma-separated cyclic factor orders, e.g. 2,4")
        if counting:
            p.add_argument("--counting", default="conductor", help="conductor|radical|discriminant|artin:<file>")

    p = sub.add_parser("enumerate", help="list characters with C < bound")
    group_counting(p)
    p.add_argument("--bound", type=parse_bound, required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--budget", type=int, default=None, help="fail if more characters than this")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("count", help="number of characters with C < bound (sieve)")
    group_counting(p)
    p.add_argument("--bound", type=parse_bound, required=True)
    p.add_argument("--bucket", type=int, default=1)
    p.add_argument("--tally", action="store_true", help="include the per-value tally")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("probs", help="empirical probability of local specs")
    group_counting(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--given", default=None)
    p.add_argument("--bounds", type=parse_bounds, required=True)
    p.add_argument("--allow-unfair", action="store_true")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("cheb", help="splitting-type frequencies at a fixed prime")
    group_counting(p)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--bounds", type=parse_bounds, default=[10 ** 5, 10 ** 6])
    p.add_argument("--allow-unfair", action="store_true")
    p.set_defaults(func=cmd_cheb)

    for name, func, text in (("indep", cmd_indep, "independence defect of two events"),
                             ("ratio", cmd_ratio, "ratio of two event probabilities")):
        p = sub.add_parser(name, help=text)
        group_counting(p)
        p.add_argument("--spec1", required=True)
        p.add_argument("--spec2", required=True)
        p.add_argument("--bounds", type=parse_bounds, required=True)
        p.add_argument("--allow-unfair", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("constant", help="certified leading constant")
    group_counting(p)
    p.add_argument("--truncation", type=parse_bound, default=10 ** 6)
    p.add_argument("--mode", choices=("accelerated", "direct"), default="accelerated")
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("discprob", help="Z/p^2 discriminant split-completely verdict")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--truncation", type=parse_bound, default=10 ** 5)
    p.add_argument("--wild", choices=asymptotics.WILD_MODES, default="exact")
    p.add_argument("--empirical-bound", type=parse_bound, default=None)
    p.set_defaults(func=cmd_discprob)

    p = sub.add_parser("viability", help="local-global viability of local specs")
    group_counting(p, counting=False)
    p.add_argument("--spec", default=None)
    p.add_argument("--search-bound", type=parse_bound, default=10 ** 5)
    p.add_argument("--exact", action="store_true", help="also run the exact obstruction test")
    p.add_argument("--list-at-2", action="store_true", help="classify every spec at 2")
    p.set_defaults(func=cmd_viability)

    p = sub.add_parser("fairness", help="fairness of a counting function")
    p.add_argument("--group", default=None)
    p.add_argument("--counting", default="conductor")
    p.add_argument("--max-order", type=int, default=None, help="table over all groups up to this order")
    p.set_defaults(func=cmd_fairness)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        thread_count(args)
        if args.command == "fairness" and not args.max_order and not args.group:
            raise ValueError("fairness needs --group or --max-order")
        return args.func(args, out)
    except (SpecFileError, CountingFunctionError, GroupSizeError, EnumerationBudgetError,
            ValueError, ZeroDivisionError, ArithmeticError, OSError) as e:
        print(f"abext: error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
