"""Command line front end.  Exit status: 0 all checks pass, 1 violation, 2 bad input."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .collapse import MODES, collapse_key, compare_with_bruhat, quotient_poset, run_collapse, verify_conditions
from .coxeter import (CoxeterError, all_reduced_words, build_system, bruhat_interval, evaluate_word,
                      longest_element, parse_word, prefix_reflections, read_coxeter_file, reduced_word)
from .hecke import Face, deletion_pairs, demazure, min_long_braids, omittable_pairs
from .posets import check_cw_conditions, export_dot
from .tnn import cell_of, is_tnn, lusztig_eval, verify_fibers

OK, VIOLATION, INPUT_ERROR = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _system(args):
    if args.coxeter_file:
        return read_coxeter_file(args.coxeter_file)
    if args.type is None or args.rank is None:
        raise CoxeterError("give --type and --rank, or --coxeter-file")
    return build_system(f"{args.type}{args.rank}")


def _word(args, system):
    if args.word is None:
        raise CoxeterError("--word is required")
    return system.check_word(parse_word(args.word))


# --- subcommands -----------------------------------------------------------------

def cmd_build(args) -> int:
    system = _system(args)
    _emit(_dump({
        "name": system.name,
        "rank": system.rank,
        "coxeter_matrix": [list(r) for r in system.coxeter_matrix],
        "cartan_matrix": [list(r) for r in system.cartan],
        "positive_roots": len(system.positive_roots),
    }), args.out)
    return OK


def cmd_word(args) -> int:
    system = _system(args)
    word = _word(args, system)
    w, reduced = evaluate_word(system, word)
    out = {"word": list(word), "element": list(reduced_word(w)), "length": w.length, "reduced": reduced}
    if reduced:
        out["prefix_reflections"] = [list(reduced_word(t)) for t in prefix_reflections(system, word)]
    _emit(_dump(out), args.out)
    return OK


def cmd_hecke(args) -> int:
    system = _system(args)
    word = _word(args, system)
    face = Face.full(word)
    pairs = deletion_pairs(system, face)
    key = collapse_key(system, word, face)
    _emit(_dump({
        "word": list(word),
        "demazure": list(reduced_word(demazure(system, face))),
        "omittable_pairs": [list(p) for p in omittable_pairs(system, face)],
        "deletion_pairs": [{"pair": list(p), "long_braids": min_long_braids(system, face, p)} for p in pairs],
        "key": None if key is None else key.as_list(),
    }), args.out)
    return OK


def cmd_collapse(args) -> int:
    system = _system(args)
    word = _word(args, system)
    trace = run_collapse(system, word, args.mode)
    status = OK
    if args.trace:
        Path(args.trace).write_text(trace.to_json())
    summary = {
        "word": list(word),
        "mode": args.mode,
        "faces": len(trace.faces),
        "steps": len(trace.steps),
        "classes": len(trace.classes),
        "surviving_classes": len(trace.survivors),
        "off_schedule_sweeps": sum(len(s.off_schedule) for s in trace.steps),
    }
    if args.verify:
        report = verify_conditions(trace)
        summary["conditions"] = report.as_dict()
        if not report.ok:
            status = VIOLATION
        if args.mode == "full":
            problems = compare_with_bruhat(trace)
            summary["bruhat_isomorphic"] = not problems
            summary["bruhat_mismatches"] = problems
            if problems:
                status = VIOLATION
    _emit(_dump(summary), args.out)
    return status


def cmd_poset(args) -> int:
    system = _system(args)
    top, _ = evaluate_word(system, _word(args, system))
    if args.quotient:
        poset = quotient_poset(run_collapse(system, reduced_word(top)))
    else:
        bottom = system.identity
        if args.lower is not None:
            bottom, _ = evaluate_word(system, system.check_word(parse_word(args.lower)))
        poset = bruhat_interval(bottom, top)
    if args.dot:
        Path(args.dot).write_text(export_dot(poset))
    reports = check_cw_conditions(poset)
    _emit(_dump({
        "elements": len(poset),
        "covers": len(poset.covers),
        "reports": [r.as_dict() for r in reports],
    }), args.out)
    return OK if all(r.passed for r in reports) else VIOLATION


def cmd_tnn(args) -> int:
    system = _system(args)
    word = _word(args, system)
    n = system.rank + 1
    out: dict = {"word": list(word)}
    status = OK
    if args.params is not None:
        try:
            params = [Fraction(tok) for tok in args.params.split(",")] if args.params else []
        except ValueError:
            raise CoxeterError(f"malformed parameters {args.params!r}") from None
        m = lusztig_eval(word, params, n)
        out["matrix"] = [[str(x) for x in row] for row in m.rows]
        out["tnn"] = is_tnn(m)
        out["cell"] = list(reduced_word(cell_of(m, system)))
    if args.verify_fibers:
        report = verify_fibers(run_collapse(system, word), cap=args.cap)
        out["fibers"] = report.as_dict()
        if not report.ok:
            status = VIOLATION
    _emit(_dump(out), args.out)
    return status


def cmd_campaign(args) -> int:
    """Fixed verification battery writing traces and a report into one directory."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report: dict = {"collapse": [], "bruhat": [], "fibers": []}
    ok = True
    for name in ("A2", "A3"):
        system = build_system(name)
        for word in all_reduced_words(longest_element(system)):
            trace = run_collapse(system, word)
            tag = f"{name}_" + "".join(map(str, word))
            (out / f"trace_{tag}.json").write_text(trace.to_json())
            cond = verify_conditions(trace)
            mismatch = compare_with_bruhat(trace)
            fibers = verify_fibers(trace, cap=args.fiber_cap)
            ok &= cond.ok and not mismatch and fibers.ok
            report["collapse"].append({"system": name, "word": list(word), "conditions": cond.as_dict(),
                                       "surviving_classes": len(trace.survivors),
                                       "bruhat_mismatches": mismatch})
            report["fibers"].append({"system": name, "word": list(word), "ok": fibers.ok,
                                     "points": fibers.points_checked, "mismatches": fibers.mismatches})
    for name in ("A3", "B3"):
        system = build_system(name)
        poset = bruhat_interval(system.identity, longest_element(system))
        reports = check_cw_conditions(poset)
        ok &= all(r.passed for r in reports)
        report["bruhat"].append({"system": name, "elements": len(poset),
                                 "reports": [r.as_dict() for r in reports]})
        (out / f"bruhat_{name}.dot").write_text(export_dot(poset))
    report["ok"] = ok
    (out / "report.json").write_text(_dump(report))
    return OK if ok else VIOLATION


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpcollapse", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", help="Cartan type letter, e.g. A")
    common.add_argument("--rank", type=int)
    common.add_argument("--coxeter-file", help="file with n and then n rows of m(i,j)")
    common.add_argument("--word", help="comma-separated 1-based generator indices")
    common.add_argument("--out", help="write the JSON result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="validate a Coxeter system").set_defaults(func=cmd_build)
    sub.add_parser("word", parents=[common], help="evaluate a word").set_defaults(func=cmd_word)
    sub.add_parser("hecke", parents=[common], help="Demazure product and pairs").set_defaults(func=cmd_hecke)

    p = sub.add_parser("collapse", parents=[common], help="run the face collapses")
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--verify", action="store_true", help="check conditions and the quotient")
    p.add_argument("--trace", help="write the JSON trace here")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("poset", parents=[common], help="Bruhat interval or quotient checks")
    p.add_argument("--lower", help="lower end of the interval (default e)")
    p.add_argument("--quotient", action="store_true", help="use the collapse quotient of --word")
    p.add_argument("--dot", help="write the Hasse diagram here")
    p.set_defaults(func=cmd_poset)

    p = sub.add_parser("tnn", parents=[common], help="type A matrices and fiber checks")
    p.add_argument("--params", help="comma-separated rationals such as 1,1/2,3")
    p.add_argument("--verify-fibers", action="store_true")
    p.add_argument("--cap", type=int, default=25, help="grid points per face (0 for all)")
    p.set_defaults(func=cmd_tnn)

    p = sub.add_parser("campaign", help="full verification battery")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--fiber-cap", type=int, default=5)
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "cap", None) == 0:
        args.cap = None
    try:
        return args.func(args)
    except (CoxeterError, ValueError, ZeroDivisionError, OSError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
