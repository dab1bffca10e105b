"""Command line entry point.

Exit codes: 0 computed, 1 input error, 2 infeasible request.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cover import DeckGroup, NonGenerating, abelian_cover, build_cover
from .experiments import (
    DEFAULT_WINDOW,
    InfeasibleStage2,
    InsufficientGenerators,
    NotARelation,
    SpanAccumulator,
    check_null_lift_nonseparating,
    config_hash,
    counterexample_certificate,
    is_prime,
    reproduce_all,
    separating_probe,
    span_by_depth,
)
from .mcg import enumerate_simple_curves, read_curves, write_curves
from .words import SurfacePresentation, format_word

FILTERS = {"nonsep": "nonsep", "sep": "sep", "both": "both"}


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def emit(payload, args) -> None:
    if isinstance(payload, str):
        text = payload
    elif args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=False)
    else:
        text = render_text(payload)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cover_from_args(args):
    if getattr(args, "group", None):
        gspec = json.loads(Path(args.group).read_text(encoding="utf-8"))
        grp = DeckGroup.from_permutations(gspec["images"], gspec.get("min_generators"))
        return build_cover(SurfacePresentation(args.genus), grp)
    return abelian_cover(args.genus, args.m)


def _check_genus(args) -> list:
    if args.genus < 2:
        raise ValueError("genus must be >= 2")
    notes = []
    if args.genus < 3:
        notes.append("genus 2: the general question concerns genus >= 3; torus and sphere are excluded")
    m = getattr(args, "m", None)
    if m is not None and not getattr(args, "group", None) and not is_prime(m):
        notes.append(f"m={m} is not prime; the construction assumes a prime m")
    return notes


def cmd_cover_build(args):
    notes = _check_genus(args)
    cover = _cover_from_args(args)
    if args.format == "text" and args.out:
        Path(args.out).write_text(cover.to_text(), encoding="utf-8")
        print(json.dumps(cover.stats()))
        return
    payload = {"config": {"genus": args.genus, "m": args.m}, "cover": cover.stats(),
               "h1": cover.h1_quotient_data(), "disclaimers": notes}
    emit(payload, args)


def cmd_curves_enumerate(args):
    _check_genus(args)
    curves = enumerate_simple_curves(args.genus, args.depth, FILTERS[args.filter])
    if args.format == "text":
        if args.out:
            write_curves(curves, args.out)
        else:
            for c in curves:
                prov = ",".join(c.provenance) or "-"
                print(f"{format_word(c.letters)}  # seed={c.seed} type={c.topo_type} path={prov}")
        return
    emit({"config": {"genus": args.genus, "depth": args.depth, "filter": args.filter},
          "count": len(curves),
          "curves": [{"word": format_word(c.letters), "type": c.topo_type,
                      "seed": c.seed, "path": list(c.provenance)} for c in curves]}, args)


def cmd_span_report(args):
    notes = _check_genus(args)
    cover = _cover_from_args(args)
    config = {"operation": "span report", "genus": args.genus, "m": args.m,
              "depth": args.depth, "filter": args.filter, "window": args.window,
              "curves_file": args.curves}
    probes = [separating_probe(cover)]
    if args.curves:
        curves = read_curves(args.curves, args.genus)
        acc = SpanAccumulator(cover)
        for c in curves:
            acc.add_curve(c.word)
        report = acc.report(probes)
        census = {"curves": len(curves), "source": args.curves}
        saturation = None
    else:
        run = span_by_depth(cover, FILTERS[args.filter], args.depth, args.window, probes)
        report = run.report
        curves = run.curves
        census = {"curves": len(curves),
                  "by_depth": [{"depth": r.depth, "new": r.new_curves, "grew": r.grew}
                               for r in run.records]}
        saturation = run.saturated_at
        notes.append("depth saturation is a heuristic stop" if saturation is not None
                     else f"span not stable over {args.window} depths by depth {args.depth}")
    payload = {
        "config": config,
        "config_hash": config_hash(config),
        "cover": cover.stats(),
        "curve_census": census,
        "saturated_at": saturation,
        "verdict": report.verdict,
        "invariant_factors": report.invariant_factors,
        "rank_defect": report.rank_defect,
        "span_rank": report.span_rank,
        "rational_equal": report.rational_equal,
        "witnesses": report.witnesses,
        "curves": [format_word(c.letters) for c in curves],
        "disclaimers": notes,
    }
    emit(payload, args)


def cmd_null_lift(args):
    notes = _check_genus(args)
    cover = _cover_from_args(args)
    cert = check_null_lift_nonseparating(cover, args.depth)
    d = cert.to_dict()
    d["disclaimers"] = d["disclaimers"] + notes
    emit(d, args)


def cmd_counterexample(args):
    if args.m1 < 2:
        raise ValueError("m1 must be >= 2")
    if args.genus < 2:
        raise ValueError("genus must be >= 2")
    cert = counterexample_certificate(args.genus, args.m1, args.m2, args.depth,
                                      literal=args.literal, max_depth=args.max_depth,
                                      window=args.window)
    emit(cert.to_dict(), args)


def cmd_reproduce(args):
    emit(reproduce_all(args.max_depth, args.window), args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liftspan", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="group_cmd", required=True)

    def common(sp, m=True):
        sp.add_argument("--genus", type=int, default=2)
        if m:
            sp.add_argument("--m", type=int, default=2)
            sp.add_argument("--group", help="JSON file with permutation images of the generators")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "text"], default="json")

    cover = sub.add_parser("cover").add_subparsers(dest="cmd", required=True)
    sp = cover.add_parser("build")
    common(sp)
    sp.set_defaults(func=cmd_cover_build)

    curves = sub.add_parser("curves").add_subparsers(dest="cmd", required=True)
    sp = curves.add_parser("enumerate")
    common(sp, m=False)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--filter", choices=list(FILTERS), default="both")
    sp.set_defaults(func=cmd_curves_enumerate)

    span = sub.add_parser("span").add_subparsers(dest="cmd", required=True)
    sp = span.add_parser("report")
    common(sp)
    sp.add_argument("--depth", type=int, default=6, help="maximum orbit depth")
    sp.add_argument("--filter", choices=list(FILTERS), default="nonsep")
    sp.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sp.add_argument("--curves", help="curve file (word syntax per line) instead of an orbit")
    sp.set_defaults(func=cmd_span_report)

    lemma = sub.add_parser("lemma").add_subparsers(dest="cmd", required=True)
    sp = lemma.add_parser("null-lift")
    common(sp)
    sp.add_argument("--depth", type=int, default=2)
    sp.set_defaults(func=cmd_null_lift)

    certify = sub.add_parser("certify").add_subparsers(dest="cmd", required=True)
    sp = certify.add_parser("counterexample")
    common(sp, m=False)
    sp.add_argument("--m1", type=int, default=2)
    sp.add_argument("--m2", type=int, default=3)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--max-depth", type=int, default=6)
    sp.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sp.add_argument("--literal", action="store_true",
                    help="request the literal composed cover (always infeasible)")
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("reproduce")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json", "text"], default="json")
    sp.add_argument("--max-depth", type=int, default=6)
    sp.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InfeasibleStage2 as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 2
    except (ValueError, NonGenerating, NotARelation, InsufficientGenerators,
            FileNotFoundError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
