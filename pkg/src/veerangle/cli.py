"""Command-line entry point: ``veerangle <subcommand> ...``.

Exit status 0 on success, 1 on a domain error (bad gluings, non-veering
input, ...), 2 on a usage error.  Reports are JSON on standard output.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import report
from .bundles import MonodromyWord, WordError, bundle, corpus
from .cusp import CuspError
from .holonomy import (
    HolonomyError,
    exotic_taut,
    ladderpole_holonomy,
    ladderpole_holonomy_transverse,
    rung_holonomy,
    rung_holonomy_transverse,
)
from .pipeline import check_triangulation, passed
from .rescue import RescueError, bounded_rescue, cover_and_average, rescue_all
from .triangulation import (
    TautStructure,
    TriangulationError,
    check_angle_vector,
    enumerate_taut_structures,
    parse_triangulation,
    serialize_triangulation,
)
from .veering import VeeringError, color_edges, mirror_veering, veering_data

DOMAIN_ERRORS = (TriangulationError, VeeringError, CuspError, RescueError, HolonomyError, WordError)


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return text, parse_triangulation(text)


def _taut_for(tri, override=None) -> TautStructure:
    """The file's taut structure, or the first veering one found by search."""
    if override is not None:
        return TautStructure(tuple(override))
    if tri.taut is not None:
        return TautStructure(tuple(tri.taut))
    for taut in enumerate_taut_structures(tri):
        try:
            color_edges(tri, taut)
            return taut
        except VeeringError:
            continue
    raise VeeringError("no veering taut structure on this triangulation")


def _veering(args):
    text, tri = _load(args.file)
    return text, veering_data(tri, _taut_for(tri, args.taut))


def cmd_validate(args) -> dict:
    text, tri = _load(args.file)
    body = {"valid": True, "triangulation": report.triangulation_summary(tri)}
    if tri.taut is not None:
        check = check_angle_vector(tri, TautStructure(tuple(tri.taut)).angles())
        body["taut_check"] = {"classification": check.classification, "violations": list(check.violations)}
    return report.envelope("validate", text, body)


def cmd_taut_search(args) -> dict:
    text, tri = _load(args.file)
    rows = []
    for taut in enumerate_taut_structures(tri):
        try:
            color_edges(tri, taut)
            veer = True
        except VeeringError:
            veer = False
        rows.append({"taut": list(taut.pi_pair), "veering": veer,
                     "mirror_veering": mirror_veering(tri, taut) and not veer})
    return report.envelope("taut-search", text, {"count": len(rows), "structures": rows})


def cmd_veering_check(args) -> dict:
    text, V = _veering(args)
    return report.envelope("veering-check", text, report.veering_json(V))


def cmd_ladders(args) -> dict:
    text, V = _veering(args)
    body = report.veering_json(V)
    body.update(report.ladders_json(V))
    return report.envelope("ladders", text, body)


def cmd_rescue(args) -> dict:
    text, V = _veering(args)
    return report.envelope("rescue", text, report.rescue_json(rescue_all(V)))


def cmd_bound(args) -> dict:
    text, V = _veering(args)
    if V.transverse is not None:
        theta, rep = bounded_rescue(V)
        averaged = False
    else:
        theta, rep = cover_and_average(V)
        averaged = True
    return report.envelope("bound", text, report.bound_json(theta, rep, averaged))


def cmd_holonomy(args) -> dict:
    text, V = _veering(args)
    ntori = len(V.cusp.components)
    J = args.J if args.J is not None else list(range(ntori))
    kind = args.construction
    if kind == "rung":
        res = rung_holonomy(V, args.signs or [1] * ntori)
    elif kind == "rung-transverse":
        res = rung_holonomy_transverse(V, J, args.sign)
    elif kind == "ladderpole":
        res = ladderpole_holonomy(V, args.orient)
    else:
        res = ladderpole_holonomy_transverse(V, J, args.orient)
    body = {"construction": kind}
    body.update(report.holonomy_json(res))
    return report.envelope("holonomy", text, body)


def cmd_exotic(args) -> dict:
    text, V = _veering(args)
    a, b = exotic_taut(V)
    return report.envelope("exotic", text, {"input": list(V.taut.pi_pair),
                                            "exotic": [list(a.pi_pair), list(b.pi_pair)]})


def cmd_bundle_gen(args) -> dict | None:
    tri, taut = bundle(MonodromyWord(args.word), negate=args.negate)
    text = serialize_triangulation(tri, taut)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        return report.envelope("bundle-gen", None, {"written": args.out,
                                                    "triangulation": report.triangulation_summary(tri)})
    sys.stdout.write(text + "\n")
    return None


def cmd_cusp_svg(args) -> dict:
    text, V = _veering(args)
    if not 0 <= args.torus < len(V.cusp.components):
        raise UsageError(f"torus index {args.torus} out of range")
    Path(args.svg).write_text(report.cusp_svg(V, args.torus), encoding="utf-8")
    return report.envelope("cusp-svg", text, {"written": args.svg, "torus": args.torus})


def _check_word(item):
    word, negate = item
    return check_triangulation(*bundle(MonodromyWord(word), negate=negate))


def cmd_corpus_check(args) -> dict:
    words = [str(w) for w in corpus(args.max_len, args.seed)]
    items = [(w, neg) for w in words for neg in ((False, True) if args.both_signs else (False,))]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_check_word, items, chunksize=8))
    else:
        results = [_check_word(it) for it in items]
    rows = []
    for (w, neg), res in zip(items, results):
        rows.append({"word": ("-" if neg else "") + w, "pass": passed(res), "checks": res})
    failures = [r["word"] for r in rows if not r["pass"]]
    return report.envelope("corpus-check", None, {
        "max_len": args.max_len, "seed": args.seed, "count": len(rows),
        "failures": failures, "table": rows,
    })


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="veerangle", description="Angle structures on veering triangulations.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="tri-json triangulation")
        sp.set_defaults(fn=fn)
        return sp

    def with_taut(sp):
        sp.add_argument("--taut", type=_int_list, default=None,
                        help="pi-pair per tetrahedron, overriding the file")
        return sp

    with_file("validate", cmd_validate, "check gluing data and any taut structure")
    with_file("taut-search", cmd_taut_search, "list all taut structures")
    with_taut(with_file("veering-check", cmd_veering_check, "color edges and classify hinges"))
    with_taut(with_file("ladders", cmd_ladders, "ladder decomposition of each cusp"))
    with_taut(with_file("rescue", cmd_rescue, "deform to a positive angle structure"))
    with_taut(with_file("bound", cmd_bound, "positive structure with the certified minimum angle"))
    sp = with_taut(with_file("holonomy", cmd_holonomy, "holonomy-changing constructions"))
    sp.add_argument("--construction", default="rung",
                    choices=["rung", "rung-transverse", "ladderpole", "ladderpole-transverse"])
    sp.add_argument("--signs", type=_int_list, help="per-cusp signs for the rung construction")
    sp.add_argument("--sign", type=int, default=1, choices=[1, -1], help="ladder type for rung-transverse")
    sp.add_argument("--J", type=_int_list, help="cusp subset for the transverse constructions")
    sp.add_argument("--orient", type=_int_list, help="per-cusp ladderpole orientations")
    with_taut(with_file("exotic", cmd_exotic, "the two exotic taut structures"))

    sp = sub.add_parser("bundle-gen", help="layered triangulation of a punctured-torus bundle")
    sp.add_argument("word", help="monodromy word over R and L")
    sp.add_argument("--negate", action="store_true", help="compose the monodromy with -I")
    sp.add_argument("--out", help="write tri-json here instead of standard output")
    sp.set_defaults(fn=cmd_bundle_gen)

    sp = with_taut(with_file("cusp-svg", cmd_cusp_svg, "schematic picture of a cusp"))
    sp.add_argument("--svg", required=True, help="output path")
    sp.add_argument("--torus", type=int, default=0)

    sp = sub.add_parser("corpus-check", help="run every check over the bundle corpus")
    sp.add_argument("--max-len", type=int, default=10)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--both-signs", action="store_true", help="also check the negated monodromies")
    sp.set_defaults(fn=cmd_corpus_check)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = args.fn(args)
    except UsageError as exc:
        print(f"veerangle: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        body = {"error": type(exc).__name__, "message": str(exc)}
        loc = getattr(exc, "location", None)
        if loc is not None:
            body["location"] = list(loc) if isinstance(loc, tuple) else loc
        print(report.dumps(report.envelope(args.command, None, body)))
        return 1
    if doc is not None:
        print(report.dumps(doc))
    if args.command == "corpus-check" and doc["failures"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
