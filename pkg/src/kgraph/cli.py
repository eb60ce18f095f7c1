"""Command-line front end.

Exit codes: 0 success, 1 validation failure (or a failed oracle check),
2 unmet precondition (e.g. the oracle on a graph that is not stably finite),
3 unreadable input, bad arguments or an unknown command.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import classify, construct, oracle
from .core import (
    Ambiguous,
    FormatError,
    KGraph,
    ValidationError,
    export_dot,
    infer_squares,
    parse_skeleton,
    serialize_skeleton,
    validate,
)
from .cycles import lattice_string
from .paths import NotStablyFinite


class UsageError(Exception):
    pass


@dataclass
class CommandOutcome:
    exit_code: int
    report: object | None = None
    stdout: str = ""
    diagnostics: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> _Parser:
    p = _Parser(prog="kgraph", description="Analyse finite locally convex k-graphs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    for name, helptext in (("check", "validate a skeleton file"),
                           ("structure", "print the structure of the algebra"),
                           ("cofinal", "decide cofinality"),
                           ("export-dot", "render the skeleton in DOT"),
                           ("infer-squares", "add the forced squares and print the skeleton")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("file", help="skeleton file, or - for standard input")

    for name in ("analyze", "sr", "simplicity"):
        sp = sub.add_parser(name)
        sp.add_argument("file")
        sp.add_argument("--periodicity-bound", type=int, default=None,
                        help="bound on each entry of the periodicity search (default 2|vertices|)")
        if name == "analyze":
            sp.add_argument("--format", choices=("text", "machine"), default="text")

    sp = sub.add_parser("oracle", help="build the matrix model and check the relations")
    sp.add_argument("file")
    sp.add_argument("--dump-rep", action="store_true")
    sp.add_argument("--unit-cap", type=int, default=oracle.MATRIX_UNIT_CAP)

    cons = sub.add_parser("construct", help="build an example graph")
    csub = cons.add_subparsers(dest="family", parser_class=_Parser)
    c = csub.add_parser("ln")
    c.add_argument("n", type=int)
    c = csub.add_parser("flower")
    c.add_argument("loops", type=int, nargs="+")
    c = csub.add_parser("product")
    c.add_argument("left")
    c.add_argument("right")
    c = csub.add_parser("pullback")
    c.add_argument("--matrix", required=True, help='rows separated by ";", entries by ",", e.g. "1,1"')
    c.add_argument("file")
    c = csub.add_parser("coordinate")
    c.add_argument("file")
    c.add_argument("color", type=int)
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str) -> KGraph:
    return validate(parse_skeleton(_read(path)))


def _bound(g: KGraph, value: int | None):
    return None if value is None else (value,) * g.k


def _deg(d) -> str:
    return "(" + ",".join(str(x) for x in d) + ")"


def _finding(f) -> str | None:
    if f is None:
        return None
    if isinstance(f, classify.Found):
        return f"found at {f.v}: m={_deg(f.m)}, n={_deg(f.n)}"
    if isinstance(f, classify.NoneUpToBound):
        return f"none up to {_deg(f.bound)}"
    return "none"


def machine_record(rep: classify.ClassificationReport) -> dict:
    ent = rep.entrance
    return {
        "stablyFinite": rep.stably_finite,
        "entrance": None if ent is None else {"vertex": ent.vertex, "color": ent.color, "edges": list(ent.edges),
                                              "cycle": list(ent.cycle.edges)},
        "cofinal": rep.cofinal,
        "cofinalWitness": None if rep.cofinal_witness is None else list(rep.cofinal_witness),
        "simplicity": rep.simplicity,
        "periodicity": _finding(rep.periodicity),
        "structure": None if rep.structure is None else str(rep.structure),
        "summands": None if rep.structure is None else [
            {"vertices": list(s.cls.vertices), "colors": list(s.cls.colors), "matrixSize": s.matrix_size,
             "torusDim": s.torus_dim, "lattice": [list(r) for r in s.cls.lattice]}
            for s in rep.structure.summands],
        "stableRank": rep.stable_rank.token(),
        "properlyInfinite": rep.properly_infinite,
        "notes": rep.notes,
    }


def format_machine(rep: classify.ClassificationReport) -> str:
    return "".join(f"{key}={json.dumps(val, ensure_ascii=False)}\n" for key, val in machine_record(rep).items())


def format_text(g: KGraph, rep: classify.ClassificationReport) -> str:
    lines = [f"graph: k={g.k}, {len(g.vertices)} vertices, {len(g.edges)} edges, {len(g.skeleton.squares)} squares"]
    lines.append(f"stably finite: {'yes' if rep.stably_finite else 'no'}")
    if rep.entrance is None:
        lines.append("cycle with an entrance: none")
    else:
        e = rep.entrance
        lines.append(f"cycle with an entrance: at {e.vertex}, color {e.color}, edges {e.edges[0]} and {e.edges[1]}")
    if rep.cofinal:
        lines.append("cofinal: yes")
    else:
        lines.append(f"cofinal: no (H = {{{', '.join(rep.cofinal_witness)}}})")
    if rep.periodicity is not None:
        lines.append(f"local periodicity: {_finding(rep.periodicity)}")
    lines.append(f"simplicity: {rep.simplicity}")
    if rep.structure is not None:
        for i, s in enumerate(rep.structure.summands, 1):
            cols = "{" + ",".join(str(c) for c in s.cls.colors) + "}"
            lines.append(f"class {i}: vertices {{{', '.join(s.cls.vertices)}}}, colors {cols}, rank {s.torus_dim}, "
                         f"lattice {lattice_string(s.cls)}, matrix size {s.matrix_size}")
        lines.append(f"structure: {rep.structure}")
    if rep.properly_infinite is not None:
        lines.append(f"properly infinite: {'yes' if rep.properly_infinite else 'no'}")
    sr = rep.stable_rank
    tail = " (exact value open)" if isinstance(sr, classify.Bounds) else ""
    if isinstance(sr, classify.Unknown):
        tail = f" ({sr.note})"
    lines.append(f"sr = {sr.token()}{tail}")
    for note in rep.notes:
        if note != "exact value open":
            lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _verification_text(rep: oracle.VerificationReport) -> str:
    lines = []
    for name, check in rep.checks().items():
        status = "pass" if check.passed else f"FAIL ({check.counterexample})"
        lines.append(f"{name}: {status}")
    lines.append("degrees checked for CK4: " + ", ".join(_deg(d) for d in rep.degrees_checked))
    lines.extend(f"note: {n}" for n in rep.notes)
    lines.append("overall: " + ("pass" if rep.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _dispatch(args) -> CommandOutcome:
    cmd = args.command
    if cmd == "check":
        g = _load(args.file)
        return CommandOutcome(0, g, f"ok: k={g.k}, {len(g.vertices)} vertices, {len(g.edges)} edges\n")
    if cmd == "infer-squares":
        s = infer_squares(parse_skeleton(_read(args.file)))
        validate(s)
        return CommandOutcome(0, s, serialize_skeleton(s))
    if cmd == "export-dot":
        return CommandOutcome(0, None, export_dot(parse_skeleton(_read(args.file))))
    if cmd == "cofinal":
        g = _load(args.file)
        ok, h = classify.is_cofinal(g)
        return CommandOutcome(0, ok, "cofinal\n" if ok else f"not cofinal: H = {{{', '.join(h)}}}\n")
    if cmd == "structure":
        g = _load(args.file)
        try:
            desc = classify.structure(g)
        except NotStablyFinite:
            return CommandOutcome(2, None, "", "not stably finite: no matrix-over-torus decomposition exists\n")
        return CommandOutcome(0, desc, f"{desc}\n")
    if cmd in ("analyze", "sr"):
        g = _load(args.file)
        rep = classify.stable_rank(g, _bound(g, args.periodicity_bound))
        if cmd == "sr":
            return CommandOutcome(0, rep, rep.stable_rank.token() + "\n")
        text = format_machine(rep) if args.format == "machine" else format_text(g, rep)
        return CommandOutcome(0, rep, text)
    if cmd == "simplicity":
        g = _load(args.file)
        verdict = classify.simplicity(g, _bound(g, args.periodicity_bound))
        return CommandOutcome(0, verdict, verdict + "\n")
    if cmd == "oracle":
        g = _load(args.file)
        try:
            rep = oracle.build_representation(g)
        except NotStablyFinite:
            return CommandOutcome(2, None, "", "not stably finite: no finite matrix model exists\n")
        result = oracle.verify_ck(rep, unit_cap=args.unit_cap)
        out = _verification_text(result)
        if args.dump_rep:
            out = oracle.dump(rep) + out
        return CommandOutcome(0 if result.passed else 1, result, out)
    if cmd == "construct":
        fam = args.family
        if fam is None:
            raise UsageError("construct needs a family: ln, flower, product, pullback, coordinate")
        if fam == "ln":
            if args.n < 1:
                raise UsageError("ln needs n >= 1")
            g = construct.cycle_graph(args.n)
        elif fam == "flower":
            g = construct.flower(args.loops)
        elif fam == "product":
            g = construct.product(_load(args.left), _load(args.right))
        elif fam == "pullback":
            try:
                rows = tuple(tuple(int(x) for x in row.split(",")) for row in args.matrix.split(";"))
            except ValueError:
                raise UsageError(f"cannot read matrix {args.matrix!r}") from None
            g = construct.pullback(construct.MonoidMorphism(rows), _load(args.file))
        else:
            g = construct.coordinate_graph(_load(args.file), args.color)
        return CommandOutcome(0, g, serialize_skeleton(g.skeleton))
    raise UsageError("missing command")


def run(argv: Sequence[str]) -> CommandOutcome:
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError(parser.format_usage() + "kgraph: error: missing command")
        return _dispatch(args)
    except UsageError as exc:
        return CommandOutcome(3, None, "", f"{exc}\n")
    except FormatError as exc:
        return CommandOutcome(3, None, "", f"format error: {exc}\n")
    except ValidationError as exc:
        return CommandOutcome(1, exc, "", f"invalid k-graph: {exc}\n")
    except Ambiguous as exc:
        return CommandOutcome(1, exc, "", f"{exc}\n")
    except (construct.IncompatibleDimensions, construct.TooLarge) as exc:
        return CommandOutcome(2, None, "", f"{exc}\n")


def main(argv: Sequence[str] | None = None) -> int:
    outcome = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.diagnostics)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
