"""Command line front end: read object files, run one operation, print a report.

Exit status is 0 on success, 1 when the mathematics fails (an invalid
object, an unsupported input) and 2 for unreadable or malformed files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import formats
from .adams import adams_cyclic_hom, adams_dihedral, generator_table
from .burnside import dihedral_idempotents, hasse_decompose, parse_expression, restrict
from .euler_of import FpModule, ModuleElement, ModuleError, module_tensor
from .exactlin import ChainCx, GradedVec, WChainCx, format_rat, homology
from .model_c import CObject, hom_set_c, tensor_c
from .model_d import DObject, SectionSpace, hom_ext, homology_d, tensor_d
from .model_t import (
    TObject, UnsupportedInput, ValidationError, cover, dual, hom_dims, is_dualisable, tensor_t,
)
from .formats import FormatError

VERBOSITY_ENV = "O2MODELS_VERBOSITY"
log = logging.getLogger("o2models")


class UsageError(Exception):
    """Inputs of the wrong kind for the requested operation (exit status 2)."""


def _window(text: str) -> tuple[int, ...]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from exc
    if lo > hi:
        raise argparse.ArgumentTypeError("empty degree window")
    return tuple(range(lo, hi + 1))


def _read(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    try:
        return formats.loads(text)
    except FormatError as exc:
        where = f"{path}: {exc.where}" if exc.where else path
        raise FormatError(exc.message, where) from exc


def _inputs(args, count: int) -> list:
    paths = list(args.files) + list(args.input or [])
    if len(paths) != count:
        raise UsageError(f"{args.command} needs {count} input file(s), got {len(paths)}")
    return [_read(p) for p in paths]


def _graded(v: GradedVec, degrees) -> dict:
    return {str(n): v[n] for n in degrees}


def _section(s: SectionSpace, degrees, top: int) -> dict:
    return {
        "start": s.start,
        "per_index": {str(k): _graded(s.at(k), degrees) for k in range(s.start, top + 1)},
        "generic": _graded(s.generic, degrees),
        "infinity": _graded(s.infinity, degrees),
        "finite_total": None if s.finite_dims() is None else _graded(s.finite_dims(), degrees),
    }


# ---------------------------------------------------------------- subcommands


def cmd_validate(args) -> dict:
    (obj,) = _inputs(args, 1)
    kind = formats.encode(obj)["kind"]
    log.info("%s passed its checks", kind)
    return {"kind": "validation", "object": kind, "valid": True}


def cmd_tensor(args) -> dict:
    a, b = _inputs(args, 2)
    if isinstance(a, CObject) and isinstance(b, CObject):
        out = tensor_c(a, b)
    elif isinstance(a, TObject) and isinstance(b, TObject):
        out = tensor_t(a, b)
    elif isinstance(a, DObject) and isinstance(b, DObject):
        out = tensor_d(a, b)
    elif isinstance(a, FpModule) and isinstance(b, FpModule):
        out = module_tensor(a, b)
    else:
        raise UsageError("tensor needs two objects of the same model")
    return formats.encode(out)


def cmd_hom(args) -> dict:
    a, b = _inputs(args, 2)
    degrees = args.degree_window
    if isinstance(a, CObject) and isinstance(b, CObject):
        dims = {n: hom_set_c(a, b, n).dim for n in degrees}
        return {"kind": "hom_dims", "model": "C", "dims": {str(n): d for n, d in dims.items()}}
    if isinstance(a, TObject) and isinstance(b, TObject):
        dims = hom_dims(a, b, degrees)
        return {"kind": "hom_dims", "model": "T", "dims": {str(n): dims[n] for n in degrees}}
    if isinstance(a, DObject) and isinstance(b, DObject):
        return {"kind": "hom_sections", "model": "D",
                "hom": _section(hom_ext(a, b, degrees).hom, degrees, args.truncation)}
    raise UsageError("hom needs two objects of the same model")


def cmd_ext(args) -> dict:
    a, b = _inputs(args, 2)
    if not (isinstance(a, DObject) and isinstance(b, DObject)):
        raise UsageError("ext is computed for dihedral objects only")
    degrees = args.degree_window
    return {"kind": "ext_dims", "model": "D", "ext": _graded(hom_ext(a, b, degrees).ext, degrees)}


def cmd_homology(args) -> dict:
    (a,) = _inputs(args, 1)
    if isinstance(a, DObject):
        return formats.encode(homology_d(a))
    if isinstance(a, (ChainCx, WChainCx)):
        return formats.encode(homology(a))
    raise UsageError("homology needs a chain complex or a dihedral object")


def cmd_idempotents(args) -> dict:
    return {"kind": "idempotents", "n": args.n, "idempotents": [str(e) for e in dihedral_idempotents(args.n)]}


def cmd_restrict(args) -> dict:
    f = parse_expression(args.expression)
    return {"kind": "restriction", "n": args.n, "value": str(restrict(f, args.n))}


def cmd_hasse(args) -> dict:
    germ, (so2, o2) = hasse_decompose(parse_expression(args.expression))
    return {"kind": "hasse", "dihedral": {str(k): format_rat(v) for k, v in germ.items()},
            "generic": format_rat(germ.generic), "so2": format_rat(so2), "o2": format_rat(o2)}


def cmd_cover(args) -> dict:
    a, n = _inputs(args, 2)
    if not (isinstance(a, TObject) and isinstance(n, ModuleElement)):
        raise UsageError("cover needs an object and an element of its nub")
    res = cover(a, n)
    return {"kind": "cover", "data": formats.encode(res.data), "sphere": formats.encode(res.sphere),
            "preimage": formats.encode(res.preimage)}


def cmd_dual(args) -> dict:
    (a,) = _inputs(args, 1)
    if not isinstance(a, TObject):
        raise UsageError("dual needs an object of the torus model")
    if not is_dualisable(a):
        raise UnsupportedInput("the object is not dualisable: its nub is not finitely generated projective")
    return formats.encode(dual(a))


def cmd_adams(args) -> dict:
    a, b = _inputs(args, 2)
    degrees = args.degree_window
    if isinstance(a, CObject) and isinstance(b, CObject):
        return adams_cyclic_hom(a, b, degrees).as_dict()
    if isinstance(a, DObject) and isinstance(b, DObject):
        return adams_dihedral(a, b, degrees).as_dict()
    raise UsageError("adams needs two dihedral objects or two objects with W-action")


def cmd_generator_table(args) -> dict:
    table = generator_table()
    return {"kind": "generator_table", "passed": table.passed,
            "lines": [{"name": l.name, "expected": str(l.expected), "computed": str(l.computed), "ok": l.ok}
                      for l in table.lines]}


COMMANDS = {
    "validate": cmd_validate, "tensor": cmd_tensor, "hom": cmd_hom, "ext": cmd_ext,
    "homology": cmd_homology, "idempotents": cmd_idempotents, "restrict": cmd_restrict,
    "hasse": cmd_hasse, "cover": cmd_cover, "dual": cmd_dual, "adams": cmd_adams,
    "generator-table": cmd_generator_table,
}


# ---------------------------------------------------------------- output


def render_text(report: dict) -> str:
    kind = report.get("kind")
    if kind == "validation":
        return f"valid {report['object']}"
    if kind == "restriction":
        return report["value"]
    if kind == "idempotents":
        return "\n".join(report["idempotents"])
    if kind == "generator_table":
        lines = [f"{'PASS' if l['ok'] else 'FAIL'}  {l['name']}: expected {l['expected']}, got {l['computed']}"
                 for l in report["lines"]]
        good = sum(l["ok"] for l in report["lines"])
        lines.append(f"{good}/{len(report['lines'])} lines pass")
        return "\n".join(lines)
    if kind == "hasse":
        exc = ", ".join(f"{k}: {v}" for k, v in report["dihedral"].items())
        return (f"dihedral part: {{{exc}}} generic {report['generic']}\n"
                f"corner: SO(2) {report['so2']}, O(2) {report['o2']}")
    if kind in ("hom_dims", "ext_dims"):
        dims = report.get("dims") or report.get("ext")
        return "\n".join(f"degree {n}: {d}" for n, d in dims.items())
    if kind in ("hom_sections", "adams_report"):
        return _render_sections(report)
    return json.dumps(report, indent=2)


def _render_sections(report: dict) -> str:
    out = []
    for name in ("hom", "ext", "total"):
        part = report.get(name)
        if part is None:
            continue
        if part == "unavailable":
            out.append(f"{name}: unavailable")
            continue
        if "start" not in part:
            out.append(f"{name}: " + ", ".join(f"[{n}] {d}" for n, d in part.items()))
            continue
        out.append(f"{name}:")
        for k, dims in part["per_index"].items():
            out.append(f"  k={k}: " + ", ".join(f"[{n}] {d}" for n, d in dims.items()))
        out.append("  generic: " + ", ".join(f"[{n}] {d}" for n, d in part["generic"].items()))
        out.append("  infinity: " + ", ".join(f"[{n}] {d}" for n, d in part["infinity"].items()))
    for note in report.get("notes", []):
        out.append(f"note: {note}")
    return "\n".join(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="o2models", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("files", nargs="*", help="input object files")
    common.add_argument("--input", action="append", help="input object file (repeatable)")
    common.add_argument("--degree-window", type=_window, default=_window("-2:2"), metavar="LO:HI")
    common.add_argument("--truncation", type=int, default=8, metavar="K",
                        help="list indices up to K in section-space reports")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("idempotents", "restrict"):
            p.add_argument("--n", type=int, required=True, help="dihedral group D_2n")
        if name in ("restrict", "hasse"):
            p.add_argument("--expression", "-e", default=None, help="Burnside expression, e.g. 'e_C + 2*e_3'")
    return parser


def _setup_logging() -> None:
    level = {"0": logging.WARNING, "1": logging.INFO, "2": logging.DEBUG}.get(
        os.environ.get(VERBOSITY_ENV, "0"), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.command in ("restrict", "hasse") and args.expression is None:
        if not args.files:
            print(f"error: {args.command} needs a Burnside expression", file=sys.stderr)
            return 2
        args.expression = " ".join(args.files)
        args.files = []
    if args.command in ("idempotents", "restrict") and args.n < 1:
        print("error: --n must be positive", file=sys.stderr)
        return 2
    try:
        report = COMMANDS[args.command](args)
    except (FormatError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ModuleError, UnsupportedInput, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    if args.format == "machine":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(render_text(report) + "\n")
    if report.get("kind") == "generator_table" and not report["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
