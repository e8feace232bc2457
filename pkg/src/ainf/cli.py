"""Command-line front end: ainf {check,transfer,oracle,equivariant,fixtures}."""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .ainfty import AInftyStructure, validate_cyclic, validate_structure, validate_unit
from .errors import AinfError, NoOrthogonalComplement, ParseError
from .hpl import retraction_from_dprime, transfer
from .report import Report
from .textio import dump, dumps, load


def _load(path: str, args) -> tuple:
    doc = load(path)
    A = doc.structure
    if args.energy_cutoff is not None:
        A = A.replace(cutoff=Fraction(args.energy_cutoff))
    return A, doc.tstar


def _structure_reports(A: AInftyStructure, k_max: int, tstar=None) -> list[Report]:
    reports = [validate_structure(A, k_max)]
    if A.unit is not None:
        reports.append(validate_unit(A, A.unit, min(k_max, 3)))
    if A.pairing is not None:
        reports.append(validate_cyclic(A, k_max=k_max))
    if tstar is not None:
        from .equivariant import check_tstar
        reports.append(check_tstar(tstar))
    return reports


def _retraction(A: AInftyStructure):
    """Cyclic unital retraction when the pairing allows it, a plain one otherwise."""
    try:
        return retraction_from_dprime(A.linear_part(), A.pairing, A.unit)
    except NoOrthogonalComplement:
        return retraction_from_dprime(A.linear_part(), None, A.unit)


def cmd_check(args) -> tuple[list[Report], list[str]]:
    A, tstar = _load(args.file, args)
    return _structure_reports(A, args.kmax, tstar), []


def cmd_transfer(args):
    A, _ = _load(args.file, args)
    r = _retraction(A)
    T = transfer(A, r, k_max=args.kmax, length_cap=args.length_cap)
    can = T.A_can.replace(name=f"{A.name or Path(args.file).stem}-can")
    reports = _structure_reports(can, args.kmax)
    extra = ["retraction: " + ", ".join(f"{k}={getattr(r, k)}" for k in ("side_conditions", "cyclic", "unital"))]
    if args.out:
        dump(can, args.out, k_max=args.kmax)
        extra.append(f"wrote {args.out}")
    else:
        extra.append(dumps(can, k_max=args.kmax).rstrip())
    return reports, extra


def cmd_oracle(args):
    from .trees import tree_transfer
    from .grading import vadd, vclean
    A, _ = _load(args.file, args)
    r = _retraction(A)
    T = transfer(A, r, length_cap=args.length_cap)
    rep = Report("oracle")
    lines = ["max-diff:"]
    betas = A.monoid.elements(A.cutoff)
    for k in range(args.kmax + 1):
        for beta in betas:
            trees = tree_transfer(A, r, k, beta)
            worst = Fraction(0)
            for word in set(trees) | set(_words(r.H, k)):
                series = T.A_can.ops(word).get(beta, {})
                diff = vclean(vadd(dict(trees.get(word, {})), series, -1))
                if diff:
                    rep.add("series-vs-tree", k, beta, word, r.H.format_vector(diff))
                    worst = max([worst] + [_magnitude(c) for c in diff.values()])
            lines.append(f"  k={k} beta=({beta}) {worst}")
    return [rep.finish()], lines


def _magnitude(c) -> Fraction:
    terms = getattr(c, "terms", None)
    if terms is not None:
        return max((abs(t) for t in terms.values()), default=Fraction(0))
    return abs(Fraction(c))


def _words(H, k):
    from itertools import product
    return product(H.names, repeat=k)


def cmd_equivariant(args):
    from .equivariant import equivariant_pipeline
    A, tstar = _load(args.file, args)
    if tstar is None:
        raise ParseError("equivariant needs [iota_a] sections", None, args.file)
    run = equivariant_pipeline(A, tstar, args.kmax, args.length_cap)
    r = run.retraction
    can = run.transfer.A_can.replace(name=f"{A.name or Path(args.file).stem}-CW-can")
    reports = [validate_structure(run.extended, args.kmax)] + _structure_reports(can, args.kmax)
    extra = ["retraction: " + ", ".join(f"{k}={getattr(r, k)}" for k in ("side_conditions", "cyclic", "unital"))]
    if args.out:
        dump(can, args.out, k_max=args.kmax)
        extra.append(f"wrote {args.out}")
    else:
        extra.append(dumps(can, k_max=args.kmax).rstrip())
    return reports, extra


def cmd_fixtures(args):
    from .fixtures import build_fixture, fixture_names
    lines = []
    reports = []
    for name in fixture_names():
        b = build_fixture(name)
        reports.extend(_structure_reports(b.structure, args.kmax, b.tstar))
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            dump(b.structure, out / f"{name}.alg", b.tstar)
            lines.append(f"wrote {out / f'{name}.alg'}")
        else:
            lines.append(name)
    return reports, lines


COMMANDS = {
    "check": cmd_check,
    "transfer": cmd_transfer,
    "oracle": cmd_oracle,
    "equivariant": cmd_equivariant,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ainf", description="Exact twisted A-infinity toolkit.")
    parser.add_argument("--version", action="version", version=f"ainf {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kmax", type=int, default=4)
    common.add_argument("--energy-cutoff", default=None, help="override the file's energy cutoff")
    common.add_argument("--length-cap", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "transfer", "oracle", "equivariant"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")
    sub.add_parser("fixtures", parents=[common])
    return parser


def _emit(args, reports, extra, elapsed, cutoff) -> bool:
    ok = all(r.passed for r in reports)
    status = "PASS" if ok else "FAIL"
    summary = f"{status} k_max={args.kmax} cutoff={cutoff}"
    if args.format == "structured":
        payload = {"command": args.command, "inputs": [getattr(args, "file", None)], "pass": ok,
                   "reports": [r.to_dict() for r in reports], "output": extra, "summary": summary}
        if args.timing:
            payload["seconds"] = round(elapsed, 3)
        print(json.dumps(payload, indent=2))
    else:
        print(f"command: {args.command}")
        if getattr(args, "file", None):
            print(f"input: {args.file}")
        for r in reports:
            for line in r.lines():
                print(line)
        for line in extra:
            print(line)
        if args.timing:
            print(f"time: {elapsed:.3f}s")
        print(summary)
    return ok


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        reports, extra = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return 2
    except AinfError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    cutoff = args.energy_cutoff
    if cutoff is None and getattr(args, "file", None):
        try:
            cutoff = load(args.file).structure.cutoff
        except AinfError:
            cutoff = 0
    ok = _emit(args, reports, extra, time.perf_counter() - start, cutoff if cutoff is not None else 0)
    return 0 if ok else 1


def run(command: str, files=(), **flags) -> tuple[int, str]:
    """Run one command in-process; returns (exit status, report text)."""
    argv = [command, *map(str, files)]
    for key, value in flags.items():
        opt = "--" + key.replace("_", "-")
        if value is True:
            argv.append(opt)
        elif value not in (None, False):
            argv += [opt, str(value)]
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(argv)
    return status, out.getvalue() + err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
