"""Command-line front end.

Data (JSON, CSV) goes to stdout or ``--out``; human summaries go to stderr.
Exit codes: 0 ok, 1 I/O, 2 usage or validation, 3 trace failure, 4 property failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import gadgets
from .field import FieldSpec, default_field, parse_field
from .optimizer import DEFAULT_PASSES, FlattenError, flatten, optimize
from .program import Program
from .tabulation import tabulate
from .verify import (
    EnumerationBudgetError,
    check_completeness,
    check_preservation,
    check_soundness_bruteforce,
)
from .witness import WitnessError

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_TRACE, EXIT_PROPERTY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _field(args) -> FieldSpec:
    try:
        return parse_field(args.field) if args.field else default_field()
    except ValueError as e:
        raise UsageError(f"bad --field: {e}") from None


def _load(args) -> Program:
    """A registered gadget name, or a path to a program JSON file."""
    name = args.gadget
    if name.endswith(".json") or os.path.sep in name:
        try:
            with open(name) as fh:
                return Program.from_json(json.load(fh))
        except (ValueError, KeyError) as e:
            raise UsageError(f"{name}: not a program file ({e})") from None
    try:
        return gadgets.build(name, _field(args))
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None


def _passes(args) -> Optional[list[str]]:
    if not getattr(args, "passes", None):
        return None
    return [p.strip() for p in args.passes.split(",") if p.strip()]


def _optimize(prog: Program, args):
    try:
        return optimize(prog, args.profile, _passes(args))
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None


def _emit(args, data: str | bytes) -> None:
    if isinstance(data, str):
        data = data.encode()
    if getattr(args, "out", None):
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _stats_line(label: str, st) -> str:
    body = ", ".join(f"{k}: {v}" for k, v in sorted(st.items())) or "empty"
    return f"{label:>10}  {sum(st.values()):>5} gates  {{{body}}}"


# -- commands ---------------------------------------------------------------


def cmd_build(args) -> int:
    prog = _load(args)
    _emit(args, prog.dumps() + "\n")
    _err(_stats_line(prog.name or "circuit", prog.stats()))
    return EXIT_OK


def cmd_stats(args) -> int:
    prog = _load(args)
    out = {"before": dict(prog.stats())}
    if args.optimize:
        opt, _ = _optimize(prog, args)
        out["after"] = dict(opt.stats())
    _emit(args, _json(out))
    return EXIT_OK


def cmd_optimize(args) -> int:
    prog = _load(args)
    opt, reports = _optimize(prog, args)
    _emit(args, opt.dumps() + "\n")
    _err(_stats_line("before", prog.stats()))
    _err(_stats_line("after", opt.stats()))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(_json([r.to_json() for r in reports]))
    else:
        for r in reports:
            if r.applications:
                _err(f"  iter {r.iteration} {r.name}: {r.applications} applications")
    return EXIT_OK


def _parse_inputs(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--input must be comma-separated integers, got {text!r}") from None


def cmd_trace(args) -> int:
    prog = _load(args)
    if args.optimize:
        prog, _ = _optimize(prog, args)
    xs = _parse_inputs(args.input)
    if len(xs) != len(prog.inputs):
        raise UsageError(f"{prog.name} takes {len(prog.inputs)} inputs, got {len(xs)}")
    try:
        t = prog.generate(xs)
    except WitnessError as e:
        _err(f"trace failed: {e}")
        return EXIT_TRACE
    _emit(args, json.dumps(t.values) + "\n")
    _err("outputs: " + ", ".join(str(prog.field.signed(v)) for v in prog.output_values(t)))
    return EXIT_OK


def _table(args):
    prog = _load(args)
    if args.optimize:
        prog, _ = _optimize(prog, args)
    return prog, tabulate(prog.gen_cs())


def cmd_tabulate(args) -> int:
    _, table = _table(args)
    _emit(args, table.export(args.format))
    _err(f"{len(table.rows)} rows, {table.geometry.wire_columns} wire columns, {len(table.geometry.identities)} selectors")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    prog = _load(args)
    opt, reports = _optimize(prog, args)
    table = tabulate(opt.gen_cs())
    _emit(args, table.export(args.format))
    _err(_stats_line("before", prog.stats()))
    _err(_stats_line("after", opt.stats()))
    for r in reports:
        if r.applications:
            _err(f"  iter {r.iteration} {r.name}: {r.applications} applications")
    _err(f"table: {len(table.rows)} rows")
    return EXIT_OK


def cmd_flatten(args) -> int:
    prog = _load(args)
    try:
        gate = flatten(prog, args.max_degree)
    except FlattenError as e:
        raise UsageError(str(e)) from None
    _emit(args, _json(gate.to_json()))
    _err(f"width {gate.width}, {len(gate.identities)} identities, degree {gate.degree}")
    return EXIT_OK


def cmd_verify(args) -> int:
    prog = _load(args)
    prop = args.property
    try:
        if prop == "completeness":
            rep = check_completeness(prog, args.samples, args.seed)
        elif prop == "soundness":
            rep = check_soundness_bruteforce(prog)
        else:
            rep = check_preservation(args.pass_name, prog, args.samples, args.seed, args.profile)
    except EnumerationBudgetError as e:
        raise UsageError(f"soundness needs a tiny field: {e}") from None
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    _emit(args, _json(rep.to_json()))
    _err(rep.summary())
    return EXIT_OK if rep.passed else EXIT_PROPERTY


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plonkc", description="Gate-level circuits to Plonkish tables.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, optimize_flags=False):
        p.add_argument("gadget", help=f"one of {', '.join(gadgets.GADGETS)} or a program .json file")
        p.add_argument("--field", help="goldilocks or a prime modulus (default from PLONKC_FIELD)")
        p.add_argument("--out", help="write data here instead of stdout")
        if optimize_flags:
            p.add_argument("--profile", choices=("plonk", "boojum"), default="plonk")
            p.add_argument("--passes", help=f"comma list (default {','.join(DEFAULT_PASSES)})")
        return p

    p = common(sub.add_parser("build", help="build a gadget and print its circuit JSON"))
    p.set_defaults(func=cmd_build)

    p = common(sub.add_parser("stats", help="gate counts by kind"), True)
    p.add_argument("--optimize", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = common(sub.add_parser("optimize", help="run the optimizer"), True)
    p.add_argument("--report", help="write pass reports (JSON) here")
    p.set_defaults(func=cmd_optimize)

    p = common(sub.add_parser("trace", help="generate a witness"), True)
    p.add_argument("--input", required=True, help="comma-separated input values")
    p.add_argument("--optimize", action="store_true")
    p.set_defaults(func=cmd_trace)

    p = common(sub.add_parser("tabulate", help="constraint system as a Plonkish table"), True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--optimize", action="store_true")
    p.set_defaults(func=cmd_tabulate)

    p = common(sub.add_parser("pipeline", help="build, optimize, tabulate, export"), True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_pipeline)

    p = common(sub.add_parser("flatten", help="collapse into one custom gate"))
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("verify", help="run a property check")
    p.add_argument("--property", choices=("completeness", "soundness", "preservation"), required=True)
    p.add_argument("--gadget", required=True)
    p.add_argument("--field")
    p.add_argument("--out")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pass", dest="pass_name", default="optimize", help="pass id for preservation")
    p.add_argument("--profile", choices=("plonk", "boojum"), default="plonk")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        _err(f"error: {e}")
        return EXIT_USAGE
    except OSError as e:
        _err(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
