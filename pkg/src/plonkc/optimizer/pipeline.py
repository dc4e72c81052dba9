"""Pass registry, the default pipeline and the static soundness-discipline check."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence

from ..circuit import Kind, stats, validate
from ..program import Program
from .lowering import Profile, get_profile, to_profile
from .passes import (
    PassResult,
    boolean_closure,
    boolean_reduce,
    cse,
    dce,
    dedup_assertions,
    drop_bool_checks,
    linear_inline,
)

DEFAULT_PASSES = ("boolean_reduce", "linear_inline", "cse", "dedup_assertions", "to_profile", "dce")
MAX_ITERATIONS = 10

PASSES: dict[str, Callable[[Program], PassResult]] = {
    "boolean_reduce": boolean_reduce,
    "linear_inline": linear_inline,
    "cse": cse,
    "dedup_assertions": dedup_assertions,
    "dce": dce,
}
# not part of any pipeline; used to show the harness catches lost assertions
MUTANT_PASSES: dict[str, Callable[[Program], PassResult]] = {"drop_bool_checks": drop_bool_checks}


class OptimizerError(RuntimeError):
    pass


def get_pass(name: str, profile: str | Profile = "plonk") -> Callable[[Program], PassResult]:
    if name == "to_profile":
        return partial(to_profile, profile=get_profile(profile))
    if name in PASSES:
        return PASSES[name]
    if name in MUTANT_PASSES:
        return MUTANT_PASSES[name]
    known = sorted([*PASSES, "to_profile", *MUTANT_PASSES])
    raise KeyError(f"unknown pass {name!r}; known: {', '.join(known)}")


@dataclass
class PassReport:
    name: str
    iteration: int
    applications: int
    before: dict[str, int] = field(default_factory=dict)
    after: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "pass": self.name,
            "iteration": self.iteration,
            "applications": self.applications,
            "before": dict(sorted(self.before.items())),
            "after": dict(sorted(self.after.items())),
        }


def discipline_violations(prog: Program) -> list[str]:
    """Static soundness checks that must hold for every emitted circuit.

    Every Decompose chunk needs a lookup bounding it below 2**bits, and every
    Bool-tagged wire that is still defined must be provably boolean.
    """
    gates = prog.gates
    bounded: dict[int, int] = {}
    for g in gates:
        if g.kind is Kind.LOOKUP:
            table = prog.tables.get(g.payload[0])
            if table is None:
                continue
            for col, w in enumerate(g.inputs):
                b = table.column_bound(col)
                bounded[w] = min(bounded.get(w, b), b)
    problems = []
    for i, g in enumerate(gates):
        if g.kind is Kind.DECOMPOSE:
            limit = 1 << g.payload[1]
            for w in g.outputs:
                if bounded.get(w, limit + 1) > limit:
                    problems.append(f"gate #{i}: decomposition chunk wire {w} has no range lookup")
    present = set(prog.inputs) | {w for g in gates for w in g.defined}
    tagged = {w for w in prog.bool_wires if w in present}
    if tagged:
        known = boolean_closure(prog)
        for w in sorted(tagged - known):
            problems.append(f"wire {w} is tagged boolean but has no boolean constraint")
    return problems


def check_discipline(prog: Program) -> None:
    problems = discipline_violations(prog)
    if problems:
        raise OptimizerError("soundness discipline violated: " + "; ".join(problems))


def run_pass(name: str, prog: Program, profile: str | Profile = "plonk") -> Program:
    return get_pass(name, profile)(prog)[0]


def optimize(
    prog: Program,
    profile: str | Profile = "plonk",
    passes: Optional[Sequence[str]] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> tuple[Program, list[PassReport]]:
    """Run ``passes`` in order, repeating until a full round changes nothing.

    The result is re-validated; if the input satisfied the soundness
    discipline, the output must as well.
    """
    names = tuple(passes) if passes is not None else DEFAULT_PASSES
    fns = [(n, get_pass(n, profile)) for n in names]
    if not validate(prog.circuit).ok:
        raise OptimizerError(f"input circuit is invalid: {validate(prog.circuit).violations}")
    disciplined = not discipline_violations(prog)
    reports: list[PassReport] = []
    cur = prog
    for it in range(max_iterations):
        round_changes = 0
        for name, fn in fns:
            before = dict(stats(cur.gates))
            nxt, n = fn(cur)
            after = dict(stats(nxt.gates))
            reports.append(PassReport(name, it, n, before, after))
            changed = [repr(g) for g in nxt.gates] != [repr(g) for g in cur.gates]
            round_changes += changed
            cur = nxt
        if not round_changes:
            break
    report = validate(cur.circuit)
    if not report.ok:
        raise OptimizerError(f"optimizer produced an invalid circuit: {report.violations}")
    if disciplined:
        check_discipline(cur)
    return cur, reports
