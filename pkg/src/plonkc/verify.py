"""Property harness: completeness, brute-force soundness and pass preservation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .constraints import ConstraintSystem, eval_identity, sat, unsatisfied
from .field import FieldSpec
from .gadgets import sample_domain
from .optimizer import get_pass, optimize
from .program import Program
from .witness import Trace, trace_equiv

ENUMERATION_BUDGET = 10**8


class EnumerationBudgetError(ValueError):
    pass


@dataclass
class CheckReport:
    property: str
    circuit: str
    cases: int = 0
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **details) -> None:
        self.failures.append(details)

    def summary(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)} failures)"
        return f"{self.property} [{self.circuit}]: {self.cases} cases, {self.skipped} skipped, {status}"

    def to_json(self, max_failures: int = 20) -> dict:
        return {
            "property": self.property,
            "circuit": self.circuit,
            "cases": self.cases,
            "skipped": self.skipped,
            "passed": self.passed,
            "failure_count": len(self.failures),
            "failures": self.failures[:max_failures],
        }


def _vals(t: Optional[Trace]) -> Optional[list]:
    return None if t is None else [None if v is None else str(v) for v in t.values]


def sample_inputs(prog: Program, rng: random.Random) -> list[int]:
    return [sample_domain(d, prog.field, rng) for d in prog.input_domains]


def mutate(prog: Program, x: Sequence[int], rng: random.Random) -> list[int]:
    """Replace one coordinate by a uniform field element."""
    y = list(x)
    if y:
        y[rng.randrange(len(y))] = rng.randrange(prog.field.modulus)
    return y


# -- completeness -----------------------------------------------------------


def check_completeness(
    prog: Program,
    samples: int = 1000,
    seed: int = 0,
    sampler: Optional[Callable[[random.Random], Sequence[int]]] = None,
) -> CheckReport:
    """Every successfully generated trace satisfies the generated constraints."""
    rng = random.Random(seed)
    cs = prog.gen_cs()
    rep = CheckReport("completeness", prog.name)
    for _ in range(samples):
        x = list(sampler(rng)) if sampler else sample_inputs(prog, rng)
        t = prog.gen_trace(x)
        if t is None:
            rep.skipped += 1
            continue
        rep.cases += 1
        if not sat(cs, t):
            rep.fail(input=[str(v) for v in x], trace=_vals(t), unsatisfied=unsatisfied(cs, t))
    return rep


# -- brute force --------------------------------------------------------------


def enumerate_satisfying(
    cs: ConstraintSystem,
    width: int,
    field_spec: Optional[FieldSpec] = None,
    budget: int = ENUMERATION_BUDGET,
) -> list[Trace]:
    """All full assignments of ``width`` wires satisfying ``cs``, in lexicographic order.

    Each identity and lookup is checked as soon as the last wire it reads is
    assigned, so the search prunes early; the budget bounds the unpruned space.
    """
    f = field_spec or cs.field
    p = f.modulus
    if p**width > budget:
        raise EnumerationBudgetError(f"{p}^{width} assignments exceed the budget of {budget}")
    at_level: list[list] = [[] for _ in range(width)]
    for cv in cs.cvs:
        if cv.wires and max(cv.wires) >= width:
            raise ValueError(f"constraint {cv.name!r} references wire {max(cv.wires)} >= width {width}")
        for ident in cv.identities:
            read = [cv.wires[s] for s in ident.wire_slots]
            if not read:
                # constant identity: decided before any wire is assigned
                if eval_identity(ident, [], cv.constants, p):
                    return []
                continue
            at_level[max(read)].append(("id", cv, ident))
    for lk in cs.lookups:
        if max(lk.wires) >= width:
            raise ValueError(f"lookup references wire {max(lk.wires)} >= width {width}")
        at_level[max(lk.wires)].append(("lk", lk, None))

    assign = [0] * width
    out: list[Trace] = []

    def ok(level: int) -> bool:
        for kind, c, ident in at_level[level]:
            if kind == "id":
                vals = [assign[w] for w in c.wires]
                if eval_identity(ident, vals, c.constants, p):
                    return False
            elif tuple(assign[w] for w in c.wires) not in cs.tables[c.table]:
                return False
        return True

    def go(level: int) -> None:
        if level == width:
            out.append(Trace(f, assign))
            return
        for v in range(p):
            assign[level] = v
            if ok(level):
                go(level + 1)

    if width == 0:
        return [Trace(f, [])]
    go(0)
    return out


def check_soundness_bruteforce(
    prog: Program,
    cs: Optional[ConstraintSystem] = None,
    budget: int = ENUMERATION_BUDGET,
) -> CheckReport:
    """Every satisfying trace agrees (on inputs and outputs) with the generated one.

    Traces whose inputs violate an assumed domain (e.g. a bool-encoded input
    set to 2) are outside the circuit's contract and counted as skipped.
    """
    cs = cs if cs is not None else prog.gen_cs()
    width = max(prog.width, cs.width)
    rep = CheckReport("soundness", prog.name)
    for t in enumerate_satisfying(cs, width, prog.field, budget):
        if any(t[w] not in (0, 1) for w in prog.assumed_bool):
            rep.skipped += 1
            continue
        rep.cases += 1
        x = [t[w] for w in prog.inputs]
        g = prog.gen_trace(x)
        if not trace_equiv(prog.signature, g, t):
            rep.fail(input=[str(v) for v in x], satisfying=_vals(t), generated=_vals(g))
    return rep


def soundness_smoke(prog: Program, samples: int = 200, seed: int = 0) -> CheckReport:
    """Randomized and incomplete: perturbed outputs of generated traces must not satisfy."""
    rng = random.Random(seed)
    cs = prog.gen_cs()
    rep = CheckReport("soundness-smoke", prog.name)
    if not prog.outputs:
        return rep
    for _ in range(samples):
        t = prog.gen_trace(sample_inputs(prog, rng))
        if t is None:
            rep.skipped += 1
            continue
        rep.cases += 1
        w = rng.choice(prog.outputs)
        bad = t.copy()
        bad.values[w] = (bad.values[w] + 1 + rng.randrange(prog.field.modulus - 1)) % prog.field.modulus
        if sat(cs, bad):
            rep.fail(wire=w, trace=_vals(bad))
    return rep


# -- preservation -------------------------------------------------------------


def apply_pass(name: str, prog: Program, profile: str = "plonk") -> Program:
    if name == "optimize":
        return optimize(prog, profile)[0]
    return get_pass(name, profile)(prog)[0]


def check_preservation(
    pass_name: str,
    prog: Program,
    samples: int = 1000,
    seed: int = 0,
    profile: str = "plonk",
    inputs: Optional[Sequence[Sequence[int]]] = None,
) -> CheckReport:
    """The rewritten circuit agrees with the original on inputs and outputs, None included.

    Odd-numbered samples mutate one coordinate of a valid input so that
    assertion paths get exercised. ``inputs`` replaces sampling entirely.
    """
    rng = random.Random(seed)
    opt = apply_pass(pass_name, prog, profile)
    label = f"{prog.name}/{pass_name}" + (f"@{profile}" if pass_name in ("to_profile", "optimize") else "")
    rep = CheckReport("preservation", label)
    cases = inputs if inputs is not None else []
    if inputs is None:
        for k in range(samples):
            x = sample_inputs(prog, rng)
            cases.append(mutate(prog, x, rng) if k % 2 else x)
    sig = prog.signature
    for x in cases:
        rep.cases += 1
        t1, t2 = prog.gen_trace(x), opt.gen_trace(x)
        if not trace_equiv(sig, t1, t2):
            rep.fail(input=[str(v) for v in x], original=_vals(t1), rewritten=_vals(t2))
    return rep
