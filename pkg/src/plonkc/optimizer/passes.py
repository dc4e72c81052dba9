"""Semantics-preserving rewrite passes.

Every pass maps a :class:`Program` to ``(Program, applications)`` where
``applications`` counts individual rewrites.
"""

from __future__ import annotations

import itertools
from collections import Counter
from typing import Iterable, Optional, Sequence

from ..circuit import ASSERTION_KINDS, GateInstance, Kind
from ..program import Program
from .poly import Poly

PassResult = tuple[Program, int]

# derivable-boolean checks give up beyond this many leaf variables
MAX_BOOL_LEAVES = 10


class BooleanFactError(ValueError):
    """A wire is declared boolean but nothing in the circuit makes it so."""


def gate_poly(g: GateInstance, p: int) -> Optional[Poly]:
    """Output of a single-output arithmetic gate as a polynomial in its inputs."""
    k = g.kind
    if k is Kind.CONSTANT:
        return Poly.const(p, g.constants[0])
    if k is Kind.ARITH:
        ql, qr, qo, qm, qc = g.constants
        l, r = (Poly.var(p, w) for w in g.inputs)
        num = l.scale(ql) + r.scale(qr) + (l * r).scale(qm) + Poly.const(p, qc)
        return num.scale(-pow(qo, -1, p))
    if k is Kind.FMA:
        c0, c1 = g.constants
        a, b, c = (Poly.var(p, w) for w in g.inputs)
        return (a * b).scale(c0) + c.scale(c1)
    if k is Kind.LIN_COMB:
        acc = Poly(p)
        for q, w in zip(g.constants, g.inputs):
            acc = acc + Poly.var(p, w, q)
        return acc
    return None


def fit_arith(poly: Poly, out: int, qo: int, order: Sequence[int] = ()) -> Optional[GateInstance]:
    """Express ``out = poly`` as one Arith gate with the given qo, if the shape allows.

    ``order`` is the preferred (left, right) assignment of the variables.
    """
    p = poly.p
    vs = list(poly.variables)
    if len(vs) > 2:
        return None
    vs.sort(key=lambda w: (order.index(w) if w in order else len(order), w))
    if not vs:
        # o = c still needs operand wires; there are none to give
        return None
    u = vs[0]
    v = vs[1] if len(vs) == 2 else u
    allowed = {(), (u,), (v,), tuple(sorted((u, v)))}
    if any(m not in allowed for m in poly.terms):
        return None
    s = -qo % p
    if u == v:
        ql, qr, qm = poly.coeff((u,)), 0, poly.coeff((u, u))
    else:
        ql, qr, qm = poly.coeff((u,)), poly.coeff((v,)), poly.coeff((u, v))
    qs = tuple(x * s % p for x in (ql, qr)) + (qo % p, qm * s % p, poly.coeff(()) * s % p)
    return GateInstance(Kind.ARITH, inputs=(u, v), outputs=(out,), constants=qs)


def use_counts(gates: Iterable[GateInstance], skip: frozenset = frozenset()) -> Counter:
    uses: Counter = Counter()
    for g in gates:
        if g.kind in skip:
            continue
        for w in set(g.inputs):
            uses[w] += 1
    return uses


def _rename(g: GateInstance, mapping: dict[int, int]) -> GateInstance:
    if not any(w in mapping for w in g.inputs):
        return g
    return g.replace(inputs=tuple(mapping.get(w, w) for w in g.inputs))


# -- boolean facts ---------------------------------------------------------


def _expand(w: int, defs: dict[int, Poly], leaves: set[int], p: int, limit: int = 64) -> Optional[Poly]:
    """``w`` as a polynomial over ``leaves``, following definitions; None if impossible."""
    memo: dict[int, Optional[Poly]] = {}

    def go(x: int, depth: int) -> Optional[Poly]:
        if x in leaves:
            return Poly.var(p, x)
        if x in memo:
            return memo[x]
        d = defs.get(x)
        if d is None or depth > limit:
            return None
        subs = {}
        for y in d.variables:
            e = go(y, depth + 1)
            if e is None:
                memo[x] = None
                return None
            subs[y] = e
        res = d.substitute(subs).multilinearize(leaves)
        if len(res.variables) > MAX_BOOL_LEAVES:
            res = None
        memo[x] = res
        return res

    return go(w, 0)


def _always_boolean(poly: Poly) -> bool:
    vs = poly.variables
    if len(vs) > MAX_BOOL_LEAVES:
        return False
    for bits in itertools.product((0, 1), repeat=len(vs)):
        if poly.evaluate(dict(zip(vs, bits))) not in (0, 1):
            return False
    return True


def arithmetic_defs(gates: Iterable[GateInstance], p: int) -> dict[int, Poly]:
    defs = {}
    for g in gates:
        d = gate_poly(g, p)
        if d is not None:
            defs[g.outputs[0]] = d
    return defs


def boolean_closure(prog: Program, gates: Sequence[GateInstance] | None = None) -> set[int]:
    """Wires known to be 0/1 in every successful run."""
    gates = prog.gates if gates is None else gates
    p = prog.field.modulus
    known = set(prog.assumed_bool)
    checked = set()
    for g in gates:
        if g.kind is Kind.IS_ZERO:
            known.add(g.outputs[0])
        elif g.kind is Kind.BOOL_CHECK:
            checked.add(g.inputs[0])
    known |= checked
    defs = arithmetic_defs(gates, p)
    for w in sorted(set(prog.bool_wires) - known):
        e = _expand(w, defs, known, p)
        if e is not None and _always_boolean(e):
            known.add(w)
    return known


def boolean_reduce(prog: Program) -> PassResult:
    """Drop boolean checks implied by other facts and simplify with b*b = b.

    A check on ``w`` is dropped when ``w``'s definition, unfolded down to
    wires already known boolean, only takes values 0/1. Arith gates over
    boolean wires are rewritten after unfolding single-use operands and
    reducing powers of boolean variables.
    """
    p = prog.field.modulus
    gates = list(prog.gates)
    outputs = set(prog.outputs)
    defs = arithmetic_defs(gates, p)
    position = {w: i for i, g in enumerate(gates) for w in g.defined}

    known = set(prog.assumed_bool)
    known |= {g.outputs[0] for g in gates if g.kind is Kind.IS_ZERO}
    checked = sorted({g.inputs[0] for g in gates if g.kind is Kind.BOOL_CHECK}, key=lambda w: position.get(w, -1))
    dropped: set[int] = set()
    for w in checked:
        if w not in known:
            e = _expand(w, defs, known, p)
            if e is not None and _always_boolean(e):
                dropped.add(w)
        known.add(w)
    for w in sorted(set(prog.bool_wires) - known):
        if w not in position and w not in prog.inputs:
            continue  # no longer present
        e = _expand(w, defs, known, p)
        if e is None or not _always_boolean(e):
            raise BooleanFactError(f"wire {w} is tagged boolean but nothing constrains it")
        known.add(w)

    applications = 0
    kept = []
    for g in gates:
        if g.kind is Kind.BOOL_CHECK and g.inputs[0] in dropped:
            applications += 1
            continue
        kept.append(g)
    gates = kept

    uses = use_counts(gates, skip=frozenset({Kind.BOOL_CHECK}))
    for i, g in enumerate(gates):
        if g.kind is not Kind.ARITH:
            continue
        here = defs[g.outputs[0]]
        if not any(v in known for v in here.variables):
            continue
        best = None
        operands = [w for w in dict.fromkeys(g.inputs)]
        candidates = [
            w for w in operands if w in defs and uses[w] == 1 and w not in outputs and defs[w].degree >= 1
        ]
        for k in range(len(candidates), -1, -1):
            for subset in itertools.combinations(candidates, k):
                poly = here.substitute({w: defs[w] for w in subset}).multilinearize(known)
                order = [x for w in g.inputs for x in ((w,) if w not in subset else defs[w].variables)]
                new = fit_arith(poly, g.outputs[0], g.constants[2], order)
                if new is not None and (subset or poly != here):
                    best = (new, poly, subset)
                    break
            if best:
                break
        if best is None:
            continue
        new, poly, _ = best
        for w in set(g.inputs):
            uses[w] -= 1
        for w in set(new.inputs):
            uses[w] += 1
        gates[i] = new
        defs[g.outputs[0]] = poly
        applications += 1
    return prog.with_gates(gates), applications


# -- inlining --------------------------------------------------------------


def _single_var_linear(d: Poly) -> Optional[tuple[int, int, int]]:
    """(x, a, b) when d = a*x + b with a != 0."""
    if d.degree != 1 or len(d.variables) != 1:
        return None
    x = d.variables[0]
    return x, d.coeff((x,)), d.coeff(())


def linear_inline(prog: Program) -> PassResult:
    """Substitute x1 = a*x0 + b into Arith consumers of x1, to fixpoint."""
    p = prog.field.modulus
    gates = list(prog.gates)
    applications = 0
    for _ in range(len(gates) + 1):
        defs = {}
        for g in gates:
            if g.kind is Kind.ARITH:
                defs[g.outputs[0]] = gate_poly(g, p)
        linear = {w: lin for w, d in defs.items() if (lin := _single_var_linear(d)) is not None}
        changed = False
        for i, g in enumerate(gates):
            if g.kind is not Kind.ARITH:
                continue
            targets = [w for w in dict.fromkeys(g.inputs) if w in linear]
            if not targets:
                continue
            subs = {w: Poly.var(p, linear[w][0], linear[w][1]) + Poly.const(p, linear[w][2]) for w in targets}
            poly = defs[g.outputs[0]].substitute(subs)
            order = [linear[w][0] if w in subs else w for w in g.inputs]
            new = fit_arith(poly, g.outputs[0], g.constants[2], order)
            if new is None or new == g:
                continue
            gates[i] = new
            applications += 1
            changed = True
        if not changed:
            break
    return prog.with_gates(gates), applications


# -- deduplication ---------------------------------------------------------


def cse(prog: Program) -> PassResult:
    """Merge gates with identical kind, inputs, constants and payload."""
    outputs = set(prog.outputs)
    seen: dict[tuple, GateInstance] = {}
    mapping: dict[int, int] = {}
    kept = []
    applications = 0
    for g in prog.gates:
        g = _rename(g, mapping)
        if g.outputs:
            key = (g.kind, g.inputs, g.constants, g.payload)
            first = seen.get(key)
            if first is None:
                seen[key] = g
            elif not set(g.defined) & outputs:
                mapping.update(zip(g.defined, first.defined))
                applications += 1
                continue
        kept.append(g)
    bool_wires = frozenset(mapping.get(w, w) for w in prog.bool_wires)
    return prog.with_gates(kept, bool_wires=bool_wires), applications


def dedup_assertions(prog: Program) -> PassResult:
    """Keep only the first of identical BoolCheck / Lookup gates."""
    seen = set()
    kept = []
    for g in prog.gates:
        if g.kind in (Kind.BOOL_CHECK, Kind.LOOKUP):
            key = (g.kind, g.inputs, g.payload)
            if key in seen:
                continue
            seen.add(key)
        kept.append(g)
    return prog.with_gates(kept), len(prog.gates) - len(kept)


def dce(prog: Program) -> PassResult:
    """Drop gates whose results reach neither an output nor an assertion."""
    live = set(prog.outputs)
    kept = []
    for g in reversed(prog.gates):
        if g.kind in ASSERTION_KINDS or any(w in live for w in g.defined):
            live.update(g.inputs)
            kept.append(g)
    kept.reverse()
    return prog.with_gates(kept), len(prog.gates) - len(kept)


def drop_bool_checks(prog: Program) -> PassResult:
    """Deliberately broken pass that deletes every boolean check.

    Exists so the preservation harness can show it catches lost assertions.
    """
    kept = [g for g in prog.gates if g.kind is not Kind.BOOL_CHECK]
    return prog.with_gates(kept), len(prog.gates) - len(kept)
