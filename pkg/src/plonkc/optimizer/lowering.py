"""Lowering to a target gate set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..circuit import GateInstance, Kind
from ..program import Program
from .passes import PassResult, gate_poly, use_counts
from .poly import Poly


@dataclass(frozen=True)
class Profile:
    name: str
    gate_set: frozenset
    lc_width: int = 4

    def __post_init__(self):
        if self.lc_width < 2:
            raise ValueError(f"lc_width must be >= 2, got {self.lc_width}")


PLONK = Profile(
    "plonk",
    frozenset({Kind.CONSTANT, Kind.ARITH, Kind.BOOL_CHECK, Kind.IS_ZERO, Kind.LOOKUP, Kind.DECOMPOSE}),
)
# BoolCheck and IsZero stay native: their identities are not FMA-shaped
BOOJUM = Profile(
    "boojum",
    frozenset({Kind.CONSTANT, Kind.FMA, Kind.LIN_COMB, Kind.BOOL_CHECK, Kind.IS_ZERO, Kind.LOOKUP, Kind.DECOMPOSE}),
)
PROFILES = {"plonk": PLONK, "boojum": BOOJUM}


def get_profile(name: str | Profile, lc_width: Optional[int] = None) -> Profile:
    if isinstance(name, Profile):
        prof = name
    else:
        try:
            prof = PROFILES[name.lower()]
        except KeyError:
            raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    if lc_width is not None and lc_width != prof.lc_width:
        prof = Profile(prof.name, prof.gate_set, lc_width)
    return prof


class _Emitter:
    def __init__(self, prog: Program):
        self.prog = prog
        self.p = prog.field.modulus
        self.next_wire = prog.next_wire
        self.gates: list[GateInstance] = []
        self.one: Optional[int] = None
        self.one_gate: Optional[GateInstance] = None
        for g in prog.gates:
            if g.kind is Kind.CONSTANT and g.constants[0] == 1:
                self.one, self.one_gate = g.outputs[0], g
                break

    def fresh(self) -> int:
        w = self.next_wire
        self.next_wire += 1
        return w

    def get_one(self) -> int:
        if self.one is None:
            self.one = self.fresh()
            self.one_gate = GateInstance(Kind.CONSTANT, outputs=(self.one,), constants=(1,))
        return self.one

    def emit(self, g: GateInstance) -> None:
        if g is not self.one_gate:
            self.gates.append(g)

    def finish(self) -> list[GateInstance]:
        # the pooled constant goes first so every use comes after it
        head = [self.one_gate] if self.one_gate is not None else []
        return head + self.gates

    # -- linear expressions ----------------------------------------------

    def linear(self, terms: list[tuple[int, int]], const: int, out: int, width: int) -> None:
        """Emit gates computing out = sum(q*w) + const, FMA / LinComb only."""
        terms = [(w, q % self.p) for w, q in sorted(terms) if q % self.p]
        const %= self.p
        if not terms:
            self.emit(GateInstance(Kind.CONSTANT, outputs=(out,), constants=(const,)))
            return
        if const:
            terms.append((self.get_one(), const))
        self._sum(terms, out, width)

    def _sum(self, terms: list[tuple[int, int]], out: int, width: int) -> None:
        if len(terms) == 1:
            (w, q), = terms
            self.emit(GateInstance(Kind.FMA, inputs=(w, w, w), outputs=(out,), constants=(0, q)))
        elif len(terms) == 2:
            (w0, q0), (w1, q1) = terms
            one = self.get_one()
            self.emit(GateInstance(Kind.FMA, inputs=(w0, one, w1), outputs=(out,), constants=(q0, q1)))
        elif len(terms) <= width:
            pad = [(terms[0][0], 0)] * (width - len(terms))
            ws, qs = zip(*(terms + pad))
            self.emit(GateInstance(Kind.LIN_COMB, inputs=ws, outputs=(out,), constants=qs, payload=(width,)))
        else:
            t = self.fresh()
            self._sum(terms[:width], t, width)
            self._sum([(t, 1)] + terms[width:], out, width)

    def linear_arith(self, terms: list[tuple[int, int]], const: int, out: int) -> None:
        """out = sum(q*w) + const using Arith gates only (left fold)."""
        terms = [(w, q % self.p) for w, q in terms if q % self.p]
        m1 = self.p - 1
        if not terms:
            self.emit(GateInstance(Kind.CONSTANT, outputs=(out,), constants=(const % self.p,)))
            return
        if len(terms) == 1:
            (w, q), = terms
            self.emit(GateInstance(Kind.ARITH, inputs=(w, w), outputs=(out,), constants=(q, 0, m1, 0, const)))
            return
        acc, rest = None, list(terms)
        while rest:
            if acc is None:
                (w0, q0), (w1, q1) = rest[:2]
                rest = rest[2:]
                l, r = w0, w1
            else:
                (w1, q1) = rest.pop(0)
                l, r, q0 = acc, w1, 1
            last = not rest
            o = out if last else self.fresh()
            qc = const if last else 0
            self.emit(GateInstance(Kind.ARITH, inputs=(l, r), outputs=(o,), constants=(q0, q1, m1, 0, qc)))
            acc = o


def _linear_parts(d: Poly) -> tuple[dict[int, int], int]:
    return {m[0]: c for m, c in d.terms.items() if len(m) == 1}, d.coeff(())


def _to_boojum(prog: Program, prof: Profile) -> PassResult:
    p = prog.field.modulus
    gates = prog.gates
    outputs = set(prog.outputs)
    em = _Emitter(prog)
    uses = use_counts(gates)
    producer = {g.outputs[0]: g for g in gates if g.kind is Kind.ARITH}
    polys = {w: gate_poly(g, p) for w, g in producer.items()}
    linear = {w for w, d in polys.items() if d.degree <= 1}

    # a linear Arith with a single linear Arith consumer is folded into it
    absorbed = set()
    for g in gates:
        if g.outputs and g.outputs[0] in linear:
            for w in set(g.inputs):
                if w in linear and uses[w] == 1 and w not in outputs:
                    absorbed.add(w)

    def expand(w: int) -> tuple[dict[int, int], int]:
        terms, const = _linear_parts(polys[w])
        out: dict[int, int] = {}
        for x, q in terms.items():
            if x in absorbed:
                sub, c = expand(x)
                const += q * c
                for y, qy in sub.items():
                    out[y] = out.get(y, 0) + q * qy
            else:
                out[x] = out.get(x, 0) + q
        return out, const

    # a pure product read once by a linear sum becomes the FMA's product term
    products = {
        w: g.inputs
        for w, g in producer.items()
        if polys[w].degree == 2 and len(polys[w].terms) == 1 and uses[w] == 1 and w not in outputs
    }
    fused: dict[int, int] = {}
    for w in sorted(linear - absorbed):
        terms, _ = expand(w)
        cands = [x for x in sorted(terms) if x in products and x not in fused.values()]
        if cands:
            fused[w] = cands[0]
    fused_away = set(fused.values())

    def fma(l: int, r: int, c0: int, terms: dict[int, int], const: int, o: int) -> None:
        terms = {w: q for w, q in terms.items() if q % p}
        if not terms and not const % p:
            em.emit(GateInstance(Kind.FMA, inputs=(l, r, l), outputs=(o,), constants=(c0, 0)))
        elif len(terms) == 1 and not const % p:
            (w, q), = terms.items()
            em.emit(GateInstance(Kind.FMA, inputs=(l, r, w), outputs=(o,), constants=(c0, q % p)))
        else:
            u = em.fresh()
            em.linear(list(terms.items()), const, u, prof.lc_width)
            em.emit(GateInstance(Kind.FMA, inputs=(l, r, u), outputs=(o,), constants=(c0, 1)))

    applications = 0
    for g in gates:
        k = g.kind
        if k is Kind.ARITH:
            o = g.outputs[0]
            applications += 1
            if o in absorbed or o in fused_away:
                continue
            d = polys[o]
            if o in fused:
                terms, const = expand(o)
                x = fused[o]
                l, r = products[x]
                c0 = terms.pop(x) * polys[x].coeff((l, r)) % p
                fma(l, r, c0, terms, const, o)
            elif o in linear:
                terms, const = expand(o)
                em.linear(list(terms.items()), const, o, prof.lc_width)
            else:
                l, r = g.inputs
                qm = d.coeff((l, r))
                terms, const = _linear_parts(d - (Poly.var(p, l) * Poly.var(p, r)).scale(qm))
                fma(l, r, qm, terms, const, o)
        elif k is Kind.LIN_COMB and g.payload[0] > prof.lc_width:
            applications += 1
            em._sum(sorted(zip(g.inputs, g.constants)), g.outputs[0], prof.lc_width)
        else:
            em.emit(g)
    out = prog.with_gates(em.finish(), next_wire=em.next_wire)
    return out, applications


def _to_plonk(prog: Program) -> PassResult:
    p = prog.field.modulus
    em = _Emitter(prog)
    em.one = em.one_gate = None  # never needed here
    applications = 0
    for g in prog.gates:
        o = g.outputs[0] if g.outputs else None
        if g.kind is Kind.FMA:
            applications += 1
            c0, c1 = g.constants
            a, b, c = g.inputs
            d = gate_poly(g, p)
            if c0 == 0:
                em.linear_arith([(c, c1)], 0, o)
            elif c in (a, b) or c1 == 0:
                lin = d - (Poly.var(p, a) * Poly.var(p, b)).scale(c0)
                ql, qr = lin.coeff((a,)), lin.coeff((b,)) if a != b else 0
                em.emit(GateInstance(Kind.ARITH, inputs=(a, b), outputs=(o,), constants=(ql, qr, p - 1, c0, 0)))
            else:
                t = em.fresh()
                em.emit(GateInstance(Kind.ARITH, inputs=(a, b), outputs=(t,), constants=(0, 0, p - 1, c0, 0)))
                em.emit(GateInstance(Kind.ARITH, inputs=(t, c), outputs=(o,), constants=(1, c1, p - 1, 0, 0)))
        elif g.kind is Kind.LIN_COMB:
            applications += 1
            terms: dict[int, int] = {}
            for q, w in zip(g.constants, g.inputs):
                terms[w] = terms.get(w, 0) + q
            em.linear_arith(list(terms.items()), 0, o)
        else:
            em.emit(g)
    return prog.with_gates(em.gates, next_wire=em.next_wire), applications


def to_profile(prog: Program, profile: str | Profile = "plonk") -> PassResult:
    """Rewrite gates outside the profile's gate set.

    plonk: gates already in the set are untouched; FMA and LinComb become Arith.
    boojum: linear Arith chains with single-use intermediates collapse into
    FMA / LinComb(lc_width) sums, other Arith gates become FMA over a pooled
    constant-one wire, and LinComb wider than lc_width is split.
    """
    prof = get_profile(profile)
    if prof.name == "boojum":
        return _to_boojum(prog, prof)
    return _to_plonk(prog)
