"""Collapse a lookup-free circuit into one wide, bounded-degree custom gate."""

from __future__ import annotations

from dataclasses import dataclass

from ..circuit import Kind
from ..constraints import ConstrainedVector, ConstraintSystem, Identity, Monomial, identity_from_json, identity_to_json
from ..field import FieldSpec
from ..program import Program
from .poly import Poly


class FlattenError(ValueError):
    pass


@dataclass(frozen=True)
class CustomGate:
    """Identities over ``width`` slots; slot ``i`` holds circuit wire ``wires[i]``.

    Coefficients are baked into the monomials, so the gate carries no
    constant columns.
    """

    field: FieldSpec
    wires: tuple[int, ...]
    identities: tuple[Identity, ...]
    max_degree: int

    @property
    def width(self) -> int:
        return len(self.wires)

    @property
    def degree(self) -> int:
        return max((i.degree for i in self.identities), default=0)

    def slot_of(self, wire: int) -> int:
        return self.wires.index(wire)

    def cv(self) -> ConstrainedVector:
        return ConstrainedVector(self.wires, (), self.identities, "custom")

    def constraint_system(self) -> ConstraintSystem:
        """The gate as a one-row system over the original wire numbering."""
        return ConstraintSystem(self.field, [self.cv()], [], {})

    def compact_cs(self) -> ConstraintSystem:
        """Same gate with slots renumbered 0..width-1 (handy for enumeration)."""
        cv = ConstrainedVector(tuple(range(self.width)), (), self.identities, "custom")
        return ConstraintSystem(self.field, [cv], [], {})

    def to_json(self) -> dict:
        return {
            "field_modulus": str(self.field.modulus),
            "width": self.width,
            "max_degree": self.max_degree,
            "degree": self.degree,
            "witness_map": list(self.wires),
            "identities": [identity_to_json(i, self.field) for i in self.identities],
        }

    @classmethod
    def from_json(cls, d: dict) -> CustomGate:
        return cls(
            FieldSpec(int(d["field_modulus"])),
            tuple(d["witness_map"]),
            tuple(identity_from_json(i) for i in d["identities"]),
            int(d["max_degree"]),
        )


def flatten(prog: Program, max_degree: int) -> CustomGate:
    """Inline intermediate wires into their uses while every identity stays within ``max_degree``.

    An intermediate is kept as its own slot (with an identity ``w - P_w``)
    only when inlining it would push a product past the bound. Inputs,
    declared outputs and oracle values stay slots; boolean checks and
    decomposition identities are carried over.
    """
    if max_degree < 2:
        raise FlattenError(f"max_degree must be at least 2, got {max_degree}")
    if any(g.kind is Kind.LOOKUP for g in prog.gates):
        raise FlattenError("circuit has lookups, which cannot be expressed as polynomial identities")
    p = prog.field.modulus
    defs: dict[int, Poly] = {w: Poly.var(p, w) for w in prog.inputs}
    kept: set[int] = set(prog.inputs)
    idents: list[Poly] = []  # each must vanish
    outputs = set(prog.outputs)

    def value(w: int) -> Poly:
        if w not in defs:
            raise FlattenError(f"wire {w} is used before it is defined")
        return defs[w]

    def materialize(w: int) -> None:
        if w in kept:
            return
        idents.append(Poly.var(p, w) - defs[w])
        defs[w] = Poly.var(p, w)
        kept.add(w)

    def product(wa: int, wb: int, limit: int) -> Poly:
        # materialize the heavier operand until the product fits
        while value(wa).degree + value(wb).degree > limit:
            heavy = wa if value(wa).degree >= value(wb).degree else wb
            if value(heavy).degree <= 1:
                heavy = wb if heavy == wa else wa
            if value(heavy).degree <= 1:
                raise FlattenError(f"bound {limit} too small for a product of wires {wa}, {wb}")
            materialize(heavy)
        return value(wa) * value(wb)

    def define(w: int, poly: Poly) -> None:
        defs[w] = poly
        if w in outputs:
            materialize(w)

    def slot_var(w: int) -> Poly:
        kept.add(w)
        defs[w] = Poly.var(p, w)
        return defs[w]

    for g in prog.gates:
        k = g.kind
        if k is Kind.CONSTANT:
            define(g.outputs[0], Poly.const(p, g.constants[0]))
        elif k is Kind.ARITH:
            ql, qr, qo, qm, qc = g.constants
            l, r = g.inputs
            prod = product(l, r, max_degree) if qm else Poly(p)
            num = value(l).scale(ql) + value(r).scale(qr) + prod.scale(qm) + Poly.const(p, qc)
            define(g.outputs[0], num.scale(-pow(qo, -1, p)))
        elif k is Kind.FMA:
            c0, c1 = g.constants
            a, b, c = g.inputs
            prod = product(a, b, max_degree) if c0 else Poly(p)
            define(g.outputs[0], prod.scale(c0) + value(c).scale(c1))
        elif k is Kind.LIN_COMB:
            acc = Poly(p)
            for q, w in zip(g.constants, g.inputs):
                acc = acc + value(w).scale(q)
            define(g.outputs[0], acc)
        elif k is Kind.BOOL_CHECK:
            w = g.inputs[0]
            sq = product(w, w, max_degree)
            idents.append(sq - value(w))
        elif k is Kind.IS_ZERO:
            i = g.inputs[0]
            if value(i).degree + 1 > max_degree:
                materialize(i)
            r = slot_var(g.aux[0])
            o = slot_var(g.outputs[0])
            pi = value(i)
            idents.append(o - Poly.const(p, 1) + pi * r)
            idents.append(pi * o)
            idents.append(o * o - o)
        elif k is Kind.DECOMPOSE:
            chunks, bits = g.payload
            acc = Poly(p)
            for j, w in enumerate(g.outputs):
                acc = acc + slot_var(w).scale(pow(2, bits * j, p))
            idents.append(acc - value(g.inputs[0]))
        else:  # pragma: no cover
            raise FlattenError(f"cannot flatten {k}")
    for w in prog.outputs:
        materialize(w)

    wires = tuple(sorted(kept))
    slot = {w: i for i, w in enumerate(wires)}
    identities = tuple(
        Identity(tuple(Monomial(c, (), tuple(slot[w] for w in m)) for m, c in sorted(poly.terms.items())), "flat")
        for poly in idents
        if poly.terms
    )
    gate = CustomGate(prog.field, wires, identities, max_degree)
    if gate.degree > max_degree:  # pragma: no cover
        raise FlattenError(f"internal: produced degree {gate.degree} above bound {max_degree}")
    return gate
