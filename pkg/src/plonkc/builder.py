"""Embedded builder: allocate wires, emit gates, track value representations.

Every operation here emits gates that are sound on their own (outputs are
constrained, typed values carry their checks). Redundant checks are left
for the optimizer to remove.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import GateInstance, Kind, from_gates
from .field import FieldElement, FieldSpec, default_field
from .program import DOMAINS, Program
from .tables import TableDef, default_tables


class BuilderError(ValueError):
    pass


class Tag(str, enum.Enum):
    SVALUE = "SValue"
    BOOL = "Bool"
    U4 = "U4"
    U32 = "U32"


@dataclass(frozen=True)
class Repr:
    """A wire plus the representation it is known to carry.

    U32 values keep handles to their eight little-endian nibble limbs.
    """

    wire: int
    tag: Tag = Tag.SVALUE
    limbs: tuple["Repr", ...] = ()


Scalar = int | FieldElement


class Env:
    def __init__(self, field: FieldSpec | None = None, tables: Iterable[TableDef] = ()):
        self.field = field or default_field()
        self.next_wire = 0
        self.gates: list[GateInstance] = []
        self.tables: dict[str, TableDef] = default_tables()
        for t in tables:
            self.register_table(t)
        self.constant_pool: dict[int, int] = {}
        self.bool_facts: set[int] = set()
        self.inputs: list[int] = []
        self.input_domains: list[str] = []
        self.assumed_bool: set[int] = set()

    # -- plumbing --------------------------------------------------------

    def fresh(self) -> int:
        w = self.next_wire
        self.next_wire += 1
        return w

    def _q(self, v: Scalar) -> int:
        if isinstance(v, FieldElement):
            if v.spec != self.field:
                raise BuilderError(f"constant from {v.spec!r} used in {self.field!r}")
            return v.value
        return int(v) % self.field.modulus

    def emit(self, gate: GateInstance) -> GateInstance:
        """Append a raw gate. No soundness discipline is applied here."""
        self.gates.append(gate)
        return gate

    def register_table(self, table: TableDef) -> None:
        self.tables[table.name] = table

    def input(self, domain: str = "field") -> Repr:
        """Allocate a circuit input.

        ``"bool"`` inputs are assumed boolean (a precondition checked when
        the trace is generated, not a gate); ``"u32"`` inputs are range
        checked in-circuit and come back U32-tagged.
        """
        if domain not in DOMAINS:
            raise BuilderError(f"unknown input domain {domain!r}")
        w = self.fresh()
        self.inputs.append(w)
        self.input_domains.append(domain)
        if domain == "bool":
            self.assumed_bool.add(w)
            self.bool_facts.add(w)
            return Repr(w, Tag.BOOL)
        if domain == "u32":
            low, _ = self.range_check_n(Repr(w), 32)
            return low
        if domain == "u4":
            return self.range_check_u4(Repr(w))
        return Repr(w)

    def finish(self, outputs: Sequence[Repr | int], name: str = "") -> Program:
        outs = tuple(o.wire if isinstance(o, Repr) else o for o in outputs)
        return Program(
            circuit=from_gates(self.gates),
            field=self.field,
            inputs=tuple(self.inputs),
            outputs=outs,
            input_domains=tuple(self.input_domains),
            assumed_bool=frozenset(self.assumed_bool),
            bool_wires=frozenset(self.bool_facts),
            tables=dict(self.tables),
            next_wire=self.next_wire,
            name=name,
        )

    # -- arithmetic ------------------------------------------------------

    def constant(self, v: Scalar) -> Repr:
        q = self._q(v)
        if q not in self.constant_pool:
            o = self.fresh()
            self.emit(GateInstance(Kind.CONSTANT, outputs=(o,), constants=(q,)))
            self.constant_pool[q] = o
        return Repr(self.constant_pool[q])

    def arith(self, l: Repr, r: Repr, ql: Scalar, qr: Scalar, qm: Scalar, qc: Scalar) -> Repr:
        """o = ql*l + qr*r + qm*l*r + qc (emitted with qo = -1)."""
        o = self.fresh()
        qs = (self._q(ql), self._q(qr), self._q(-1), self._q(qm), self._q(qc))
        self.emit(GateInstance(Kind.ARITH, inputs=(l.wire, r.wire), outputs=(o,), constants=qs))
        return Repr(o)

    def add(self, a: Repr, b: Repr) -> Repr:
        return self.arith(a, b, 1, 1, 0, 0)

    def sub(self, a: Repr, b: Repr) -> Repr:
        return self.arith(a, b, 1, -1, 0, 0)

    def mul(self, a: Repr, b: Repr) -> Repr:
        return self.arith(a, b, 0, 0, 1, 0)

    def affine(self, a: Repr, coeff: Scalar, offset: Scalar = 0) -> Repr:
        # the right wire is a don't-care; reuse the left one
        return self.arith(a, a, coeff, 0, 0, offset)

    def reduce_terms(self, coeffs: Sequence[Scalar], terms: Sequence[Repr]) -> Repr:
        """sum(coeffs[i] * terms[i]) as a left fold of Arith gates."""
        if len(coeffs) != len(terms) or not terms:
            raise BuilderError(f"reduce_terms needs matching non-empty sequences, got {len(coeffs)}/{len(terms)}")
        acc = self.affine(terms[0], coeffs[0])
        for q, t in zip(coeffs[1:], terms[1:]):
            acc = self.arith(t, acc, q, 1, 0, 0)
        return acc

    # -- booleans --------------------------------------------------------

    def _bool_out(self, r: Repr) -> Repr:
        self.emit(GateInstance(Kind.BOOL_CHECK, inputs=(r.wire,)))
        self.bool_facts.add(r.wire)
        return Repr(r.wire, Tag.BOOL)

    @staticmethod
    def _need_bool(*args: Repr) -> None:
        for a in args:
            if a.tag is not Tag.BOOL:
                raise BuilderError(f"wire {a.wire} is {a.tag.value}, expected Bool")

    def assert_bool(self, a: Repr) -> Repr:
        return self._bool_out(a)

    def not_(self, a: Repr) -> Repr:
        self._need_bool(a)
        return self._bool_out(self.affine(a, -1, 1))

    def and_(self, a: Repr, b: Repr) -> Repr:
        self._need_bool(a, b)
        return self._bool_out(self.mul(a, b))

    def or_(self, a: Repr, b: Repr) -> Repr:
        self._need_bool(a, b)
        return self._bool_out(self.arith(a, b, 1, 1, -1, 0))

    def xor(self, a: Repr, b: Repr) -> Repr:
        # (a and not b) or (not a and b)
        nb = self.not_(b)
        a_nb = self.and_(a, nb)
        na = self.not_(a)
        na_b = self.and_(na, b)
        return self.or_(a_nb, na_b)

    def is_zero(self, a: Repr) -> Repr:
        r, o = self.fresh(), self.fresh()
        self.emit(GateInstance(Kind.IS_ZERO, inputs=(a.wire,), aux=(r,), outputs=(o,)))
        self.bool_facts.add(o)
        return Repr(o, Tag.BOOL)

    def equals(self, a: Repr, b: Repr) -> Repr:
        return self.is_zero(self.sub(a, b))

    # -- ranges ----------------------------------------------------------

    def lookup(self, table: str, *wires: Repr) -> None:
        if table not in self.tables:
            raise BuilderError(f"table {table!r} is not registered")
        if len(wires) != self.tables[table].arity:
            raise BuilderError(f"table {table!r} has arity {self.tables[table].arity}")
        self.emit(GateInstance(Kind.LOOKUP, inputs=tuple(w.wire for w in wires), payload=(table,)))

    def range_check_u4(self, a: Repr) -> Repr:
        self.lookup("u4", a)
        return Repr(a.wire, Tag.U4)

    def range_check_n(self, a: Repr, bits: int) -> tuple[Repr, tuple[Repr, ...]]:
        """Split ``a`` into little-endian nibbles, each checked against u4.

        Returns ``(low, chunks)``: ``low`` is the low 32 bits (recomposed
        from the first eight chunks when bits > 32) and ``chunks`` all nibbles.
        """
        if bits % 4 or not 0 < bits <= 64:
            raise BuilderError(f"bits must be a positive multiple of 4 up to 64, got {bits}")
        if "u4" not in self.tables:
            raise BuilderError("table 'u4' is not registered")
        k = bits // 4
        outs = tuple(self.fresh() for _ in range(k))
        self.emit(GateInstance(Kind.DECOMPOSE, inputs=(a.wire,), outputs=outs, payload=(k, 4)))
        chunks = tuple(self.range_check_u4(Repr(w)) for w in outs)
        if bits > 32:
            o = self.fresh()
            weights = tuple(self._q(16**i) for i in range(8))
            self.emit(
                GateInstance(
                    Kind.LIN_COMB,
                    inputs=tuple(c.wire for c in chunks[:8]),
                    outputs=(o,),
                    constants=weights,
                    payload=(8,),
                )
            )
            low = Repr(o, Tag.U32, chunks[:8])
        elif bits == 32:
            low = Repr(a.wire, Tag.U32, chunks)
        else:
            low = Repr(a.wire, Tag.SVALUE)
        return low, chunks

    def range_check_36(self, a: Repr) -> tuple[Repr, Repr]:
        """(u32 part, high nibble) of a value below 2**36."""
        low, chunks = self.range_check_n(a, 36)
        return low, chunks[8]

    def check_u32_limbs(self, a: Repr) -> None:
        """Re-assert the nibble lookups of a U32 value (sound in isolation)."""
        if a.tag is not Tag.U32:
            raise BuilderError(f"wire {a.wire} is {a.tag.value}, expected U32")
        for limb in a.limbs:
            self.range_check_u4(limb)
