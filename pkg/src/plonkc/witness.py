"""Traces and the functional semantics of circuits (witness generation)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .circuit import Circuit, CircuitSignature, GateInstance, Kind, gates_in_order
from .field import FieldSpec
from .tables import TableDef, default_tables


class WitnessError(Exception):
    """Witness generation failed; ``gate_index`` is the position in gates_in_order."""

    def __init__(self, reason: str, gate_index: int | None = None, gate: GateInstance | None = None):
        super().__init__(reason)
        self.reason = reason
        self.gate_index = gate_index
        self.gate = gate

    def __str__(self):
        if self.gate is None:
            return self.reason
        return f"gate #{self.gate_index} {self.gate!r}: {self.reason}"


class Trace:
    """Partial assignment of field residues to wire positions.

    Slots are written once during generation; ``None`` marks an unset slot.
    """

    __slots__ = ("field", "values")

    def __init__(self, field: FieldSpec, values: Iterable[Optional[int]] = ()):
        self.field = field
        p = field.modulus
        self.values: list[Optional[int]] = [None if v is None else int(v) % p for v in values]

    @classmethod
    def empty(cls, field: FieldSpec, width: int) -> Trace:
        return cls(field, [None] * width)

    @classmethod
    def from_inputs(cls, field: FieldSpec, positions: Sequence[int], values: Sequence[int], width: int = 0) -> Trace:
        if len(positions) != len(values):
            raise ValueError(f"expected {len(positions)} input values, got {len(values)}")
        width = max([width, *(w + 1 for w in positions)])
        t = cls.empty(field, width)
        for w, v in zip(positions, values):
            t.values[w] = int(v) % field.modulus
        return t

    def __len__(self):
        return len(self.values)

    def __getitem__(self, w: int) -> Optional[int]:
        return self.values[w] if 0 <= w < len(self.values) else None

    def is_set(self, w: int) -> bool:
        return self[w] is not None

    def write(self, w: int, v: int) -> None:
        if w >= len(self.values):
            self.values.extend([None] * (w + 1 - len(self.values)))
        elif self.values[w] is not None:
            raise ValueError(f"slot {w} already set (traces are write-once)")
        self.values[w] = v % self.field.modulus

    def copy(self) -> Trace:
        t = Trace.__new__(Trace)
        t.field = self.field
        t.values = list(self.values)
        return t

    def restrict(self, positions: Iterable[int]) -> Trace:
        keep = set(positions)
        return Trace(self.field, [v if i in keep else None for i, v in enumerate(self.values)])

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        a, b = self.values, other.values
        n = max(len(a), len(b))
        return self.field == other.field and all(
            (a[i] if i < len(a) else None) == (b[i] if i < len(b) else None) for i in range(n)
        )

    def __repr__(self):
        vals = ", ".join("_" if v is None else str(self.field.signed(v)) for v in self.values)
        return f"Trace[{vals}]"

    def to_json(self) -> list:
        return [None if v is None else str(v) for v in self.values]

    @classmethod
    def from_json(cls, field: FieldSpec, data: Sequence) -> Trace:
        return cls(field, [None if v is None else int(v) for v in data])


def _need(t: Trace, w: int) -> int:
    v = t[w]
    if v is None:
        raise WitnessError(f"wire {w} is unset")
    return v


def _need_all(t: Trace, wires: Sequence[int]) -> tuple[int, ...]:
    vals = t.values
    try:
        row = tuple([vals[w] for w in wires])
    except IndexError:
        row = (None,)
    if None in row:
        missing = [w for w in wires if t[w] is None]
        raise WitnessError(f"wire {missing[0]} is unset")
    return row


def gate_trace_inplace(g: GateInstance, t: Trace, tables: Mapping[str, TableDef]) -> None:
    """Extend ``t`` with the values ``g`` defines; raise WitnessError on failure."""
    p = t.field.modulus
    k = g.kind
    if k is Kind.LOOKUP:
        name = g.payload[0]
        if name not in tables:
            raise WitnessError(f"unknown table {name!r}")
        row = _need_all(t, g.inputs)
        if row not in tables[name].rows:
            raise WitnessError(f"{row} not in table {name!r}")
    elif k is Kind.ARITH:
        ql, qr, qo, qm, qc = g.constants
        l, r = _need_all(t, g.inputs)
        # identity ql*l + qr*r + qo*o + qm*l*r + qc = 0, solved for o
        num = (ql * l + qr * r + qm * l * r + qc) % p
        t.write(g.outputs[0], -num * pow(qo, -1, p))
    elif k is Kind.CONSTANT:
        t.write(g.outputs[0], g.constants[0])
    elif k is Kind.BOOL_CHECK:
        if _need(t, g.inputs[0]) not in (0, 1):
            raise WitnessError(f"wire {g.inputs[0]} is not boolean")
    elif k is Kind.IS_ZERO:
        i = _need(t, g.inputs[0])
        if i == 0:
            t.write(g.aux[0], 0)
            t.write(g.outputs[0], 1)
        else:
            t.write(g.aux[0], pow(i, -1, p))
            t.write(g.outputs[0], 0)
    elif k is Kind.FMA:
        c0, c1 = g.constants
        a, b, c = _need_all(t, g.inputs)
        t.write(g.outputs[0], c0 * a * b + c1 * c)
    elif k is Kind.LIN_COMB:
        xs = _need_all(t, g.inputs)
        t.write(g.outputs[0], sum(q * x for q, x in zip(g.constants, xs)))
    elif k is Kind.DECOMPOSE:
        chunks, bits = g.payload
        x = _need(t, g.inputs[0])
        if x >= 1 << (chunks * bits):
            raise WitnessError(f"value {x} does not fit in {chunks}x{bits} bits")
        mask = (1 << bits) - 1
        for i, w in enumerate(g.outputs):
            t.write(w, (x >> (bits * i)) & mask)
    else:  # pragma: no cover
        raise WitnessError(f"unknown gate kind {k}")


def gate_trace(g: GateInstance, t: Trace, tables: Mapping[str, TableDef] | None = None) -> Optional[Trace]:
    out = t.copy()
    try:
        gate_trace_inplace(g, out, default_tables() if tables is None else tables)
    except WitnessError:
        return None
    return out


def generate(
    c: Circuit | Sequence[GateInstance],
    initial: Trace,
    tables: Mapping[str, TableDef] | None = None,
) -> Trace:
    """Run every gate in order; raises WitnessError with a diagnostic on failure."""
    gates = c if isinstance(c, (list, tuple)) else gates_in_order(c)
    tables = default_tables() if tables is None else tables
    t = initial.copy()
    for idx, g in enumerate(gates):
        try:
            gate_trace_inplace(g, t, tables)
        except WitnessError as e:
            raise WitnessError(e.reason, idx, g) from None
    return t


def gen_trace(
    c: Circuit | Sequence[GateInstance],
    initial: Trace,
    tables: Mapping[str, TableDef] | None = None,
) -> Optional[Trace]:
    """The partial function from an initial trace to a full witness; None on failure."""
    try:
        return generate(c, initial, tables)
    except WitnessError:
        return None


def trace_equiv(sig: CircuitSignature, t1: Optional[Trace], t2: Optional[Trace]) -> bool:
    """Equality restricted to the signature's input and output positions."""
    if t1 is None or t2 is None:
        return t1 is None and t2 is None
    return all(t1[w] == t2[w] for w in sig.io)
