"""Circuits: trees of gate instances over numbered wires."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union


class Kind(str, enum.Enum):
    CONSTANT = "Constant"
    ARITH = "Arith"
    BOOL_CHECK = "BoolCheck"
    IS_ZERO = "IsZero"
    FMA = "FMA"
    LIN_COMB = "LinComb"
    LOOKUP = "Lookup"
    DECOMPOSE = "Decompose"

    def __str__(self):
        return self.value


# gates that can make witness generation fail
ASSERTION_KINDS = frozenset({Kind.BOOL_CHECK, Kind.LOOKUP, Kind.DECOMPOSE})


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GateInstance:
    """One gate: kind, wires and constants.

    ``constants`` are canonical field residues. ``payload`` carries
    kind-specific data: ``(k,)`` for LinComb, ``(table,)`` for Lookup and
    ``(chunks, bits)`` for Decompose.
    """

    kind: Kind
    inputs: tuple[int, ...] = ()
    aux: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()
    constants: tuple[int, ...] = ()
    payload: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for name in ("inputs", "aux", "outputs", "constants", "payload"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        _check_arity(self)

    @property
    def defined(self) -> tuple[int, ...]:
        return self.aux + self.outputs

    def replace(self, **changes) -> GateInstance:
        data = dict(
            kind=self.kind,
            inputs=self.inputs,
            aux=self.aux,
            outputs=self.outputs,
            constants=self.constants,
            payload=self.payload,
        )
        data.update(changes)
        return GateInstance(**data)

    def __repr__(self):
        parts = [str(self.kind)]
        if self.payload:
            parts.append(repr(self.payload))
        parts.append(f"in={list(self.inputs)}")
        if self.aux:
            parts.append(f"aux={list(self.aux)}")
        if self.outputs:
            parts.append(f"out={list(self.outputs)}")
        if self.constants:
            parts.append(f"q={list(self.constants)}")
        return f"Gate({' '.join(parts)})"


# kind -> (inputs, aux, outputs, constants); None means "depends on payload"
_ARITY = {
    Kind.CONSTANT: (0, 0, 1, 1),
    Kind.ARITH: (2, 0, 1, 5),
    Kind.BOOL_CHECK: (1, 0, 0, 0),
    Kind.IS_ZERO: (1, 1, 1, 0),
    Kind.FMA: (3, 0, 1, 2),
}


def _check_arity(g: GateInstance) -> None:
    got = (len(g.inputs), len(g.aux), len(g.outputs), len(g.constants))
    if g.kind in _ARITY:
        want = _ARITY[g.kind]
    elif g.kind is Kind.LIN_COMB:
        if len(g.payload) != 1 or g.payload[0] < 1:
            raise CircuitError(f"LinComb payload must be (k,) with k >= 1, got {g.payload}")
        k = g.payload[0]
        want = (k, 0, 1, k)
    elif g.kind is Kind.LOOKUP:
        if len(g.payload) != 1 or not isinstance(g.payload[0], str):
            raise CircuitError(f"Lookup payload must be (table_name,), got {g.payload}")
        if not g.inputs:
            raise CircuitError("Lookup needs at least one input wire")
        want = (len(g.inputs), 0, 0, 0)
    elif g.kind is Kind.DECOMPOSE:
        if len(g.payload) != 2:
            raise CircuitError(f"Decompose payload must be (chunks, bits), got {g.payload}")
        k, b = g.payload
        if k < 1 or not 1 <= b <= 16:
            raise CircuitError(f"Decompose needs k >= 1 and 1 <= bits <= 16, got {g.payload}")
        want = (1, 0, k, 0)
    else:  # pragma: no cover
        raise CircuitError(f"unknown kind {g.kind}")
    if got != want:
        raise CircuitError(f"{g.kind} expects in/aux/out/const arity {want}, got {got}")
    if g.kind is Kind.ARITH and g.constants[2] == 0:
        raise CircuitError("Arith gate needs qo != 0")


# -- circuit tree ------------------------------------------------------------


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Gate:
    gate: GateInstance


@dataclass(frozen=True)
class Seq:
    left: "Circuit"
    right: "Circuit"


@dataclass(frozen=True)
class Par:
    left: "Circuit"
    right: "Circuit"


Circuit = Union[Nil, Gate, Seq, Par]

NIL = Nil()


def from_gates(gates: Sequence[GateInstance]) -> Circuit:
    """Balanced Seq tree over ``gates`` (keeps depth logarithmic)."""
    gates = list(gates)

    def build(lo: int, hi: int) -> Circuit:
        if hi - lo == 0:
            return NIL
        if hi - lo == 1:
            return Gate(gates[lo])
        mid = (lo + hi) // 2
        return Seq(build(lo, mid), build(mid, hi))

    return build(0, len(gates))


def seq(*parts: Circuit) -> Circuit:
    out: Circuit = NIL
    for p in parts:
        out = p if isinstance(out, Nil) else Seq(out, p)
    return out


def _walk(c: Circuit) -> Iterator[tuple[str, GateInstance]]:
    """Yield (path, gate) left-to-right; iterative so deep chains are fine."""
    stack: list[tuple[str, Circuit]] = [("", c)]
    while stack:
        path, node = stack.pop()
        if isinstance(node, Gate):
            yield path, node.gate
        elif isinstance(node, (Seq, Par)):
            stack.append((path + "R", node.right))
            stack.append((path + "L", node.left))


def gates_in_order(c: Circuit) -> list[GateInstance]:
    """Canonical linearization: Seq and Par both left-then-right."""
    return [g for _, g in _walk(c)]


def stats(c: Circuit | Iterable[GateInstance]) -> Counter:
    gates = gates_in_order(c) if isinstance(c, (Nil, Gate, Seq, Par)) else c
    return Counter(str(g.kind) for g in gates)


@dataclass(frozen=True)
class Violation:
    rule: str  # "ssa" | "def-before-use" | "par-isolation"
    wire: int
    path: str

    def __str__(self):
        return f"{self.rule}: wire {self.wire} at {self.path or '<root>'}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _defs_reads(c: Circuit) -> tuple[set[int], set[int]]:
    defs: set[int] = set()
    reads: set[int] = set()
    for _, g in _walk(c):
        defs.update(g.defined)
        reads.update(g.inputs)
    return defs, reads


def validate(c: Circuit) -> ValidationReport:
    """Collect SSA, def-before-use and Par-isolation violations."""
    report = ValidationReport()
    walked = list(_walk(c))

    all_defs: Counter = Counter()
    for path, g in walked:
        for w in g.defined:
            all_defs[w] += 1
            if all_defs[w] == 2:
                report.violations.append(Violation("ssa", w, path))

    seen: set[int] = set()
    for path, g in walked:
        for w in g.inputs:
            if w in all_defs and w not in seen:
                report.violations.append(Violation("def-before-use", w, path))
        seen.update(g.defined)

    stack: list[tuple[str, Circuit]] = [("", c)]
    while stack:
        path, node = stack.pop()
        if isinstance(node, (Seq, Par)):
            if isinstance(node, Par):
                ld, lr = _defs_reads(node.left)
                rd, rr = _defs_reads(node.right)
                for w in sorted((lr & rd) | (rr & ld) | (ld & rd)):
                    report.violations.append(Violation("par-isolation", w, path))
            stack.append((path + "R", node.right))
            stack.append((path + "L", node.left))
    return report


@dataclass(frozen=True)
class CircuitSignature:
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    @property
    def io(self) -> tuple[int, ...]:
        return self.inputs + self.outputs


def signature(c: Circuit, declared_outputs: Iterable[int] | None = None) -> CircuitSignature:
    """Inputs are wires read but never defined; outputs default to unconsumed gate outputs."""
    gates = gates_in_order(c)
    defs: set[int] = set()
    reads: set[int] = set()
    outs: list[int] = []
    for g in gates:
        defs.update(g.defined)
        reads.update(g.inputs)
        outs.extend(g.outputs)
    inputs = tuple(sorted(reads - defs))
    if declared_outputs is None:
        outputs = tuple(sorted(w for w in outs if w not in reads))
    else:
        outputs = tuple(declared_outputs)
        missing = [w for w in outputs if w not in defs]
        if missing:
            raise CircuitError(f"declared outputs {missing} are not defined by the circuit")
    return CircuitSignature(inputs, outputs)


def max_wire(c: Circuit | Iterable[GateInstance]) -> int:
    gates = gates_in_order(c) if isinstance(c, (Nil, Gate, Seq, Par)) else c
    m = -1
    for g in gates:
        for w in g.inputs + g.defined:
            if w > m:
                m = w
    return m


# -- JSON --------------------------------------------------------------------


def gate_to_json(g: GateInstance) -> dict:
    return {
        "kind": str(g.kind),
        "inputs": list(g.inputs),
        "aux": list(g.aux),
        "outputs": list(g.outputs),
        "constants": [str(q) for q in g.constants],
        "payload": list(g.payload),
    }


def gate_from_json(d: dict) -> GateInstance:
    return GateInstance(
        kind=Kind(d["kind"]),
        inputs=tuple(d["inputs"]),
        aux=tuple(d.get("aux", ())),
        outputs=tuple(d.get("outputs", ())),
        constants=tuple(int(q) for q in d.get("constants", ())),
        payload=tuple(d.get("payload", ())),
    )


def circuit_to_json(c: Circuit) -> dict:
    if isinstance(c, Nil):
        return {"kind": "nil"}
    if isinstance(c, Gate):
        return {"kind": "gate", "gate": gate_to_json(c.gate)}
    tag = "seq" if isinstance(c, Seq) else "par"
    return {"kind": tag, "left": circuit_to_json(c.left), "right": circuit_to_json(c.right)}


def circuit_from_json(d: dict) -> Circuit:
    k = d["kind"]
    if k == "nil":
        return NIL
    if k == "gate":
        return Gate(gate_from_json(d["gate"]))
    ctor = {"seq": Seq, "par": Par}[k]
    return ctor(circuit_from_json(d["left"]), circuit_from_json(d["right"]))
