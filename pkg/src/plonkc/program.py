"""A circuit together with the interface facts the builder knows about it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Optional, Sequence

from .circuit import (
    Circuit,
    CircuitSignature,
    GateInstance,
    circuit_from_json,
    circuit_to_json,
    from_gates,
    gates_in_order,
    max_wire,
    stats,
)
from .constraints import ConstraintSystem, gen_cs
from .field import FieldSpec
from .tables import TableDef, default_tables, tables_from_json, tables_to_json
from .witness import Trace, WitnessError, generate

DOMAINS = ("field", "bool", "u4", "u32")


@dataclass(frozen=True, eq=False)
class Program:
    """Circuit plus ordered inputs/outputs, input domains and boolean facts.

    ``assumed_bool`` lists inputs whose booleanity is a precondition
    (the caller's value encoding guarantees it); :meth:`generate` rejects
    other values before running the circuit. ``bool_wires`` are the wires the
    builder tagged Bool.
    """

    circuit: Circuit
    field: FieldSpec
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    input_domains: tuple[str, ...] = ()
    assumed_bool: frozenset[int] = frozenset()
    bool_wires: frozenset[int] = frozenset()
    tables: Mapping[str, TableDef] = field(default_factory=default_tables)
    next_wire: int = 0
    name: str = ""

    def __post_init__(self):
        if not self.input_domains:
            object.__setattr__(self, "input_domains", ("field",) * len(self.inputs))
        if len(self.input_domains) != len(self.inputs):
            raise ValueError("one domain per input expected")
        bad = set(self.input_domains) - set(DOMAINS)
        if bad:
            raise ValueError(f"unknown input domains {sorted(bad)}")
        top = max(max_wire(self.gates), *self.inputs, -1) + 1
        if self.next_wire < top:
            object.__setattr__(self, "next_wire", top)

    @cached_property
    def gates(self) -> list[GateInstance]:
        return gates_in_order(self.circuit)

    @property
    def signature(self) -> CircuitSignature:
        return CircuitSignature(tuple(sorted(self.inputs)), tuple(self.outputs))

    @property
    def width(self) -> int:
        return self.next_wire

    def stats(self):
        return stats(self.gates)

    def with_gates(self, gates: Sequence[GateInstance], **changes) -> Program:
        return replace(self, circuit=from_gates(gates), **changes)

    def initial_trace(self, values: Sequence[int]) -> Trace:
        return Trace.from_inputs(self.field, self.inputs, values, self.width)

    def generate(self, values: Sequence[int] | Trace) -> Trace:
        t = values if isinstance(values, Trace) else self.initial_trace(values)
        for w in self.assumed_bool:
            if t[w] not in (0, 1):
                raise WitnessError(f"input wire {w} = {t[w]} is outside its bool domain")
        return generate(self.gates, t, self.tables)

    def gen_trace(self, values: Sequence[int] | Trace) -> Optional[Trace]:
        try:
            return self.generate(values)
        except WitnessError:
            return None

    def output_values(self, t: Trace) -> list[int]:
        return [t[w] for w in self.outputs]

    def gen_cs(self) -> ConstraintSystem:
        return gen_cs(self.gates, self.field, self.tables)

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "field_modulus": str(self.field.modulus),
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "input_domains": list(self.input_domains),
            "assumed_bool": sorted(self.assumed_bool),
            "bool_wires": sorted(self.bool_wires),
            "next_wire": self.next_wire,
            "tables": tables_to_json(self.tables),
            "circuit": circuit_to_json(self.circuit),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> Program:
        return cls(
            circuit=circuit_from_json(d["circuit"]),
            field=FieldSpec(int(d["field_modulus"])),
            inputs=tuple(d["inputs"]),
            outputs=tuple(d["outputs"]),
            input_domains=tuple(d.get("input_domains", ())),
            assumed_bool=frozenset(d.get("assumed_bool", ())),
            bool_wires=frozenset(d.get("bool_wires", ())),
            tables=tables_from_json(d["tables"]) if "tables" in d else default_tables(),
            next_wire=int(d.get("next_wire", 0)),
            name=d.get("name", ""),
        )
