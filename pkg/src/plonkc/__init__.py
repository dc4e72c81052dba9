"""Compile gate-level circuits to Plonkish constraint systems and tables."""

from .builder import Env, Repr, Tag
from .circuit import CircuitSignature, GateInstance, Kind, from_gates, gates_in_order, stats, validate
from .constraints import ConstraintSystem, gen_cs, sat
from .field import F5, F7, GOLDILOCKS, FieldElement, FieldSpec, parse_field
from .program import Program
from .tabulation import PlonkishTable, sat_plonkish, tabulate
from .witness import Trace, WitnessError, gen_trace, trace_equiv

__all__ = [
    "F5",
    "F7",
    "GOLDILOCKS",
    "CircuitSignature",
    "ConstraintSystem",
    "Env",
    "FieldElement",
    "FieldSpec",
    "GateInstance",
    "Kind",
    "PlonkishTable",
    "Program",
    "Repr",
    "Tag",
    "Trace",
    "WitnessError",
    "from_gates",
    "gates_in_order",
    "gen_cs",
    "gen_trace",
    "parse_field",
    "sat",
    "sat_plonkish",
    "stats",
    "tabulate",
    "trace_equiv",
    "validate",
]
