"""Constraint systems: polynomial identities over constrained vectors, plus lookups."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .circuit import Circuit, GateInstance, Kind, gates_in_order
from .field import FieldSpec
from .tables import TableDef, default_tables, tables_from_json, tables_to_json
from .witness import Trace


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    """``coeff * prod(constants[i] for i in const_slots) * prod(wires[j] for j in wire_slots)``.

    Slot tuples are multisets (kept sorted); ``coeff`` is a canonical residue.
    """

    coeff: int
    const_slots: tuple[int, ...] = ()
    wire_slots: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const_slots", tuple(sorted(self.const_slots)))
        object.__setattr__(self, "wire_slots", tuple(sorted(self.wire_slots)))

    @property
    def degree(self) -> int:
        return len(self.wire_slots)


@dataclass(frozen=True)
class Identity:
    monomials: tuple[Monomial, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "monomials", tuple(self.monomials))

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.monomials), default=0)

    @property
    def wire_slots(self) -> tuple[int, ...]:
        return tuple(sorted({s for m in self.monomials for s in m.wire_slots}))

    @property
    def const_slots(self) -> tuple[int, ...]:
        return tuple(sorted({s for m in self.monomials for s in m.const_slots}))

    def remap(self, wire_map: Mapping[int, int]) -> Identity:
        return Identity(
            tuple(Monomial(m.coeff, m.const_slots, tuple(wire_map[s] for s in m.wire_slots)) for m in self.monomials),
            self.name,
        )

    def render(self, field: FieldSpec | None = None, wire_names=None, const_names=None) -> str:
        wn = wire_names or (lambda i: f"w{i}")
        cn = const_names or (lambda i: f"q{i}")
        parts = []
        for m in self.monomials:
            c = field.signed(m.coeff) if field else m.coeff
            factors = [cn(i) for i in m.const_slots] + [wn(j) for j in m.wire_slots]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if factors:
                body = "*".join(factors) if mag == 1 else "*".join([str(mag), *factors])
            else:
                body = str(mag)
            parts.append((sign, body))
        if not parts:
            return "0 = 0"
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s + " = 0"


def identity_degree(ident: Identity) -> int:
    return ident.degree


def eval_identity(ident: Identity, wire_vals: Sequence[int], const_vals: Sequence[int], p: int) -> int:
    acc = 0
    nw, nc = len(wire_vals), len(const_vals)
    for m in ident.monomials:
        term = m.coeff
        for i in m.const_slots:
            if i >= nc:
                raise ConstraintError(f"constant slot {i} out of range ({nc})")
            term *= const_vals[i]
        for j in m.wire_slots:
            if j >= nw:
                raise ConstraintError(f"wire slot {j} out of range ({nw})")
            term *= wire_vals[j]
        acc += term
    return acc % p


# -- the identities used by gen_cs --------------------------------------------


def id_arith() -> Identity:
    # ql*l + qr*r + qo*o + qm*l*r + qc
    return Identity(
        (
            Monomial(1, (0,), (0,)),
            Monomial(1, (1,), (1,)),
            Monomial(1, (2,), (2,)),
            Monomial(1, (3,), (0, 1)),
            Monomial(1, (4,), ()),
        ),
        "arith",
    )


def id_bool(slot: int, p: int) -> Identity:
    # i*(i-1) = i^2 - i
    return Identity((Monomial(1, (), (slot, slot)), Monomial(p - 1, (), (slot,))), "bool")


def id_const(p: int) -> Identity:
    # o - q
    return Identity((Monomial(1, (), (0,)), Monomial(p - 1, (0,), ())), "const")


def id_fma(p: int) -> Identity:
    # c0*a*b + c1*c - d
    return Identity(
        (Monomial(1, (0,), (0, 1)), Monomial(1, (1,), (2,)), Monomial(p - 1, (), (3,))),
        "fma",
    )


def id_lincomb(k: int, p: int) -> Identity:
    # sum q_i*x_i - o
    return Identity(
        tuple(Monomial(1, (i,), (i,)) for i in range(k)) + (Monomial(p - 1, (), (k,)),),
        f"lincomb{k}",
    )


def id_decompose(k: int, bits: int, p: int) -> Identity:
    # sum n_i * 2^(bits*i) - x, wires (x, n_0..n_{k-1})
    return Identity(
        tuple(Monomial(pow(2, bits * i, p), (), (i + 1,)) for i in range(k)) + (Monomial(p - 1, (), (0,)),),
        f"decompose{k}x{bits}",
    )


def is_zero_identities(p: int) -> tuple[Identity, ...]:
    # wires (i, r, o): o - 1 + i*r = 0 ; i*o = 0 ; o*(o-1) = 0
    return (
        Identity((Monomial(1, (), (2,)), Monomial(p - 1, (), ()), Monomial(1, (), (0, 1))), "is_zero_inv"),
        Identity((Monomial(1, (), (0, 2)),), "is_zero_mul"),
        id_bool(2, p),
    )


# -- constraint system ---------------------------------------------------------


@dataclass(frozen=True)
class ConstrainedVector:
    wires: tuple[int, ...]
    constants: tuple[int, ...] = ()
    identities: tuple[Identity, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for attr in ("wires", "constants", "identities"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        for ident in self.identities:
            for m in ident.monomials:
                if any(s >= len(self.wires) for s in m.wire_slots) or any(
                    s >= len(self.constants) for s in m.const_slots
                ):
                    raise ConstraintError(f"identity {ident.name!r} references a slot outside cv {self.name!r}")

    @property
    def degree(self) -> int:
        return max((i.degree for i in self.identities), default=0)


def cv_degree(cv: ConstrainedVector) -> int:
    return cv.degree


@dataclass(frozen=True)
class LookupConstraint:
    wires: tuple[int, ...]
    table: str


@dataclass
class ConstraintSystem:
    field: FieldSpec
    cvs: list[ConstrainedVector] = field(default_factory=list)
    lookups: list[LookupConstraint] = field(default_factory=list)
    tables: dict[str, TableDef] = field(default_factory=default_tables)

    def __post_init__(self):
        for lk in self.lookups:
            if lk.table not in self.tables:
                raise ConstraintError(f"lookup references unknown table {lk.table!r}")
            if len(lk.wires) != self.tables[lk.table].arity:
                raise ConstraintError(f"lookup arity mismatch for table {lk.table!r}")

    @property
    def width(self) -> int:
        ws = [w for cv in self.cvs for w in cv.wires] + [w for lk in self.lookups for w in lk.wires]
        return max(ws, default=-1) + 1

    def to_json(self) -> dict:
        f = self.field
        return {
            "field_modulus": str(f.modulus),
            "width": self.width,
            "cvs": [
                {
                    "name": cv.name,
                    "wires": list(cv.wires),
                    "constants": [str(q) for q in cv.constants],
                    "identities": [identity_to_json(i, f) for i in cv.identities],
                }
                for cv in self.cvs
            ],
            "lookups": [{"wires": list(lk.wires), "table": lk.table} for lk in self.lookups],
            "tables": tables_to_json(self.tables),
        }

    @classmethod
    def from_json(cls, d: dict) -> ConstraintSystem:
        f = FieldSpec(int(d["field_modulus"]))
        cvs = [
            ConstrainedVector(
                tuple(c["wires"]),
                tuple(int(q) for q in c["constants"]),
                tuple(identity_from_json(i) for i in c["identities"]),
                c.get("name", ""),
            )
            for c in d["cvs"]
        ]
        lookups = [LookupConstraint(tuple(lk["wires"]), lk["table"]) for lk in d["lookups"]]
        return cls(f, cvs, lookups, tables_from_json(d["tables"]))


def identity_to_json(ident: Identity, f: FieldSpec) -> dict:
    return {
        "name": ident.name,
        "polynomial": ident.render(f),
        "monomials": [
            {"coeff": str(m.coeff), "constants": list(m.const_slots), "wires": list(m.wire_slots)}
            for m in ident.monomials
        ],
    }


def identity_from_json(d: dict) -> Identity:
    return Identity(
        tuple(Monomial(int(m["coeff"]), tuple(m["constants"]), tuple(m["wires"])) for m in d["monomials"]),
        d.get("name", ""),
    )


def _resolve(wires: Sequence[int], t: Trace) -> Optional[list[int]]:
    vals = []
    for w in wires:
        v = t[w]
        if v is None:
            return None
        vals.append(v)
    return vals


def sat_cv(cv: ConstrainedVector, t: Trace) -> bool:
    """True iff every identity vanishes; an unset referenced wire is unsatisfying."""
    vals = _resolve(cv.wires, t)
    if vals is None:
        return False
    p = t.field.modulus
    return all(eval_identity(i, vals, cv.constants, p) == 0 for i in cv.identities)


def sat_lookup(lk: LookupConstraint, t: Trace, tables: Mapping[str, TableDef]) -> bool:
    vals = _resolve(lk.wires, t)
    return vals is not None and tuple(vals) in tables[lk.table]


def sat(cs: ConstraintSystem, t: Trace) -> bool:
    return all(sat_cv(cv, t) for cv in cs.cvs) and all(sat_lookup(lk, t, cs.tables) for lk in cs.lookups)


def unsatisfied(cs: ConstraintSystem, t: Trace) -> list[str]:
    """Names of the failing constraints, for diagnostics."""
    bad = [f"cv#{i} {cv.name}" for i, cv in enumerate(cs.cvs) if not sat_cv(cv, t)]
    bad += [f"lookup#{i} {lk.table}{lk.wires}" for i, lk in enumerate(cs.lookups) if not sat_lookup(lk, t, cs.tables)]
    return bad


def gate_cs(g: GateInstance, p: int) -> ConstrainedVector | LookupConstraint:
    """The constrained vector (or lookup) a single gate compiles to."""
    k = g.kind
    if k is Kind.ARITH:
        return ConstrainedVector(g.inputs + g.outputs, g.constants, (id_arith(),), "arith")
    if k is Kind.CONSTANT:
        return ConstrainedVector(g.outputs, g.constants, (id_const(p),), "constant")
    if k is Kind.BOOL_CHECK:
        return ConstrainedVector(g.inputs, (), (id_bool(0, p),), "bool_check")
    if k is Kind.IS_ZERO:
        return ConstrainedVector(g.inputs + g.aux + g.outputs, (), is_zero_identities(p), "is_zero")
    if k is Kind.FMA:
        return ConstrainedVector(g.inputs + g.outputs, g.constants, (id_fma(p),), "fma")
    if k is Kind.LIN_COMB:
        n = g.payload[0]
        return ConstrainedVector(g.inputs + g.outputs, g.constants, (id_lincomb(n, p),), f"lincomb{n}")
    if k is Kind.LOOKUP:
        return LookupConstraint(g.inputs, g.payload[0])
    if k is Kind.DECOMPOSE:
        chunks, bits = g.payload
        # chunk ranges are enforced by the separate lookups the builder pairs with this
        return ConstrainedVector(g.inputs + g.outputs, (), (id_decompose(chunks, bits, p),), "decompose")
    raise ConstraintError(f"no constraints for {k}")  # pragma: no cover


def gen_cs(
    c: Circuit | Sequence[GateInstance],
    field: FieldSpec,
    tables: Mapping[str, TableDef] | None = None,
) -> ConstraintSystem:
    """Compile each gate, in order, to its constrained vector or lookup."""
    gates = c if isinstance(c, (list, tuple)) else gates_in_order(c)
    tables = dict(default_tables() if tables is None else tables)
    cvs: list[ConstrainedVector] = []
    lookups: list[LookupConstraint] = []
    for g in gates:
        item = gate_cs(g, field.modulus)
        if isinstance(item, LookupConstraint):
            lookups.append(item)
        else:
            cvs.append(item)
    return ConstraintSystem(field, cvs, lookups, tables)


def naive_is_zero_cv(i: int, r: int, o: int, p: int) -> ConstrainedVector:
    """isZero as (i r o), constants (0 0 -1 -1 1), {arith, bool on o}.

    Encodes o = 1 - i*r and o boolean only; it accepts o = 1 for nonzero i
    (take r = 0), so it is under-constrained. Kept for regression tests.
    """
    return ConstrainedVector((i, r, o), (0, 0, p - 1, p - 1, 1), (id_arith(), id_bool(2, p)), "is_zero_naive")
