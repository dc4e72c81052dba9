"""Fixed-geometry Plonkish tables: one global identity set switched per row by selectors."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

from .constraints import (
    ConstraintSystem,
    Identity,
    Monomial,
    eval_identity,
    identity_from_json,
    identity_to_json,
)
from .field import FieldSpec
from .tables import TableDef, tables_from_json, tables_to_json
from .witness import Trace

_ARITH_WIRES = ("l", "r", "o")
_ARITH_CONSTS = ("ql", "qr", "qo", "qm", "qc")


class TabulationError(ValueError):
    pass


@dataclass(frozen=True)
class TableGeometry:
    wire_columns: int
    constant_columns: tuple[str, ...]
    # (selector column index, identity over wire and constant columns)
    identities: tuple[tuple[int, Identity], ...]
    wire_names: tuple[str, ...] = ()

    @property
    def selector_columns(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.identities)


@dataclass(frozen=True)
class Row:
    wires: tuple[int, ...]
    constants: tuple[int, ...]


@dataclass(frozen=True)
class LookupEntry:
    row: int
    columns: tuple[int, ...]
    table: str
    selector: int = 1


@dataclass
class PlonkishTable:
    field: FieldSpec
    geometry: TableGeometry
    rows: list[Row] = field(default_factory=list)
    lookups: list[LookupEntry] = field(default_factory=list)
    tables: dict[str, TableDef] = field(default_factory=dict)

    def selector_pattern(self) -> list[tuple[int, ...]]:
        sel = self.geometry.selector_columns
        return [tuple(r.constants[s] for s in sel) for r in self.rows]

    def column_names(self) -> list[str]:
        return list(self.geometry.wire_names) + list(self.geometry.constant_columns)

    # -- export ----------------------------------------------------------

    def to_json(self) -> dict:
        f = self.field
        return {
            "field_modulus": str(f.modulus),
            "wire_columns": self.geometry.wire_columns,
            "wire_names": list(self.geometry.wire_names),
            "constant_columns": list(self.geometry.constant_columns),
            "identities": [dict(selector=s, **identity_to_json(i, f)) for s, i in self.geometry.identities],
            "rows": [{"wires": list(r.wires), "constants": [str(c) for c in r.constants]} for r in self.rows],
            "lookup": [
                {"row": e.row, "columns": list(e.columns), "table": e.table, "selector": e.selector}
                for e in self.lookups
            ],
            "tables": tables_to_json(self.tables),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> PlonkishTable:
        geom = TableGeometry(
            int(d["wire_columns"]),
            tuple(d["constant_columns"]),
            tuple((int(e["selector"]), identity_from_json(e)) for e in d["identities"]),
            tuple(d.get("wire_names", ())),
        )
        rows = [Row(tuple(r["wires"]), tuple(int(c) for c in r["constants"])) for r in d["rows"]]
        lookups = [LookupEntry(e["row"], tuple(e["columns"]), e["table"], int(e["selector"])) for e in d["lookup"]]
        return cls(FieldSpec(int(d["field_modulus"])), geom, rows, lookups, tables_from_json(d["tables"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        has_lookup = bool(self.lookups)
        header = self.column_names() + (["lookup"] if has_lookup else [])
        w.writerow(header)
        by_row = {}
        for e in self.lookups:
            by_row.setdefault(e.row, []).append(e.table)
        for i, r in enumerate(self.rows):
            line = [str(x) for x in r.wires] + [str(c) for c in r.constants]
            if has_lookup:
                line.append(";".join(by_row.get(i, [])))
            w.writerow(line)
        return buf.getvalue()

    def export(self, fmt: str = "json") -> bytes:
        if fmt == "json":
            return (self.dumps() + "\n").encode()
        if fmt == "csv":
            return self.to_csv().encode()
        raise ValueError(f"unknown format {fmt!r}")


# -- tabulate --------------------------------------------------------------


def _key(ident: Identity) -> tuple:
    return tuple(sorted((m.coeff, m.const_slots, m.wire_slots) for m in ident.monomials))


def _remap(ident: Identity, wmap: dict[int, int], cmap: dict[int, int]) -> Identity:
    return Identity(
        tuple(
            Monomial(m.coeff, tuple(cmap[s] for s in m.const_slots), tuple(wmap[s] for s in m.wire_slots))
            for m in ident.monomials
        ),
        ident.name,
    )


@dataclass
class _Global:
    ident: Identity  # over columns
    key: tuple


def _match(ident: Identity, g: _Global) -> Optional[tuple[dict[int, int], dict[int, int]]]:
    """Order-preserving slot->column maps under which ``ident`` equals ``g``."""
    ws, gws = ident.wire_slots, g.ident.wire_slots
    cs, gcs = ident.const_slots, g.ident.const_slots
    if len(ws) != len(gws) or len(cs) != len(gcs):
        return None
    wmap, cmap = dict(zip(ws, gws)), dict(zip(cs, gcs))
    if _key(_remap(ident, wmap, cmap)) != g.key:
        return None
    return wmap, cmap


def _consistent(partial: dict[int, int], new: dict[int, int]) -> bool:
    used = {v: k for k, v in partial.items()}
    for k, v in new.items():
        if k in partial and partial[k] != v:
            return False
        if v in used and used[v] != k:
            return False
    return True


def _fill(partial: dict[int, int], n: int, width: int) -> dict[int, int]:
    """Complete a slot->column placement, preferring slot i -> column i."""
    out = dict(partial)
    used = set(out.values())
    for s in range(n):
        if s in out:
            continue
        col = s if s not in used and s < width else min(c for c in range(width) if c not in used)
        out[s] = col
        used.add(col)
    return out


def tabulate(cs: ConstraintSystem, max_width: Optional[int] = None) -> PlonkishTable:
    """Lay out one row per constrained vector plus one per lookup.

    Identities that agree up to slot numbering share a selector column. Wider
    rows are placed first so narrower ones can be slotted onto the columns
    their identities already use.
    """
    cvs = cs.cvs
    for cv in cvs:
        if max_width is not None and len(cv.wires) > max_width:
            raise TabulationError(f"constrained vector {cv.name!r} has {len(cv.wires)} wires, max is {max_width}")
    lk_arity = max((len(lk.wires) for lk in cs.lookups), default=0)
    width = max([len(cv.wires) for cv in cvs] + [lk_arity, 0])
    n_const = max((len(cv.constants) for cv in cvs), default=0)

    globals_: list[_Global] = []
    placements: dict[int, tuple[dict[int, int], dict[int, int], list[int]]] = {}
    order = sorted(range(len(cvs)), key=lambda i: (-len(cvs[i].identities), -len(cvs[i].wires), i))
    for i in order:
        cv = cvs[i]
        wmap: dict[int, int] = {}
        cmap: dict[int, int] = {}
        chosen: list[Optional[int]] = []
        for ident in cv.identities:
            hit = None
            for gi, g in enumerate(globals_):
                m = _match(ident, g)
                if m and _consistent(wmap, m[0]) and _consistent(cmap, m[1]):
                    wmap.update(m[0])
                    cmap.update(m[1])
                    hit = gi
                    break
            chosen.append(hit)
        wmap = _fill(wmap, len(cv.wires), width)
        cmap = _fill(cmap, len(cv.constants), n_const)
        used = []
        for ident, hit in zip(cv.identities, chosen):
            if hit is None:
                placed = _remap(ident, wmap, cmap)
                key = _key(placed)
                hit = next((gi for gi, g in enumerate(globals_) if g.key == key), None)
                if hit is None:
                    globals_.append(_Global(placed, key))
                    hit = len(globals_) - 1
            used.append(hit)
        placements[i] = (wmap, cmap, used)

    sel_base = n_const
    const_names = [f"c{j}" for j in range(n_const)]
    wire_names = [f"w{j}" for j in range(width)]
    for g in globals_:
        if g.ident.name == "arith":
            for s, name in zip(g.ident.const_slots, _ARITH_CONSTS):
                const_names[s] = name
            for s, name in zip(g.ident.wire_slots, _ARITH_WIRES):
                wire_names[s] = name
    seen_names: dict[str, int] = {}
    for g in globals_:
        base = f"q_{g.ident.name or 'id'}"
        seen_names[base] = seen_names.get(base, 0) + 1
        const_names.append(base if seen_names[base] == 1 else f"{base}{seen_names[base]}")
    geometry = TableGeometry(
        width,
        tuple(const_names),
        tuple((sel_base + gi, g.ident) for gi, g in enumerate(globals_)),
        tuple(wire_names),
    )

    rows: list[Row] = []
    for i, cv in enumerate(cvs):
        wmap, cmap, used = placements[i]
        wires = [cv.wires[0] if cv.wires else 0] * width
        for s, col in wmap.items():
            wires[col] = cv.wires[s]
        consts = [0] * (n_const + len(globals_))
        for s, col in cmap.items():
            consts[col] = cv.constants[s]
        for gi in used:
            consts[sel_base + gi] = 1
        rows.append(Row(tuple(wires), tuple(consts)))
    lookups = []
    for lk in cs.lookups:
        wires = list(lk.wires) + [lk.wires[0]] * (width - len(lk.wires))
        lookups.append(LookupEntry(len(rows), tuple(range(len(lk.wires))), lk.table, 1))
        rows.append(Row(tuple(wires), (0,) * (n_const + len(globals_))))
    return PlonkishTable(cs.field, geometry, rows, lookups, dict(cs.tables))


def sat_plonkish(t: PlonkishTable, trace: Trace) -> bool:
    """Every selected identity vanishes on its row and every selected lookup tuple is in its table."""
    p = t.field.modulus
    for row in t.rows:
        vals = [trace[w] for w in row.wires]
        for sel, ident in t.geometry.identities:
            s = row.constants[sel]
            if not s:
                continue
            if any(vals[c] is None for c in ident.wire_slots):
                return False
            if s * eval_identity(ident, vals, row.constants, p) % p:
                return False
    for e in t.lookups:
        if not e.selector:
            continue
        row = t.rows[e.row]
        tup = tuple(trace[row.wires[c]] for c in e.columns)
        if None in tup or tup not in t.tables[e.table]:
            return False
    return True
