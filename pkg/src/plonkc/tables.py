"""Lookup tables used by range checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class TableDef:
    name: str
    arity: int
    rows: frozenset[tuple[int, ...]]

    def __post_init__(self):
        rows = frozenset(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValueError(f"table {self.name!r} is empty")
        if any(len(r) != self.arity for r in rows):
            raise ValueError(f"table {self.name!r} has rows of the wrong arity")

    def __contains__(self, row) -> bool:
        return tuple(row) in self.rows

    def column_bound(self, col: int) -> int:
        """Exclusive upper bound of the values in column ``col``."""
        return max(r[col] for r in self.rows) + 1

    def sorted_rows(self) -> list[tuple[int, ...]]:
        return sorted(self.rows)


def range_table(name: str, bits: int) -> TableDef:
    return TableDef(name, 1, frozenset((v,) for v in range(2**bits)))


U4 = range_table("u4", 4)


def default_tables() -> dict[str, TableDef]:
    return {"u4": U4}


def tables_to_json(tables: Mapping[str, TableDef]) -> dict:
    return {
        name: {"arity": t.arity, "rows": [[str(v) for v in r] for r in t.sorted_rows()]}
        for name, t in sorted(tables.items())
    }


def tables_from_json(d: Mapping) -> dict[str, TableDef]:
    out = {}
    for name, t in d.items():
        rows: Iterable = (tuple(int(v) for v in r) for r in t["rows"])
        out[name] = TableDef(name, int(t["arity"]), frozenset(rows))
    return out
