"""Sparse multivariate polynomials over a prime field, keyed by wire id."""

from __future__ import annotations

from typing import Iterable, Mapping

Mono = tuple[int, ...]  # sorted wire ids, repeated for powers


class Poly:
    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Mapping[Mono, int] | None = None):
        self.p = p
        acc: dict[Mono, int] = {}
        for m, c in (terms or {}).items():
            key = tuple(sorted(m))
            acc[key] = (acc.get(key, 0) + c) % p
        self.terms: dict[Mono, int] = {m: c for m, c in acc.items() if c}

    @classmethod
    def const(cls, p: int, c: int) -> Poly:
        return cls(p, {(): c})

    @classmethod
    def var(cls, p: int, w: int, coeff: int = 1) -> Poly:
        return cls(p, {(w,): coeff})

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.p, out)

    def __sub__(self, other: Poly) -> Poly:
        return self + other.scale(-1)

    def __mul__(self, other: Poly) -> Poly:
        out: dict[Mono, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.p, out)

    def scale(self, k: int) -> Poly:
        return Poly(self.p, {m: c * k for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            parts.append("*".join([str(c)] + [f"w{w}" for w in m]))
        return " + ".join(parts)

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({w for m in self.terms for w in m}))

    def coeff(self, mono: Iterable[int]) -> int:
        return self.terms.get(tuple(sorted(mono)), 0)

    def is_const(self) -> bool:
        return all(not m for m in self.terms)

    def substitute(self, subs: Mapping[int, Poly]) -> Poly:
        """Replace each variable in ``subs`` by its polynomial."""
        if not any(w in subs for w in self.variables):
            return self
        out = Poly(self.p)
        cache: dict[tuple[int, int], Poly] = {}
        for m, c in self.terms.items():
            acc = Poly.const(self.p, c)
            for w in set(m):
                e = m.count(w)
                if w in subs:
                    key = (w, e)
                    if key not in cache:
                        pw = Poly.const(self.p, 1)
                        for _ in range(e):
                            pw = pw * subs[w]
                        cache[key] = pw
                    acc = acc * cache[key]
                else:
                    acc = acc * Poly(self.p, {(w,) * e: 1})
            out = out + acc
        return out

    def multilinearize(self, boolean: Iterable[int]) -> Poly:
        """Use b*b = b for every variable in ``boolean``."""
        bs = set(boolean)
        out: dict[Mono, int] = {}
        for m, c in self.terms.items():
            red = []
            for w in m:
                if not (w in bs and red and red[-1] == w):
                    red.append(w)
            key = tuple(red)
            out[key] = out.get(key, 0) + c
        return Poly(self.p, out)

    def evaluate(self, values: Mapping[int, int]) -> int:
        acc = 0
        for m, c in self.terms.items():
            t = c
            for w in m:
                t = t * values[w] % self.p
            acc += t
        return acc % self.p
