"""Prime-field arithmetic.

Values inside circuits, traces and constraint systems are stored as canonical
Python ints paired with a :class:`FieldSpec`; :class:`FieldElement` is the
checked value type used at API boundaries.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

GOLDILOCKS_MODULUS = 2**64 - 2**32 + 1

_TRIAL_DIVISION_LIMIT = 2**20


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_p.

    Primality is verified by trial division for moduli below 2**20; larger
    moduli (the Goldilocks default) are trusted.
    """

    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if self.modulus < _TRIAL_DIVISION_LIMIT and not _is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.modulus, self)

    def __repr__(self):
        if self.modulus == GOLDILOCKS_MODULUS:
            return "FieldSpec(goldilocks)"
        return f"FieldSpec({self.modulus})"

    @property
    def name(self) -> str:
        return "goldilocks" if self.modulus == GOLDILOCKS_MODULUS else str(self.modulus)

    # int-level helpers used on hot paths

    def reduce(self, value: int) -> int:
        return value % self.modulus

    def inv(self, value: int) -> int:
        value %= self.modulus
        if value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(value, -1, self.modulus)

    def signed(self, value: int) -> int:
        """Map a canonical residue to the symmetric range, for display."""
        value %= self.modulus
        return value - self.modulus if value > self.modulus // 2 else value


GOLDILOCKS = FieldSpec(GOLDILOCKS_MODULUS)
F5 = FieldSpec(5)
F7 = FieldSpec(7)


def parse_field(text: str | int | FieldSpec) -> FieldSpec:
    """Accepts ``"goldilocks"``, a decimal modulus, an int, or a FieldSpec."""
    if isinstance(text, FieldSpec):
        return text
    if isinstance(text, int):
        return FieldSpec(text)
    t = text.strip().lower()
    if t in ("goldilocks", "gl", "default"):
        return GOLDILOCKS
    return FieldSpec(int(t))


def default_field() -> FieldSpec:
    """Field named by ``PLONKC_FIELD``, else Goldilocks."""
    env = os.environ.get("PLONKC_FIELD")
    return parse_field(env) if env else GOLDILOCKS


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.modulus:
            raise ValueError(f"{self.value} is not reduced modulo {self.spec.modulus}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{self.spec!r} vs {other.spec!r}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.spec.modulus
        return NotImplemented

    def _make(self, v: int) -> FieldElement:
        return FieldElement(v % self.spec.modulus, self.spec)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._make(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._make(-self.value)

    def inv(self) -> FieldElement:
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        return self._make(self.spec.inv(self.value))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._make(self.value * self.spec.inv(o))

    def __pow__(self, e: int) -> FieldElement:
        # 0**0 == 1: the empty product, which monomial evaluation relies on
        if e < 0:
            raise ValueError("negative exponent; use inv()")
        return self._make(pow(self.value, e, self.spec.modulus))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def fpow(a: FieldElement, e: int) -> FieldElement:
    return a**e
