"""Example circuits with plain reference functions.

Each registry entry builds a :class:`Program` for a given field and knows how
to sample valid inputs and compute the expected outputs directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .builder import Env, Repr
from .circuit import GateInstance, Kind
from .field import FieldSpec
from .program import Program

MDS_ROWS = ((2, 1, 1), (1, 2, 1), (1, 1, 2))
DEFAULT_RC = (1, 2, 3)
SHA_STEPS = 16


# -- builder-level gadgets -------------------------------------------------


def chained_add(env: Env, i1: Repr, i2: Repr, i3: Repr) -> Repr:
    m = env.mul(i1, i2)
    return env.add(m, i3)


def xor_gadget(env: Env, a: Repr, b: Repr) -> Repr:
    return env.xor(a, b)


def toy_poseidon_round(env: Env, state: Sequence[Repr], round_constants: Sequence[int]) -> list[Repr]:
    """Add round constants, apply x^5 per lane, then mix with the circulant rows."""
    sboxed = []
    for x, rc in zip(state, round_constants):
        y = env.affine(x, 1, rc)
        y2 = env.mul(y, y)
        y4 = env.mul(y2, y2)
        sboxed.append(env.mul(y4, y))
    return [env.reduce_terms(row, sboxed) for row in MDS_ROWS]


def sha_expansion_step(env: Env, words: Sequence[Repr]) -> Repr:
    """Sum four U32 words and reduce mod 2**32 through a 36-bit split.

    Each input's nibble checks are asserted again here, so the step is sound
    even if a caller hands in words whose checks were never emitted.
    """
    for w in words:
        env.check_u32_limbs(w)
    total = env.reduce_terms([1] * len(words), words)
    low, _high = env.range_check_36(total)
    return low


# -- registry --------------------------------------------------------------


def _u32_mod(x: int) -> int:
    return x % (1 << 32)


@dataclass(frozen=True)
class Gadget:
    name: str
    build: Callable[[FieldSpec], Program]
    reference: Callable[[FieldSpec, Sequence[int]], list[int]]
    input_domains: tuple[str, ...]
    # smallest modulus for which ``reference`` describes the circuit; below it
    # the circuit is still complete but computes something else
    reference_min_modulus: int = 2

    @property
    def arity(self) -> int:
        return len(self.input_domains)

    def sample_valid(self, field: FieldSpec, rng: random.Random) -> list[int]:
        return [sample_domain(d, field, rng) for d in self.input_domains]

    def reference_applies(self, field: FieldSpec) -> bool:
        return field.modulus >= self.reference_min_modulus


def sample_domain(domain: str, field: FieldSpec, rng: random.Random) -> int:
    p = field.modulus
    if domain == "bool":
        return rng.randrange(2)
    if domain == "u4":
        return rng.randrange(min(16, p))
    if domain == "u32":
        return rng.randrange(min(1 << 32, p))
    return rng.randrange(p)


def _build_chained_add(field: FieldSpec) -> Program:
    env = Env(field)
    a, b, c = env.input(), env.input(), env.input()
    return env.finish([chained_add(env, a, b, c)], name="chained_add")


def _build_xor(field: FieldSpec) -> Program:
    env = Env(field)
    a, b = env.input("bool"), env.input("bool")
    return env.finish([xor_gadget(env, a, b)], name="xor")


def _build_is_zero(field: FieldSpec) -> Program:
    env = Env(field)
    i = env.input()
    return env.finish([env.is_zero(i)], name="is_zero_demo")


def build_poseidon(field: FieldSpec, rc: Sequence[int] = DEFAULT_RC) -> Program:
    env = Env(field)
    state = [env.input() for _ in range(3)]
    return env.finish(toy_poseidon_round(env, state, rc), name="toy_poseidon_round")


def build_sha(field: FieldSpec, steps: int = SHA_STEPS) -> Program:
    env = Env(field)
    w = [env.input("u32") for _ in range(16)]
    for t in range(16, 16 + steps):
        w.append(sha_expansion_step(env, [w[t - 16], w[t - 15], w[t - 7], w[t - 2]]))
    return env.finish(w[16:], name="sha_expansion_step")


def ref_chained_add(field: FieldSpec, x: Sequence[int]) -> list[int]:
    return [field.reduce(x[0] * x[1] + x[2])]


def ref_xor(field: FieldSpec, x: Sequence[int]) -> list[int]:
    return [x[0] ^ x[1]]


def ref_is_zero(field: FieldSpec, x: Sequence[int]) -> list[int]:
    return [1 if field.reduce(x[0]) == 0 else 0]


def ref_poseidon(field: FieldSpec, x: Sequence[int], rc: Sequence[int] = DEFAULT_RC) -> list[int]:
    p = field.modulus
    s = [pow(xi + c, 5, p) for xi, c in zip(x, rc)]
    return [sum(q * v for q, v in zip(row, s)) % p for row in MDS_ROWS]


def ref_sha(field: FieldSpec, x: Sequence[int], steps: int = SHA_STEPS) -> list[int]:
    w = list(x)
    for t in range(16, 16 + steps):
        w.append(_u32_mod(w[t - 16] + w[t - 15] + w[t - 7] + w[t - 2]))
    return w[16:]


GADGETS: dict[str, Gadget] = {
    g.name: g
    for g in (
        Gadget("chained_add", _build_chained_add, ref_chained_add, ("field",) * 3),
        Gadget("xor", _build_xor, ref_xor, ("bool", "bool")),
        Gadget("is_zero_demo", _build_is_zero, ref_is_zero, ("field",)),
        Gadget("toy_poseidon_round", build_poseidon, ref_poseidon, ("field",) * 3),
        Gadget("sha_expansion_step", build_sha, ref_sha, ("u32",) * 16, reference_min_modulus=1 << 36),
    )
}


def get(name: str) -> Gadget:
    try:
        return GADGETS[name]
    except KeyError:
        raise KeyError(f"unknown gadget {name!r}; known: {', '.join(GADGETS)}") from None


def build(name: str, field: FieldSpec) -> Program:
    return get(name).build(field)


def bug_replica(field: FieldSpec, checked_chunks: Optional[Sequence[int]] = (8,)) -> Program:
    """Sum of four words split into nine nibbles where only some nibbles are looked up.

    Replicates a hand-written range check that forgot the low chunks: the
    decomposition identity holds but chunks can exceed 4 bits.
    """
    env = Env(field)
    words = [env.input("u32") for _ in range(4)]
    total = env.reduce_terms([1] * 4, words)
    chunks = tuple(env.fresh() for _ in range(9))
    env.emit(GateInstance(Kind.DECOMPOSE, inputs=(total.wire,), outputs=chunks, payload=(9, 4)))
    for i in checked_chunks or ():
        env.range_check_u4(Repr(chunks[i]))
    low = env.fresh()
    env.emit(
        GateInstance(
            Kind.LIN_COMB,
            inputs=chunks[:8],
            outputs=(low,),
            constants=tuple(field.reduce(16**i) for i in range(8)),
            payload=(8,),
        )
    )
    return env.finish([low], name="bug_replica")


def double_bool_check(field: FieldSpec) -> Program:
    """x checked boolean twice, output x*x. Input 2 must fail."""
    env = Env(field)
    x = env.input()
    b = env.assert_bool(x)
    env.assert_bool(x)
    return env.finish([env.mul(b, b)], name="double_bool_check")
