import itertools
import json

import pytest

from plonkc import F5, F7, GOLDILOCKS, gadgets, sat
from plonkc.optimizer import CustomGate, FlattenError, flatten
from plonkc.verify import enumerate_satisfying


def io_projection(prog, cs, width):
    io = list(prog.inputs) + list(prog.outputs)
    return {tuple(t[w] for w in io) for t in enumerate_satisfying(cs, width, prog.field)}


def test_chained_add_bound_8():
    prog = gadgets.build("chained_add", F5)
    gate = flatten(prog, 8)
    assert gate.wires == (0, 1, 2, 4)
    assert len(gate.identities) == 1 and gate.degree == 2
    # x0*x1 + x2 - o
    assert gate.identities[0].degree == 2
    flat = io_projection(prog, gate.constraint_system(), prog.width)
    orig = io_projection(prog, prog.gen_cs(), prog.width)
    assert flat == orig
    assert orig == {(a, b, c, (a * b + c) % 5) for a, b, c in itertools.product(range(5), repeat=3)}


def test_poseidon_bound_8_is_one_gate_of_degree_5():
    gate = flatten(gadgets.build("toy_poseidon_round", GOLDILOCKS), 8)
    assert isinstance(gate, CustomGate)
    assert gate.degree == 5
    assert gate.width == 6


def test_poseidon_bound_4_keeps_intermediates():
    gate8 = flatten(gadgets.build("toy_poseidon_round", GOLDILOCKS), 8)
    gate4 = flatten(gadgets.build("toy_poseidon_round", GOLDILOCKS), 4)
    assert all(i.degree <= 4 for i in gate4.identities)
    assert gate4.width > gate8.width


@pytest.mark.parametrize("bound", [4, 8])
def test_flattened_gate_accepts_generated_traces(bound):
    prog = gadgets.build("toy_poseidon_round", F7)
    gate = flatten(prog, bound)
    cs = gate.constraint_system()
    for x in itertools.product(range(7), repeat=3):
        t = prog.generate(list(x))
        assert sat(cs, t)


def test_flatten_rejects_lookups_and_tiny_bounds():
    with pytest.raises(FlattenError):
        flatten(gadgets.build("sha_expansion_step", GOLDILOCKS), 8)
    with pytest.raises(FlattenError):
        flatten(gadgets.build("chained_add", GOLDILOCKS), 1)


def test_flatten_is_zero_keeps_oracle_slot():
    prog = gadgets.build("is_zero_demo", F5)
    gate = flatten(prog, 4)
    assert set(prog.inputs) | set(prog.outputs) <= set(gate.wires)
    assert io_projection(prog, gate.constraint_system(), prog.width) == io_projection(prog, prog.gen_cs(), prog.width)


def test_custom_gate_json_roundtrip():
    gate = flatten(gadgets.build("toy_poseidon_round", F7), 4)
    back = CustomGate.from_json(json.loads(json.dumps(gate.to_json())))
    assert back == gate
