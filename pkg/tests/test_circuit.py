import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plonkc import GateInstance, Kind, from_gates, gates_in_order, stats, validate
from plonkc.circuit import (
    NIL,
    CircuitError,
    Gate,
    Par,
    Seq,
    circuit_from_json,
    circuit_to_json,
    max_wire,
    seq,
    signature,
)

from .conftest import arith


def is_zero_gate(i=0, r=1, o=2):
    return GateInstance(Kind.IS_ZERO, inputs=(i,), aux=(r,), outputs=(o,))


def test_arity_checked_on_construction():
    with pytest.raises(ValueError):
        GateInstance(Kind.ARITH, inputs=(0,), outputs=(1,), constants=(0, 0, 1, 0, 0))
    with pytest.raises(ValueError):
        GateInstance(Kind.ARITH, inputs=(0, 1), outputs=(2,), constants=(0, 0, 0, 0, 0))  # qo = 0
    with pytest.raises(ValueError):
        GateInstance(Kind.IS_ZERO, inputs=(0,), outputs=(2,))
    with pytest.raises(ValueError):
        GateInstance(Kind.DECOMPOSE, inputs=(0,), outputs=(1, 2), payload=(3, 4))


def test_validate_chained(chained_gates):
    assert validate(from_gates(chained_gates)).ok
    assert validate(NIL).ok


def test_par_isolation_violation():
    g1 = arith(0, 1, 2, qm=1)
    g2 = arith(2, 0, 3, ql=1)
    rep = validate(Par(Gate(g1), Gate(g2)))
    assert not rep.ok
    assert {v.rule for v in rep.violations} == {"par-isolation"}
    assert rep.violations[0].wire == 2


def test_ssa_and_def_before_use_violations():
    g1 = arith(0, 1, 2, qm=1)
    rep = validate(Seq(Gate(g1), Gate(arith(0, 0, 2, ql=1))))
    assert [v.rule for v in rep.violations] == ["ssa"]
    rep = validate(Seq(Gate(arith(2, 0, 3, ql=1)), Gate(g1)))
    assert [v.rule for v in rep.violations] == ["def-before-use"]


def test_signature_examples(chained_gates):
    sig = signature(from_gates(chained_gates))
    assert sig.inputs == (0, 1, 2) and sig.outputs == (4,)
    empty = signature(NIL)
    assert empty.inputs == () and empty.outputs == ()
    sig = signature(Gate(is_zero_gate()))
    assert sig.inputs == (0,) and sig.outputs == (2,)
    assert 1 not in sig.io


def test_declared_outputs_must_exist(chained_gates):
    c = from_gates(chained_gates)
    assert signature(c, [3, 4]).outputs == (3, 4)
    with pytest.raises(CircuitError):
        signature(c, [9])


def test_gates_in_order(chained_gates):
    a, b = chained_gates
    assert gates_in_order(from_gates(chained_gates)) == [a, b]
    assert gates_in_order(NIL) == []
    assert gates_in_order(Par(Gate(a), Gate(b))) == [a, b]


def test_stats(chained_gates):
    assert stats(from_gates(chained_gates)) == {"Arith": 2}
    assert stats(NIL) == {}


def test_seq_reassociation_preserves_signature_and_order():
    gs = [arith(0, 1, 2, qm=1), arith(2, 0, 3, ql=1), arith(3, 1, 4, ql=1, qr=1)]
    a, b, c = (Gate(g) for g in gs)
    left, right = Seq(a, Seq(b, c)), Seq(Seq(a, b), c)
    assert signature(left) == signature(right)
    assert gates_in_order(left) == gates_in_order(right)


def test_deep_chain_does_not_recurse():
    gs = [arith(i, i, i + 1, ql=1, qc=1) for i in range(5000)]
    c = seq(*(Gate(g) for g in gs))
    assert len(gates_in_order(c)) == 5000
    assert validate(c).ok
    assert max_wire(c) == 5000


def test_json_roundtrip(chained_gates):
    c = Par(Gate(is_zero_gate(5, 6, 7)), from_gates(chained_gates))
    assert circuit_from_json(json.loads(json.dumps(circuit_to_json(c)))) == c


@st.composite
def chains(draw):
    n = draw(st.integers(min_value=0, max_value=12))
    gates = []
    for i in range(n):
        l = draw(st.integers(min_value=0, max_value=i + 1))
        r = draw(st.integers(min_value=0, max_value=i + 1))
        gates.append(arith(l, r, i + 2, qm=1))
    return gates


@given(chains(), st.integers(min_value=0, max_value=12))
def test_stats_additive_over_seq(gates, cut):
    a, b = from_gates(gates[:cut]), from_gates(gates[cut:])
    assert stats(Seq(a, b)) == stats(a) + stats(b)


@given(chains())
def test_validated_order_defines_before_use(gates):
    c = from_gates(gates)
    assert validate(c).ok
    defined = set(signature(c).inputs)
    for g in gates_in_order(c):
        assert set(g.inputs) <= defined
        defined.update(g.defined)
