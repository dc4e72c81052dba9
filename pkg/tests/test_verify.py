import itertools

import pytest

from plonkc import F5, F7, GOLDILOCKS, Trace, gadgets, sat
from plonkc.constraints import ConstraintSystem, naive_is_zero_cv
from plonkc.verify import (
    EnumerationBudgetError,
    check_completeness,
    check_preservation,
    check_soundness_bruteforce,
    enumerate_satisfying,
    soundness_smoke,
)


def naive_enumerate(cs, width):
    """Oracle: plain product over every assignment."""
    p = cs.field.modulus
    return [vals for vals in itertools.product(range(p), repeat=width) if sat(cs, Trace(cs.field, list(vals)))]


@pytest.mark.parametrize("name", ["chained_add", "is_zero_demo"])
def test_enumeration_matches_naive_oracle(name):
    prog = gadgets.build(name, F5)
    cs = prog.gen_cs()
    fast = [tuple(t.values) for t in enumerate_satisfying(cs, prog.width)]
    assert fast == naive_enumerate(cs, prog.width)


def test_budget():
    prog = gadgets.build("chained_add", GOLDILOCKS)
    with pytest.raises(EnumerationBudgetError):
        enumerate_satisfying(prog.gen_cs(), prog.width)


@pytest.mark.parametrize("name, cases", [("chained_add", 125), ("xor", 4), ("is_zero_demo", 9)])
def test_soundness_f5(name, cases):
    rep = check_soundness_bruteforce(gadgets.build(name, F5))
    assert rep.passed
    assert rep.cases == cases


def test_naive_is_zero_fails_soundness():
    prog = gadgets.build("is_zero_demo", F5)
    (i,), (o,) = prog.inputs, prog.outputs
    r = prog.gates[0].aux[0]
    cs = ConstraintSystem(F5, [naive_is_zero_cv(i, r, o, 5)], [], {})
    assert len(enumerate_satisfying(cs, prog.width)) == 13
    rep = check_soundness_bruteforce(prog, cs)
    assert not rep.passed
    bad = {tuple(f["satisfying"]) for f in rep.failures}
    assert ("2", "0", "1") in bad
    assert len(rep.failures) == 4


@pytest.mark.parametrize("name", sorted(gadgets.GADGETS))
def test_completeness(name, field):
    rep = check_completeness(gadgets.build(name, field), samples=100, seed=3)
    assert rep.passed and rep.cases == 100


def test_completeness_skips_failed_generation():
    prog = gadgets.build("xor", F7)
    rep = check_completeness(prog, samples=10, sampler=lambda rng: [2, 0])
    assert rep.passed and rep.cases == 0 and rep.skipped == 10


@pytest.mark.parametrize("name", sorted(gadgets.GADGETS))
def test_preservation(name):
    rep = check_preservation("optimize", gadgets.build(name, GOLDILOCKS), samples=100, profile="boojum")
    assert rep.passed, rep.failures[:1]


def test_mutant_detected():
    prog = gadgets.double_bool_check(F7)
    rep = check_preservation("drop_bool_checks", prog, inputs=[[0], [1], [2]])
    assert not rep.passed
    assert rep.failures[0]["input"] == ["2"]
    assert check_preservation("dedup_assertions", prog, inputs=[[0], [1], [2]]).passed


def test_soundness_smoke():
    rep = soundness_smoke(gadgets.build("toy_poseidon_round", GOLDILOCKS), samples=50)
    assert rep.passed and rep.cases == 50


def test_report_json():
    rep = check_soundness_bruteforce(gadgets.build("xor", F5))
    d = rep.to_json()
    assert d["passed"] and d["cases"] == 4 and d["property"] == "soundness"
    assert "pass" in rep.summary()
