import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plonkc import F5, F7, GOLDILOCKS, Env, GateInstance, Kind, Program, from_gates, gen_cs, sat, trace_equiv, validate
from plonkc import gadgets
from plonkc.optimizer import (
    DEFAULT_PASSES,
    BooleanFactError,
    OptimizerError,
    Poly,
    boolean_reduce,
    check_discipline,
    cse,
    dce,
    dedup_assertions,
    discipline_violations,
    drop_bool_checks,
    get_pass,
    get_profile,
    linear_inline,
    optimize,
    to_profile,
)

from .conftest import arith

P = GOLDILOCKS.modulus


def program(gates, inputs, outputs, field=F5, **kw):
    return Program(from_gates(gates), field, tuple(inputs), tuple(outputs), **kw)


def agree_everywhere(a, b):
    """Exhaustive io-agreement over the whole input space (tiny fields only)."""
    p = a.field.modulus
    for x in itertools.product(range(p), repeat=len(a.inputs)):
        if not trace_equiv(a.signature, a.gen_trace(list(x)), b.gen_trace(list(x))):
            return False
    return True


# -- Poly -------------------------------------------------------------------


def test_poly_arithmetic():
    x, y = Poly.var(7, 0), Poly.var(7, 1)
    e = (x + y) * (x - y)
    assert e.degree == 2
    assert e.evaluate({0: 3, 1: 1}) == 8 % 7
    assert e.substitute({1: Poly.const(7, 0)}).terms == (x * x).terms
    assert (x * x).multilinearize({0}).terms == x.terms
    assert Poly.const(7, 7).is_const and not Poly.const(7, 7).terms


# -- linear_inline --------------------------------------------------------


def test_linear_inline_example():
    prog = program([arith(0, 0, 1, ql=2, qc=3, p=5), arith(1, 2, 3, ql=1, qr=1, qm=1, p=5)], [0, 2], [3])
    out, n = linear_inline(prog)
    out, _ = dce(out)
    assert n == 1
    assert len(out.gates) == 1
    g = out.gates[0]
    assert g.inputs == (0, 2)
    assert g.constants == (2, 4, 4, 2, 3)  # (2, 4, -1, 2, 3) mod 5
    assert agree_everywhere(prog, out)


def test_linear_inline_two_consumers():
    prog = program(
        [arith(0, 0, 1, ql=2, qc=3, p=5), arith(1, 2, 3, ql=1, qr=1, qm=1, p=5), arith(1, 2, 4, qm=1, p=5)],
        [0, 2],
        [3, 4],
    )
    out, _ = optimize(prog)
    assert all(1 not in g.inputs for g in out.gates)
    assert len(out.gates) == 2
    assert agree_everywhere(prog, out)


def test_linear_inline_noop():
    prog = program([arith(0, 1, 2, qm=1, p=5)], [0, 1], [2])
    out, n = linear_inline(prog)
    assert n == 0 and out.gates == prog.gates


# -- boolean_reduce ---------------------------------------------------------


def test_boolean_reduce_square_of_bool():
    env = Env(GOLDILOCKS)
    b = env.input("bool")
    x = env.arith(b, b, 1, 0, 1, 0)  # b + b*b
    prog = env.finish([x])
    out, n = boolean_reduce(prog)
    assert n >= 1
    (g,) = out.gates
    ql, qr, qo, qm, qc = g.constants
    assert qm == 0 and qc == 0 and ql * pow(-qo, -1, P) % P == 2


def test_boolean_reduce_leaves_field_wires():
    env = Env(GOLDILOCKS)
    b = env.input()
    prog = env.finish([env.arith(b, b, 1, 0, 1, 0)])
    out, n = boolean_reduce(prog)
    assert n == 0 and out.gates == prog.gates


def test_boolean_reduce_xor_shape():
    prog = gadgets.build("xor", GOLDILOCKS)
    out, _ = optimize(prog)
    assert dict(out.stats()) == {"Arith": 1}
    (g,) = out.gates
    a, b = prog.inputs
    for x in (0, 1):
        for y in (0, 1):
            assert out.output_values(out.generate([x, y])) == [(x + y - 2 * x * y) % P]


def test_boolean_reduce_rejects_unbacked_bool_tag():
    env = Env(F7)
    x = env.input()
    prog = env.finish([x])
    bad = Program(prog.circuit, F7, prog.inputs, prog.outputs, bool_wires=frozenset({x.wire}))
    with pytest.raises(BooleanFactError):
        boolean_reduce(bad)


# -- cse / dedup / dce --------------------------------------------------------


def test_cse_merges_identical_gates():
    prog = program([arith(0, 1, 2, qm=1, p=5), arith(0, 1, 3, qm=1, p=5), arith(2, 3, 4, ql=1, qr=1, p=5)], [0, 1], [4])
    out, n = cse(prog)
    assert n == 1
    assert out.gates[-1].inputs == (2, 2)
    assert agree_everywhere(prog, out)


def test_cse_merges_is_zero():
    gates = [
        GateInstance(Kind.IS_ZERO, inputs=(0,), aux=(1,), outputs=(2,)),
        GateInstance(Kind.IS_ZERO, inputs=(0,), aux=(3,), outputs=(4,)),
        arith(2, 4, 5, ql=1, qr=1, p=5),
    ]
    out, n = cse(program(gates, [0], [5]))
    assert n == 1 and dict(out.stats()) == {"IsZero": 1, "Arith": 1}


def test_cse_keeps_different_constants():
    prog = program([arith(0, 1, 2, qm=1, p=5), arith(0, 1, 3, qm=2, p=5)], [0, 1], [2, 3])
    assert cse(prog)[1] == 0


def test_dedup_assertions():
    gates = [GateInstance(Kind.LOOKUP, inputs=(7,), payload=("u4",))] * 2 + [
        GateInstance(Kind.LOOKUP, inputs=(8,), payload=("u4",))
    ]
    prog = program(gates, [7, 8], [], field=GOLDILOCKS)
    out, n = dedup_assertions(prog)
    assert n == 1 and len(out.gates) == 2


def test_dce():
    prog = program(
        [arith(0, 1, 2, qm=1, p=5), arith(0, 1, 3, ql=1, p=5), GateInstance(Kind.BOOL_CHECK, inputs=(3,))],
        [0, 1],
        [2],
    )
    out, n = dce(prog)
    assert n == 0  # the dead wire 3 feeds an assertion
    prog = program([arith(0, 1, 2, qm=1, p=5), arith(0, 1, 3, ql=1, p=5)], [0, 1], [2])
    out, n = dce(prog)
    assert n == 1 and len(out.gates) == 1


def test_chained_add_unchanged_by_plonk_pipeline():
    prog = gadgets.build("chained_add", F5)
    out, _ = optimize(prog)
    assert dict(out.stats()) == {"Arith": 2}
    assert agree_everywhere(prog, out)


# -- lowering ---------------------------------------------------------------


def test_reduce_terms_to_lincomb():
    env = Env(GOLDILOCKS)
    xs = [env.input() for _ in range(3)]
    prog = env.finish([env.reduce_terms([2, 1, 1], xs)])
    out, _ = optimize(prog, "boojum")
    (g,) = out.gates
    assert g.kind is Kind.LIN_COMB and g.payload == (4,)
    assert g.constants == (2, 1, 1, 0)


def test_xor_boojum():
    prog = gadgets.build("xor", GOLDILOCKS)
    out, _ = optimize(prog, "boojum")
    assert dict(out.stats()) == {"FMA": 2, "Constant": 1}


def test_plonk_profile_has_no_fma_or_lincomb():
    prog = gadgets.build("sha_expansion_step", GOLDILOCKS)
    out, _ = to_profile(prog, "plonk")
    kinds = {g.kind for g in out.gates}
    assert Kind.FMA not in kinds and Kind.LIN_COMB not in kinds


@pytest.mark.parametrize("name", ["toy_poseidon_round", "sha_expansion_step"])
@pytest.mark.parametrize("profile", ["plonk", "boojum"])
def test_optimize_strictly_reduces(name, profile):
    prog = gadgets.build(name, GOLDILOCKS)
    out, _ = optimize(prog, profile)
    assert sum(out.stats().values()) < sum(prog.stats().values())
    assert validate(out.circuit).ok


def test_get_profile_errors():
    with pytest.raises(ValueError):
        get_profile("halo")
    assert get_profile("boojum", lc_width=8).lc_width == 8


def test_unknown_pass():
    with pytest.raises(KeyError):
        get_pass("licm")


# -- pipeline ---------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(gadgets.GADGETS))
@pytest.mark.parametrize("profile", ["plonk", "boojum"])
def test_optimize_idempotent(name, profile):
    prog = gadgets.build(name, GOLDILOCKS)
    once, _ = optimize(prog, profile)
    twice, _ = optimize(once, profile)
    assert dict(twice.stats()) == dict(once.stats())
    assert [repr(g) for g in twice.gates] == [repr(g) for g in once.gates]


def test_reports_cover_every_pass():
    prog = gadgets.build("xor", GOLDILOCKS)
    _, reports = optimize(prog)
    assert [r.name for r in reports[: len(DEFAULT_PASSES)]] == list(DEFAULT_PASSES)
    assert set(reports[0].to_json()) == {"pass", "iteration", "applications", "before", "after"}


def test_invalid_input_rejected():
    prog = program([arith(0, 1, 2, qm=1, p=5), arith(0, 1, 2, qm=1, p=5)], [0, 1], [2])
    with pytest.raises(OptimizerError):
        optimize(prog)


def test_discipline():
    assert discipline_violations(gadgets.build("sha_expansion_step", GOLDILOCKS)) == []
    bug = gadgets.bug_replica(GOLDILOCKS)
    assert len(discipline_violations(bug)) == 8
    with pytest.raises(OptimizerError):
        check_discipline(bug)
    assert discipline_violations(gadgets.bug_replica(GOLDILOCKS, checked_chunks=range(9))) == []


def test_sha_lookups_deduped():
    prog = gadgets.build("sha_expansion_step", GOLDILOCKS)
    out, _ = optimize(prog)
    assert out.stats()["Lookup"] == 272 < prog.stats()["Lookup"]
    assert discipline_violations(out) == []


def test_mutant_drops_checks():
    prog = gadgets.double_bool_check(F7)
    out, n = drop_bool_checks(prog)
    assert n == 2
    assert prog.gen_trace([2]) is None and out.gen_trace([2]) is not None


# -- random circuits --------------------------------------------------------


@st.composite
def random_programs(draw):
    """Small builder programs over F7 mixing every operation the optimizer rewrites."""
    env = Env(F7)
    vals = [env.input() for _ in range(draw(st.integers(1, 2)))]
    bools = [env.input("bool") for _ in range(draw(st.integers(0, 2)))]
    for _ in range(draw(st.integers(1, 8))):
        op = draw(st.sampled_from(["add", "mul", "affine", "const", "is_zero", "reduce", "and", "or", "not", "lookup"]))
        pick = lambda pool: pool[draw(st.integers(0, len(pool) - 1))]
        if op == "add":
            vals.append(env.add(pick(vals), pick(vals)))
        elif op == "mul":
            vals.append(env.mul(pick(vals), pick(vals)))
        elif op == "affine":
            vals.append(env.affine(pick(vals), draw(st.integers(0, 6)), draw(st.integers(0, 6))))
        elif op == "const":
            vals.append(env.constant(draw(st.integers(0, 6))))
        elif op == "is_zero":
            bools.append(env.is_zero(pick(vals)))
        elif op == "reduce":
            ts = [pick(vals) for _ in range(draw(st.integers(1, 4)))]
            vals.append(env.reduce_terms([draw(st.integers(0, 6)) for _ in ts], ts))
        elif op == "lookup":
            env.range_check_u4(pick(vals))
        elif bools and op == "not":
            bools.append(env.not_(pick(bools)))
        elif len(bools) >= 1 and op in ("and", "or"):
            a, b = pick(bools), pick(bools)
            bools.append(env.and_(a, b) if op == "and" else env.or_(a, b))
    outs = [vals[-1]] + ([bools[-1]] if bools else [])
    return env.finish(outs, name="random")


@settings(max_examples=60, deadline=None)
@given(random_programs(), st.sampled_from(["plonk", "boojum"]))
def test_random_programs_preserved_and_complete(prog, profile):
    out, _ = optimize(prog, profile)
    cs = out.gen_cs()
    rng = random.Random(0)
    for _ in range(40):
        x = [rng.randrange(2) if w in prog.assumed_bool else rng.randrange(7) for w in prog.inputs]
        t1, t2 = prog.gen_trace(x), out.gen_trace(x)
        assert trace_equiv(prog.signature, t1, t2)
        if t2 is not None:
            assert sat(cs, t2)
