import pytest
from hypothesis import given
from hypothesis import strategies as st

from plonkc import F7, GOLDILOCKS, Env, Kind, Repr, Tag, validate
from plonkc.builder import BuilderError
from plonkc.tables import range_table


def run(env, outputs, inputs):
    prog = env.finish(outputs)
    assert validate(prog.circuit).ok
    t = prog.gen_trace(inputs)
    return None if t is None else prog.output_values(t)


def test_constant_pool():
    env = Env(F7)
    a, b = env.constant(3), env.constant(10)
    assert a.wire == b.wire
    assert env.finish([]).stats() == {"Constant": 1}


def test_wire_counter_increases():
    env = Env(F7)
    ws = [env.fresh() for _ in range(5)]
    assert ws == sorted(set(ws))


def test_mul_wraps():
    env = Env(F7)
    x, y = env.input(), env.input()
    assert run(env, [env.mul(x, y)], [3, 5]) == [1]


def test_sub_and_affine():
    env = Env(F7)
    x, y = env.input(), env.input()
    assert run(env, [env.sub(x, y), env.affine(x, 2, 3)], [1, 2]) == [6, 5]


def test_not_and_or():
    env = Env(F7)
    a, b = env.input("bool"), env.input("bool")
    outs = [env.not_(a), env.and_(a, b), env.or_(a, b), env.xor(a, b)]
    assert all(o.tag is Tag.BOOL for o in outs)
    prog = env.finish(outs)
    for x in (0, 1):
        for y in (0, 1):
            t = prog.generate([x, y])
            assert prog.output_values(t) == [1 - x, x & y, x | y, x ^ y]


def test_bool_inputs_outside_domain_fail():
    env = Env(F7)
    a = env.input("bool")
    assert run(env, [env.not_(a)], [2]) is None


def test_boolean_ops_need_bool_tags():
    env = Env(F7)
    x = env.input()
    with pytest.raises(BuilderError):
        env.not_(x)
    with pytest.raises(BuilderError):
        env.and_(x, env.assert_bool(x))


def test_reduce_terms():
    env = Env(F7)
    xs = [env.input() for _ in range(3)]
    assert run(env, [env.reduce_terms([2, 1, 1], xs)], [1, 2, 3]) == [0]
    with pytest.raises(BuilderError):
        env.reduce_terms([1], xs)


def test_is_zero_and_equals():
    env = Env(GOLDILOCKS)
    x, y = env.input(), env.input()
    prog = env.finish([env.is_zero(x), env.equals(x, y)])
    assert prog.output_values(prog.generate([0, 4])) == [1, 0]
    assert prog.output_values(prog.generate([4, 4])) == [0, 1]


def test_range_check_n_36_bits():
    env = Env(GOLDILOCKS)
    x = env.input()
    low, chunks = env.range_check_36(x)
    assert low.tag is Tag.U32
    assert run(env, [low, chunks], [2**32 + 5]) == [5, 1]


def test_range_check_rejects_out_of_range():
    env = Env(GOLDILOCKS)
    x = env.input()
    low, _ = env.range_check_n(x, 32)
    assert low.wire == x.wire
    assert run(env, [low], [2**32]) is None


def test_range_check_bits_validated():
    env = Env(GOLDILOCKS)
    with pytest.raises(BuilderError):
        env.range_check_n(env.input(), 30)


def test_repeated_range_check_emits_repeated_lookups():
    env = Env(GOLDILOCKS)
    x = env.input()
    env.range_check_u4(x)
    env.range_check_u4(x)
    assert env.finish([]).stats()["Lookup"] == 2


def test_u32_input_domain():
    env = Env(GOLDILOCKS)
    w = env.input("u32")
    assert w.tag is Tag.U32 and len(w.limbs) == 8
    prog = env.finish([w])
    assert prog.stats() == {"Decompose": 1, "Lookup": 8}
    assert prog.gen_trace([2**32 - 1]) is not None
    assert prog.gen_trace([2**32]) is None


def test_check_u32_limbs_requires_u32():
    env = Env(GOLDILOCKS)
    with pytest.raises(BuilderError):
        env.check_u32_limbs(env.input())


def test_unknown_table_and_domain():
    env = Env(GOLDILOCKS)
    x = env.input()
    with pytest.raises(BuilderError):
        env.lookup("u8", x)
    with pytest.raises(BuilderError):
        env.input("u7")
    env.register_table(range_table("u8", 8))
    env.lookup("u8", x)
    assert env.finish([]).stats() == {"Lookup": 1}


def test_foreign_field_constant_rejected():
    env = Env(F7)
    with pytest.raises(BuilderError):
        env.constant(GOLDILOCKS(3))


def test_is_zero_output_is_bool_fact():
    env = Env(F7)
    o = env.is_zero(env.input())
    prog = env.finish([o])
    assert o.wire in prog.bool_wires
    assert prog.stats() == {Kind.IS_ZERO.value: 1}


@given(st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=6))
def test_reduce_terms_matches_sum(coeffs):
    env = Env(F7)
    xs = [env.input() for _ in coeffs]
    vals = list(range(1, len(coeffs) + 1))
    assert run(env, [env.reduce_terms(coeffs, xs)], vals) == [sum(c * v for c, v in zip(coeffs, vals)) % 7]


def test_repr_is_plain_data():
    r = Repr(3)
    assert r.tag is Tag.SVALUE and r.limbs == ()
