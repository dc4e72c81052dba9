import pytest

from plonkc import F5, F7, GOLDILOCKS, GateInstance, Kind


def arith(l, r, o, ql=0, qr=0, qo=-1, qm=0, qc=0, p=GOLDILOCKS.modulus):
    return GateInstance(Kind.ARITH, inputs=(l, r), outputs=(o,), constants=tuple(c % p for c in (ql, qr, qo, qm, qc)))


@pytest.fixture
def chained_gates():
    """o = i1*i2 + i3 on wires 0..4."""
    return [arith(0, 1, 3, qm=1), arith(3, 2, 4, ql=1, qr=1)]


@pytest.fixture(params=[F7, GOLDILOCKS], ids=["f7", "goldilocks"])
def field(request):
    return request.param


@pytest.fixture
def f5():
    return F5
