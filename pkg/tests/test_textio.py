import pytest

from ainf import bar
from ainf.errors import ParseError
from ainf.fixtures import build_fixture, fixture_names
from ainf.hpl import retraction_for, transfer
from ainf.textio import dumps, loads

SMALL = """
[ring]
polynomial 1
[basis]
1 0 0     # the unit
x 2 0
[ops]
2 ; 0,0 ; 1,1 -> 1
2 ; 0,0 ; 1,x -> x
2 ; 0,0 ; x,1 -> x
1 ; 0,0 ; 1 -> (a1)*x
"""


@pytest.mark.parametrize("name", fixture_names())
def test_round_trip(name):
    b = build_fixture(name)
    doc = loads(dumps(b.structure, b.tstar))
    A, B = b.structure, doc.structure
    for k in range(4):
        for w in bar.basis_words(A.module, k):
            assert A.ops(w) == B.ops(w)
    assert (doc.tstar is None) == (b.tstar is None)


def test_polynomial_coefficients():
    A = loads(SMALL).structure
    assert A.ring.num_alphas == 1
    assert A.m(1, bar.ZERO if hasattr(bar, "ZERO") else None, ("1",)) == {"x": A.ring.alpha(1)}


def test_transfer_output_reloads():
    A = build_fixture("N3").structure
    can = transfer(A, retraction_for(A), k_max=3).A_can
    again = loads(dumps(can, k_max=3)).structure
    assert dumps(again, k_max=3) == dumps(can, k_max=3)


@pytest.mark.parametrize("text,line", [
    ("[basis]\nx 0\n", 2),
    ("[basis]\nx 0 0\n[ops]\n1 ; 0,0 ; y -> x\n", 4),
    ("[basis]\nx 0 0\n[ops]\n2 ; 0,0 ; x -> x\n", 4),
    ("[basis]\nx 0 0\n[wat]\n", 3),
    ("x 0 0\n", 1),
    ("[basis]\nx 0 0\n[pairing]\nx , x -> 1\n", 4),
])
def test_parse_errors_carry_a_location(text, line):
    with pytest.raises(ParseError) as info:
        loads(text, "t.alg")
    assert f"t.alg:{line}" in str(info.value)
