from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cuspsheaves.errors import InvariantError, ParseError
from cuspsheaves.field import Field

FIELDS = [Field.Q(), Field.GF(2), Field.GF(7), Field.GF(10007)]

ints = st.integers(-50, 50)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=30)


@pytest.mark.parametrize("F", FIELDS, ids=str)
@given(x=fracs, y=fracs, z=fracs)
def test_field_axioms(F, x, y, z):
    if F.kind == "fp" and any(v.denominator % F.p == 0 for v in (x, y, z)):
        return
    a, b, c = F(x), F(y), F(z)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a + (-a) == F.zero
    if a:
        assert a * (F.one / a) == F.one


@pytest.mark.parametrize("F", FIELDS, ids=str)
@given(x=fracs)
def test_parse_format_roundtrip(F, x):
    if F.kind == "fp" and x.denominator % F.p == 0:
        return
    a = F(x)
    assert F.parse(F.format(a)) == a


def test_rational_strings():
    Q = Field.Q()
    assert Q.format(Q.parse("6/14")) == "3/7"
    assert Q.parse("-2") == Q(-2)
    assert Q(Fraction(1, 3)) * 3 == Q.one


def test_prime_field_reduces():
    F = Field.GF(7)
    assert F.parse("10") == F(3)
    assert F.format(F.parse("1/2")) == "4"


@pytest.mark.parametrize("text", ["", "1.5", "x", "1/0", "--1", "3/"])
def test_bad_scalars(text):
    with pytest.raises(ParseError):
        Field.Q().parse(text)


def test_denominator_vanishing_mod_p():
    with pytest.raises(ParseError):
        Field.GF(7).parse("1/14")


def test_non_prime_rejected():
    with pytest.raises(InvariantError):
        Field.GF(12)


def test_mixing_fields_rejected():
    with pytest.raises(InvariantError):
        Field.Q()(Field.GF(7).one)
    with pytest.raises(InvariantError):
        Field.GF(5)(Field.GF(7).one)


def test_descriptors():
    assert Field.from_descriptor({"type": "q"}) == Field.Q()
    assert Field.from_descriptor({"type": "fp", "p": 5}) == Field.GF(5)
    assert Field.from_flag("fp:5").descriptor() == {"type": "fp", "p": 5}
    for bad in [{"type": "q", "x": 1}, {"type": "fp"}, {"type": "r"}, "q"]:
        with pytest.raises(ParseError):
            Field.from_descriptor(bad)
    with pytest.raises(ParseError):
        Field.from_flag("gf7")
